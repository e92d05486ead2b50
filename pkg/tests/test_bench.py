from dataclasses import replace

import numpy as np
import pytest

from phasesplit import bench, cli
from phasesplit.signals import ImageChannels, save_image
from phasesplit.solvers import Schedules

FAST_ALT = Schedules(tau0=330.0, mu_max=0.4, lam0=300.0, lam_decay=0.15 / 330)
FAST_WF = Schedules(tau0=330.0, mu_max=0.2)


def tiny_phase_config(**overrides):
    base = dict(
        experiment="phase_transition",
        model="gaussian_complex",
        signal="gaussian",
        d=16,
        trials=3,
        iterations=400,
        grid=(2.0, 6.0),
        seed=99,
        stop_tol=1e-8,
        alt=FAST_ALT,
        wf=FAST_WF,
    )
    base.update(overrides)
    return bench.ExperimentConfig(**base).validate()


def gradient_pgm(tmp_path, w=8, h=8):
    vals = np.add.outer(np.arange(h), np.arange(w)).astype(float)
    vals /= vals.max()
    path = tmp_path / "gradient.pgm"
    save_image(path, ImageChannels(width=w, height=h, channels=(vals.ravel(),)))
    return str(path)


class TestConfigParsing:
    def test_defaults(self):
        cfg = bench.parse_config("experiment=check\n")
        assert cfg.d == 128 and cfg.trials == 20

    def test_preset_with_overrides(self):
        cfg = bench.parse_config(
            "preset=cdp_gaussian\n"
            "trials=5\n"
            "grid=4,6\n"
            "alt_lam0=10\n"
            "# comment line\n"
        )
        assert cfg.model == "cdp"
        assert cfg.trials == 5
        assert cfg.grid == (4.0, 6.0)
        assert cfg.alt.lam0 == 10.0
        assert cfg.alt.lam_decay == pytest.approx(0.0015 / 330)  # preset value kept

    def test_schedule_keys(self):
        cfg = bench.parse_config("wf_mu_max=0.3\nstep_scaling=raw\n")
        assert cfg.wf.mu_max == 0.3
        assert cfg.wf.step_scaling == "raw" and cfg.alt.step_scaling == "raw"

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown config key"):
            bench.parse_config("velocity=9\n")

    def test_bad_line_rejected(self):
        with pytest.raises(ValueError, match="key=value"):
            bench.parse_config("just words\n")

    def test_grid_must_increase(self):
        with pytest.raises(ValueError, match="grid"):
            bench.parse_config("grid=4,4\n")

    def test_image_requires_path_at_run_time(self):
        cfg = bench.parse_config("experiment=image\nsignal=image\nmodel=cdp\n")
        with pytest.raises(ValueError, match="image_path"):
            bench.run_image_experiment(cfg)


class TestPhaseTransition:
    def test_rows_and_undersampled_failure(self):
        cfg = tiny_phase_config(d=32, grid=(1.0, 6.0), trials=4, iterations=600)
        rows = bench.run_phase_transition(cfg)
        assert [r.ratio for r in rows] == [1.0, 6.0]
        assert all(r.success_rate == r.successes / r.trials for r in rows)
        assert rows[0].successes == 0  # N = d carries too little information
        assert rows[1].successes == 4

    def test_monotone_success_rate(self):
        cfg = tiny_phase_config(d=24, grid=(1.5, 8.0), trials=4, iterations=600)
        rows = bench.run_phase_transition(cfg)
        assert rows[-1].success_rate >= rows[0].success_rate

    def test_deterministic_csv(self):
        cfg = tiny_phase_config()
        csv1 = bench.phase_transition_csv(bench.run_phase_transition(cfg))
        csv2 = bench.phase_transition_csv(bench.run_phase_transition(cfg))
        assert csv1 == csv2
        header = csv1.splitlines()[0]
        assert header == "ratio,trials,successes,success_rate,mean_rel_error"

    def test_worker_pool_matches_serial(self):
        cfg = tiny_phase_config()
        serial = bench.phase_transition_csv(bench.run_phase_transition(cfg))
        parallel = bench.phase_transition_csv(
            bench.run_phase_transition(replace(cfg, workers=2))
        )
        assert serial == parallel

    def test_worker_env_cap(self, monkeypatch):
        monkeypatch.setenv(bench.WORKER_ENV_VAR, "1")
        assert bench._resolve_workers(tiny_phase_config(workers=8)) == 1

    def test_wf_solver_selectable(self):
        cfg = tiny_phase_config(algo="wf", grid=(6.0,), iterations=800)
        rows = bench.run_phase_transition(cfg)
        assert rows[0].successes > 0


class TestConvergence:
    def test_curves_and_summary(self):
        fast = Schedules(tau0=60.0, mu_max=0.4, lam0=300.0, lam_decay=0.15 / 330)
        cfg = tiny_phase_config(
            experiment="converge", d=32, iterations=600, stop_tol=0.0,
            alt=fast, wf=Schedules(tau0=60.0, mu_max=0.2),
        )
        alt, wf, truth, summary = bench.run_convergence_curve(cfg)
        # structural checks only; the acceptance suite runs the full-size bar
        assert summary["alt_final_rel_error"] <= 1e-4
        assert summary["wf_iterations"] == 600
        assert summary["alt_rounds"] == 300
        assert summary["nuclear_dist_lhs"] >= 0.0
        csv_text = bench.convergence_csv(alt, wf)
        lines = csv_text.strip().splitlines()
        assert lines[0] == "iter,algo,objective,rel_error"
        alt_iters = [int(l.split(",")[0]) for l in lines[1:] if ",alt," in l]
        wf_iters = [int(l.split(",")[0]) for l in lines[1:] if ",wf," in l]
        # iteration parity: one alternating round counts as two iterations
        assert max(alt_iters) == max(wf_iters) == 600
        assert all(i % 2 == 0 for i in alt_iters)
        # truth is known, so every row carries a relative error
        assert all(l.split(",")[3] != "" for l in lines[1:])

    def test_deterministic(self):
        cfg = tiny_phase_config(experiment="converge", d=16, iterations=200, stop_tol=0.0)
        a1, w1, _, _ = bench.run_convergence_curve(cfg)
        a2, w2, _, _ = bench.run_convergence_curve(cfg)
        assert bench.convergence_csv(a1, w1) == bench.convergence_csv(a2, w2)


class TestImageExperiment:
    def test_grayscale_single_channel_report(self, tmp_path):
        path = gradient_pgm(tmp_path)
        cfg = replace(
            bench.PRESETS["image_small"],
            image_path=path,
            seed=3,
            image_rounds=(20, 40),
        )
        report = bench.run_image_experiment(cfg, out_dir=str(tmp_path))
        assert {r["algo"] for r in report} == {"alt", "wf"}
        assert [r["n"] for r in report if r["algo"] == "alt"] == [20, 40]
        assert all(r["iterations"] == 2 * r["n"] for r in report)
        assert (tmp_path / "recovered_40.pgm").exists()

    def test_rgb_uses_three_channels(self, tmp_path):
        rng = np.random.default_rng(0)
        img = ImageChannels(width=4, height=4, channels=tuple(rng.random(16) for _ in range(3)))
        path = tmp_path / "rgb.ppm"
        save_image(path, img)
        cfg = replace(
            bench.PRESETS["image_small"],
            image_path=str(path),
            seed=3,
            image_rounds=(15,),
        )
        report = bench.run_image_experiment(cfg, out_dir=str(tmp_path))
        assert (tmp_path / "recovered_15.ppm").exists()
        assert len(report) == 2


class TestChecks:
    def test_all_pass(self):
        ok, entries = bench.run_checks()
        assert ok
        assert len(entries) >= 10
        assert all(e["passed"] for e in entries)

    def test_injected_sign_error_fails(self):
        from phasesplit.objective import split_grad

        def flipped(e, x, y, b, lam):
            gx, gy = split_grad(e, x, y, b, lam)
            return -gx, gy

        ok, entries = bench.run_checks(grad_override=flipped)
        assert not ok
        failed = [e["name"] for e in entries if not e["passed"]]
        assert any(name.startswith("gradient") for name in failed)

    def test_json_shape(self):
        import json

        ok, entries = bench.run_checks()
        payload = json.loads(bench.checks_json(ok, entries))
        assert payload["passed"] is True
        assert {e["name"] for e in payload["checks"]} >= {
            "gradient_real",
            "adjoint_cdp",
            "cdp_fft_vs_dense",
            "frame_bound_violations",
            "monotone_fixed_step",
            "speedup_ratio",
        }


class TestCli:
    def test_check_command(self, tmp_path):
        assert cli.main(["check", "--out", str(tmp_path)]) == 0
        assert (tmp_path / "checks.json").exists()

    def test_phase_transition_command(self, tmp_path):
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text(
            "experiment=phase_transition\nd=16\ntrials=2\niterations=200\n"
            "grid=2,6\nseed=4\nstop_tol=1e-6\n"
        )
        code = cli.main(
            ["phase-transition", "--config", str(cfg_path), "--out", str(tmp_path)]
        )
        assert code == 0
        text = (tmp_path / "phase_transition.csv").read_text()
        assert text.startswith("ratio,trials,successes,")

    def test_seed_and_trials_overrides(self, tmp_path):
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text("experiment=phase_transition\nd=16\ntrials=2\niterations=200\ngrid=6\n")
        cli.main(
            [
                "phase-transition",
                "--config",
                str(cfg_path),
                "--seed",
                "123",
                "--trials",
                "3",
                "--out",
                str(tmp_path),
            ]
        )
        text = (tmp_path / "phase_transition.csv").read_text()
        assert text.splitlines()[1].split(",")[1] == "3"

    def test_config_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("experiment=warp\n")
        assert cli.main(["check", "--config", str(bad), "--out", str(tmp_path)]) == 2

    def test_image_command(self, tmp_path):
        path = gradient_pgm(tmp_path)
        cfg_path = tmp_path / "img.cfg"
        cfg_path.write_text("preset=image_small\nimage_rounds=10,20\nseed=2\n")
        code = cli.main(
            ["image", "--config", str(cfg_path), "--image", path, "--out", str(tmp_path)]
        )
        assert code == 0
        assert (tmp_path / "image_report.csv").exists()
