#!/usr/bin/env python3
"""Rerun the full-scale phase-transition sweeps for both measurement models.

Writes phase_transition_<preset>.csv per sweep. 100 trials per grid point
reproduces the published curves; 20 is a quick desk-scale pass.
"""

import argparse
import pathlib
import sys
from dataclasses import replace

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from phasesplit import bench  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for preset in ("gaussian_gaussian", "gaussian_lowpass", "cdp_gaussian", "cdp_lowpass"):
        cfg = replace(
            bench.PRESETS[preset],
            trials=args.trials,
            seed=args.seed,
            workers=args.workers,
            stop_tol=1e-8,
        ).validate()
        rows = bench.run_phase_transition(cfg)
        path = out / f"phase_transition_{preset}.csv"
        path.write_text(bench.phase_transition_csv(rows))
        print(f"{preset}:")
        for row in rows:
            print(f"  ratio {row.ratio:g}: success {row.successes}/{row.trials}")
        print(f"  -> {path}")


if __name__ == "__main__":
    main()
