import numpy as np
import pytest

from phasesplit.core import rng_stream
from phasesplit.measurement import (
    CDP_ATOMS,
    CDP_ATOM_PROBS,
    Ensemble,
    adjoint,
    cdp_ensemble,
    dense_frame,
    ensemble_from_text,
    ensemble_to_text,
    forward,
    gaussian_ensemble,
    measure,
    sum_column_norms_sq,
    upper_frame_bound,
)


def identity_ensemble(d):
    frame = np.eye(d)
    return Ensemble(kind="gaussian_real", d=d, N=d, seed=0, frame=frame)


class TestConstruction:
    def test_gaussian_deterministic(self):
        a = gaussian_ensemble(2, 3, field="complex", seed=5)
        b = gaussian_ensemble(2, 3, field="complex", seed=5)
        assert np.array_equal(a.frame, b.frame)

    def test_cdp_deterministic(self):
        a = cdp_ensemble(16, 4, seed=5)
        b = cdp_ensemble(16, 4, seed=5)
        assert np.array_equal(a.masks, b.masks)
        assert a.N == 4 * 16

    def test_column_energy(self):
        for field in ("complex", "real"):
            e = gaussian_ensemble(16, 10_000, field=field, seed=1)
            norms = np.sum(np.abs(e.frame) ** 2, axis=0)
            assert np.mean(norms) == pytest.approx(16.0, rel=0.03)

    def test_degenerate_scalar_frame(self):
        e = gaussian_ensemble(1, 1, field="real", seed=2)
        f = e.frame[0, 0]
        x = np.array([1.7])
        assert measure(e, x)[0] == pytest.approx((f * 1.7) ** 2, rel=1e-14)

    def test_rank_deficiency_flag(self):
        assert gaussian_ensemble(8, 4, seed=0).maybe_rank_deficient
        assert not gaussian_ensemble(8, 8, seed=0).maybe_rank_deficient

    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            gaussian_ensemble(0, 4)
        with pytest.raises(ValueError):
            cdp_ensemble(4, 0)


class TestCdpMasks:
    def test_entries_in_atom_set(self):
        masks = cdp_ensemble(64, 8, seed=3).masks.ravel()
        assert all(np.any(np.isclose(v, CDP_ATOMS)) for v in masks)

    def test_atom_frequencies(self):
        masks = cdp_ensemble(1000, 100, seed=4).masks.ravel()  # 1e5 draws
        for atom, p in zip(CDP_ATOMS, CDP_ATOM_PROBS):
            freq = np.mean(np.isclose(masks, atom))
            assert freq == pytest.approx(p, abs=0.005)

    def test_unit_second_moment(self):
        masks = cdp_ensemble(1000, 100, seed=4).masks.ravel()
        assert np.mean(np.abs(masks) ** 2) == pytest.approx(1.0, abs=0.02)


class TestForwardAdjoint:
    def test_identity_frame_copies(self):
        e = identity_ensemble(4)
        v = np.array([1.0, -2.0, 0.5, 3.0])
        assert np.allclose(forward(e, v), v)

    def test_cdp_delta_gives_constant_blocks(self):
        e = cdp_ensemble(8, 3, seed=6)
        v = np.zeros(8, dtype=complex)
        v[0] = 1.0
        out = forward(e, v).reshape(3, 8)
        for p in range(3):
            assert np.allclose(out[p], np.conj(e.masks[p, 0]))

    def test_cdp_fft_matches_dense(self):
        for d, L in ((8, 1), (16, 3), (64, 4)):
            e = cdp_ensemble(d, L, seed=7)
            dense = dense_frame(e)
            rng = rng_stream(7, d)
            v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            w = rng.standard_normal(e.N) + 1j * rng.standard_normal(e.N)
            fwd_dense = dense.conj().T @ v
            assert np.linalg.norm(forward(e, v) - fwd_dense) <= 1e-10 * np.linalg.norm(fwd_dense)
            adj_dense = dense @ w
            assert np.linalg.norm(adjoint(e, w) - adj_dense) <= 1e-10 * np.linalg.norm(adj_dense)

    def test_adjoint_picks_column(self):
        e = gaussian_ensemble(6, 9, seed=8)
        w = np.zeros(9)
        w[1] = 1.0
        assert np.allclose(adjoint(e, w), e.frame[:, 1])

    def test_adjoint_of_zero(self):
        e = cdp_ensemble(8, 2, seed=9)
        assert np.allclose(adjoint(e, np.zeros(16)), 0.0)

    @pytest.mark.parametrize("make", [
        lambda: gaussian_ensemble(12, 40, seed=10),
        lambda: gaussian_ensemble(12, 40, field="real", seed=10),
        lambda: cdp_ensemble(12, 4, seed=10),
    ])
    def test_adjointness_identity(self, make):
        e = make()
        rng = rng_stream(11, e.N)
        for _ in range(100):
            v = rng.standard_normal(e.d) + 1j * rng.standard_normal(e.d)
            w = rng.standard_normal(e.N) + 1j * rng.standard_normal(e.N)
            lhs = np.vdot(forward(e, v), w)
            rhs = np.vdot(v, adjoint(e, w))
            assert abs(lhs - rhs) <= 1e-10 * np.linalg.norm(v) * np.linalg.norm(w) * np.sqrt(e.N)

    def test_dimension_mismatch(self):
        e = gaussian_ensemble(4, 6, seed=0)
        with pytest.raises(ValueError):
            forward(e, np.ones(5))
        with pytest.raises(ValueError):
            adjoint(e, np.ones(5))


class TestMeasure:
    def test_zero_signal(self):
        e = gaussian_ensemble(5, 11, seed=12)
        assert np.all(measure(e, np.zeros(5)) == 0.0)

    def test_phase_invariance(self):
        e = cdp_ensemble(16, 2, seed=13)
        rng = rng_stream(13, 1)
        x = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        c = np.exp(0.73j)
        b1, b2 = measure(e, x), measure(e, c * x)
        assert np.allclose(b1, b2, rtol=1e-12, atol=1e-12 * b1.max())

    def test_nonnegative(self):
        e = gaussian_ensemble(8, 24, seed=14)
        x = rng_stream(14, 1).standard_normal(8)
        assert np.all(measure(e, x) >= 0.0)

    def test_cdp_delta_intensities(self):
        e = cdp_ensemble(8, 3, seed=15)
        v = np.zeros(8)
        v[0] = 1.0
        b = measure(e, v).reshape(3, 8)
        for p in range(3):
            expected = abs(e.masks[p, 0]) ** 2
            assert np.allclose(b[p], expected)
            assert expected == pytest.approx(0.5) or expected == pytest.approx(3.0)

    def test_noise_hook(self):
        e = gaussian_ensemble(8, 24, seed=16)
        x = rng_stream(16, 1).standard_normal(8)
        with pytest.raises(ValueError):
            measure(e, x, noise_std=0.1)
        noisy = measure(e, x, noise_std=0.1, rng=rng_stream(16, 2))
        assert np.all(noisy >= 0.0)
        assert not np.allclose(noisy, measure(e, x))


class TestFrameBound:
    def test_identity(self):
        assert upper_frame_bound(identity_ensemble(5)) == pytest.approx(1.0, rel=1e-9)

    def test_repeated_column(self):
        frame = np.zeros((4, 2))
        frame[0, :] = 1.0
        e = Ensemble(kind="gaussian_real", d=4, N=2, seed=0, frame=frame)
        assert upper_frame_bound(e) == pytest.approx(2.0, rel=1e-9)

    def test_matches_dense_eigensolver(self):
        e = gaussian_ensemble(8, 32, seed=17)
        dense = np.linalg.eigvalsh(e.frame @ e.frame.conj().T)[-1]
        assert upper_frame_bound(e) == pytest.approx(dense, rel=1e-8)

    def test_bounds_forward_norm(self):
        e = cdp_ensemble(16, 3, seed=18)
        c = upper_frame_bound(e)
        rng = rng_stream(18, 1)
        for _ in range(50):
            v = rng.standard_normal(16) + 1j * rng.standard_normal(16)
            assert np.linalg.norm(forward(e, v)) ** 2 <= c * np.linalg.norm(v) ** 2 * (1 + 1e-10)

    def test_cdp_column_norms(self):
        e = cdp_ensemble(8, 3, seed=19)
        dense = dense_frame(e)
        assert sum_column_norms_sq(e) == pytest.approx(np.sum(np.abs(dense) ** 2), rel=1e-12)


class TestSerialization:
    @pytest.mark.parametrize("make", [
        lambda: gaussian_ensemble(6, 20, field="complex", seed=21),
        lambda: gaussian_ensemble(6, 20, field="real", seed=22),
        lambda: cdp_ensemble(6, 3, seed=23),
    ])
    def test_round_trip(self, make):
        e = make()
        clone = ensemble_from_text(ensemble_to_text(e))
        assert clone.kind == e.kind and clone.d == e.d and clone.N == e.N
        payload, clone_payload = (
            (e.masks, clone.masks) if e.kind == "cdp" else (e.frame, clone.frame)
        )
        assert np.array_equal(payload, clone_payload)

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            ensemble_from_text("not an ensemble\nkind=cdp\n")
