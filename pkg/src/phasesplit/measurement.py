"""Measurement ensembles and the intensity map b_n = |f_n^* x|^2.

Two ensemble families are supported: dense Gaussian frames (real or complex
columns) and coded diffraction patterns (CDP), where each of L random masks
is applied entrywise before an unnormalized DFT. Ensembles are immutable,
re-derivable from their seed, and applied matrix-free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import rng_stream

__all__ = [
    "Ensemble",
    "CDP_ATOMS",
    "CDP_ATOM_PROBS",
    "gaussian_ensemble",
    "cdp_ensemble",
    "forward",
    "adjoint",
    "measure",
    "dense_frame",
    "sum_column_norms_sq",
    "frame_top_eigenpair",
    "upper_frame_bound",
    "ensemble_to_text",
    "ensemble_from_text",
]

_SQRT_HALF = np.sqrt(2.0) / 2.0
_SQRT3 = np.sqrt(3.0)

# Mask entries take one of eight values: the four unimodular-ish "light"
# atoms with probability 1/5 each and the four "heavy" sqrt(3) atoms with
# probability 1/20 each, giving E|g|^2 = 1.
CDP_ATOMS = np.array(
    [
        _SQRT_HALF,
        -_SQRT_HALF,
        1j * _SQRT_HALF,
        -1j * _SQRT_HALF,
        _SQRT3,
        -_SQRT3,
        1j * _SQRT3,
        -1j * _SQRT3,
    ]
)
CDP_ATOM_PROBS = np.array([0.2, 0.2, 0.2, 0.2, 0.05, 0.05, 0.05, 0.05])


@dataclass(frozen=True, eq=False)
class Ensemble:
    """An immutable measurement frame of N vectors in dimension d.

    Gaussian kinds carry the frame matrix (columns f_1..f_N); the CDP kind
    carries the L masks, with N = L*d measurements applied via FFTs.
    """

    kind: str  # gaussian_complex | gaussian_real | cdp
    d: int
    N: int
    seed: int
    frame: np.ndarray | None = None  # (d, N)
    masks: np.ndarray | None = None  # (L, d)

    @property
    def L(self):
        if self.masks is None:
            raise ValueError("not a CDP ensemble")
        return self.masks.shape[0]

    @property
    def is_complex(self):
        return self.kind != "gaussian_real"

    @property
    def maybe_rank_deficient(self):
        # Full column-rank of the frame matrix fails for sure when N < d;
        # degenerate random draws have probability zero and are not checked.
        return self.N < self.d


def gaussian_ensemble(d, N, field="complex", seed=0):
    """Frame of N i.i.d. Gaussian columns in dimension d, fixed by ``seed``."""
    if d < 1 or N < 1:
        raise ValueError("d and N must be >= 1")
    rng = rng_stream(seed, 0xE5)
    if field == "complex":
        frame = (rng.standard_normal((d, N)) + 1j * rng.standard_normal((d, N))) / np.sqrt(2.0)
        kind = "gaussian_complex"
    elif field == "real":
        frame = rng.standard_normal((d, N))
        kind = "gaussian_real"
    else:
        raise ValueError(f"unknown field {field!r}")
    frame.setflags(write=False)
    return Ensemble(kind=kind, d=d, N=N, seed=int(seed), frame=frame)


def cdp_ensemble(d, L, seed=0):
    """L random masks of length d; N = L*d intensity measurements."""
    if d < 1 or L < 1:
        raise ValueError("d and L must be >= 1")
    rng = rng_stream(seed, 0xE5)
    idx = rng.choice(CDP_ATOMS.size, size=(L, d), p=CDP_ATOM_PROBS)
    masks = CDP_ATOMS[idx]
    masks.setflags(write=False)
    return Ensemble(kind="cdp", d=d, N=L * d, seed=int(seed), masks=masks)


def _check_signal(e, v):
    v = np.asarray(v)
    if v.ndim != 1 or v.shape[0] != e.d:
        raise ValueError(f"signal of dimension {v.shape} does not match d={e.d}")
    return v


def forward(e, v):
    """Inner products f_n^* v for all n (length N, complex).

    CDP path: block p is the unnormalized DFT of conj(g_p) . v, so the whole
    map costs O(L d log d).
    """
    v = _check_signal(e, v)
    if e.kind == "cdp":
        return np.fft.fft(np.conj(e.masks) * v[None, :], axis=1).ravel()
    return e.frame.conj().T @ v


def adjoint(e, w):
    """Sum_n w_n f_n, the adjoint of :func:`forward`."""
    w = np.asarray(w)
    if w.ndim != 1 or w.shape[0] != e.N:
        raise ValueError(f"weight vector of shape {w.shape} does not match N={e.N}")
    if e.kind == "cdp":
        blocks = w.reshape(e.L, e.d)
        return (e.masks * (e.d * np.fft.ifft(blocks, axis=1))).sum(axis=0)
    return e.frame @ w


def measure(e, x, noise_std=0.0, rng=None):
    """Intensities b = |f_n^* x|^2, optionally with clamped additive noise."""
    fx = forward(e, x)
    b = fx.real**2 + fx.imag**2
    if noise_std > 0.0:
        if rng is None:
            raise ValueError("noisy measurements need an rng")
        b = np.maximum(b + noise_std * rng.standard_normal(e.N), 0.0)
    return b


def dense_frame(e):
    """The frame as an explicit (d, N) matrix; CDP columns are materialized."""
    if e.kind != "cdp":
        return e.frame
    t = np.arange(e.d)
    kernel = np.exp(2j * np.pi * np.outer(t, t) / e.d)  # kernel[t, q]
    blocks = [e.masks[p][:, None] * kernel for p in range(e.L)]
    return np.hstack(blocks)


def sum_column_norms_sq(e):
    """Sum_n ||f_n||^2, computed from the stored payload."""
    if e.kind == "cdp":
        # each DFT row has unit-magnitude entries, so ||G_p f_q||^2 = ||g_p||^2
        return float(e.d * np.sum(np.abs(e.masks) ** 2))
    return float(np.sum(np.abs(e.frame) ** 2))


def frame_top_eigenpair(e, tol=1e-10, max_iter=10_000, seed=0):
    """Largest eigenvalue of F F^* and a unit eigenvector, by power iteration.

    Iterates v -> adjoint(forward(v)) matrix-free until the Rayleigh quotient
    stalls to relative tolerance ``tol``.
    """
    rng = rng_stream(seed, 0xB0)
    if e.is_complex:
        v = rng.standard_normal(e.d) + 1j * rng.standard_normal(e.d)
    else:
        v = rng.standard_normal(e.d)
    v = v / np.linalg.norm(v)
    rho_prev = None
    for _ in range(max_iter):
        w = adjoint(e, forward(e, v))
        rho = float(np.real(np.vdot(v, w)))
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0, v
        v = w / nrm
        if rho_prev is not None and abs(rho - rho_prev) <= tol * max(abs(rho), 1e-300):
            return rho, v
        rho_prev = rho
    return rho_prev, v


def upper_frame_bound(e, tol=1e-10, max_iter=10_000):
    """Largest eigenvalue of F F^* (the optimal frame constant)."""
    value, _ = frame_top_eigenpair(e, tol=tol, max_iter=max_iter)
    return value


_TEXT_HEADER = "phasesplit-ensemble v1"


def ensemble_to_text(e):
    """Serialize as re-derivable text: kind, sizes and seed, never the payload."""
    lines = [_TEXT_HEADER, f"kind={e.kind}", f"d={e.d}"]
    if e.kind == "cdp":
        lines.append(f"L={e.L}")
    else:
        lines.append(f"N={e.N}")
    lines.append(f"seed={e.seed}")
    return "\n".join(lines) + "\n"


def ensemble_from_text(text):
    """Rebuild an ensemble from :func:`ensemble_to_text` output."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0] != _TEXT_HEADER:
        raise ValueError("not a serialized ensemble")
    fields = {}
    for ln in lines[1:]:
        key, _, val = ln.partition("=")
        fields[key] = val
    kind = fields["kind"]
    d = int(fields["d"])
    seed = int(fields["seed"])
    if kind == "cdp":
        return cdp_ensemble(d, int(fields["L"]), seed=seed)
    if kind in ("gaussian_complex", "gaussian_real"):
        field = "complex" if kind == "gaussian_complex" else "real"
        return gaussian_ensemble(d, int(fields["N"]), field=field, seed=seed)
    raise ValueError(f"unknown ensemble kind {kind!r}")
