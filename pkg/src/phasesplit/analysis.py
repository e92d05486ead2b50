"""Verification instruments for the operators, gradients and solvers.

Everything here is an independent check of some other module: finite
differences against the analytic gradients, the frame-bound inequality on
random rank-one matrices, an exact rank-two nuclear distance, a trace
monotonicity audit, and the predicted one-step decrease ratio between the
two solvers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import rng_stream
from .measurement import forward, frame_top_eigenpair, measure
from .objective import (
    split_grad,
    split_loss,
    split_quad_form,
    wf_grad,
    wf_loss,
    wf_quad_form,
)

__all__ = [
    "fd_gradient_check",
    "FrameBoundReport",
    "frame_bound_check",
    "nuclear_dist_rank2",
    "SpeedupReport",
    "speedup_diagnostic",
    "monotonicity_audit",
]


def _fd_directions(dim, count, complex_mode, rng):
    dirs = []
    for _ in range(count):
        v = rng.standard_normal(dim)
        v /= np.linalg.norm(v)
        dirs.append(v.astype(complex) if complex_mode else v)
    if complex_mode:
        dirs.extend([1j * v for v in list(dirs)])
    return dirs


def fd_gradient_check(kind, e, point, b, lam=0.0, h=1e-5, n_directions=20, rng=None):
    """Max deviation between analytic and central-difference derivatives.

    ``kind`` selects the gradient under test: "split_x", "split_y" or "wf".
    Directional derivatives are compared along ``n_directions`` random real
    directions (plus the same count of imaginary ones for complex signals);
    the deviation is relative where the derivatives are O(1) or larger and
    absolute near a critical point.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if rng is None:
        rng = rng_stream(0, 0xFD)

    if kind == "wf":
        z = np.asarray(point)
        grad = wf_grad(e, z, b)

        def value(v):
            return wf_loss(e, v, b)

        base = z
    elif kind in ("split_x", "split_y"):
        x, y = (np.asarray(point[0]), np.asarray(point[1]))
        gx, gy = split_grad(e, x, y, b, lam)
        if kind == "split_x":
            grad, base = gx, x

            def value(v):
                return split_loss(e, v, y, b, lam)

        else:
            grad, base = gy, y

            def value(v):
                return split_loss(e, x, v, b, lam)

    else:
        raise ValueError(f"unknown gradient kind {kind!r}")

    complex_mode = np.iscomplexobj(base)
    worst = 0.0
    for direction in _fd_directions(base.shape[0], n_directions, complex_mode, rng):
        numeric = (value(base + h * direction) - value(base - h * direction)) / (2.0 * h)
        analytic = float(np.real(np.vdot(grad, direction)))
        deviation = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1.0)
        worst = max(worst, deviation)
    return worst


@dataclass
class FrameBoundReport:
    bound: float  # largest eigenvalue of F F^*
    worst_slack: float  # max over trials of lhs - bound*||u|| ||v|| (<= 0 when ok)
    violations: int  # trials where the slack exceeded the tolerance
    equality_gap: float  # relative gap at the top eigenvector (tight case)


def frame_bound_check(e, trials, rng=None, tol=1e-8):
    """Check sum_n |f_n^* u||f_n^* v| <= C ||u|| ||v|| on random rank-one tests.

    C is the upper frame bound; the inequality is tight for u = v = top
    eigenvector of F F^*, which is verified as well.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if rng is None:
        rng = rng_stream(0, 0xFB)
    bound, top = frame_top_eigenpair(e)

    worst = -np.inf
    violations = 0
    for _ in range(trials):
        if e.is_complex:
            u = rng.standard_normal(e.d) + 1j * rng.standard_normal(e.d)
            v = rng.standard_normal(e.d) + 1j * rng.standard_normal(e.d)
        else:
            u = rng.standard_normal(e.d)
            v = rng.standard_normal(e.d)
        lhs = float(np.sum(np.abs(forward(e, u)) * np.abs(forward(e, v))))
        rhs = bound * float(np.linalg.norm(u) * np.linalg.norm(v))
        slack = lhs - rhs
        worst = max(worst, slack)
        if slack > tol:
            violations += 1

    tight_lhs = float(np.sum(np.abs(forward(e, top)) ** 2))  # ||top|| = 1
    equality_gap = abs(tight_lhs - bound) / bound
    return FrameBoundReport(
        bound=bound, worst_slack=worst, violations=violations, equality_gap=equality_gap
    )


def nuclear_dist_rank2(x, z):
    """Nuclear norm of z z^* - x x^*, exactly via the rank-2 reduction.

    The difference acts only on span{x, z}, so its nonzero eigenvalues are
    those of the 2x2 matrix expressed in an orthonormal basis of that span.
    """
    x = np.asarray(x)
    z = np.asarray(z)
    if x.shape != z.shape:
        raise ValueError("signals must have equal dimension")
    basis = np.stack([x, z], axis=1)
    _, r = np.linalg.qr(basis)
    xq, zq = r[:, 0], r[:, 1]
    small = np.outer(zq, np.conj(zq)) - np.outer(xq, np.conj(xq))
    return float(np.sum(np.abs(np.linalg.eigvalsh(small))))


@dataclass
class SpeedupReport:
    """Model-predicted one-step objective decreases near a solution."""

    predicted_E_decrease: float  # split objective, one optimally-sized x-step
    predicted_G_decrease: float  # quartic objective, one optimally-sized step
    ratio: float  # G decrease over E decrease, ~2/3 when x ~ y
    d: int
    N: int
    seed: int
    proximity: float

    def to_json(self):
        import json

        return json.dumps(self.__dict__, sort_keys=True)


def speedup_diagnostic(e, x0, perturbation, rng=None):
    """Compare predicted per-step decreases of the two objectives.

    Evaluated at x = y = x0 + delta with ||delta|| = perturbation * ||x0||,
    exact intensities from x0 and no coupling. Both predictions use the
    near-solution quadratic models behind the optimal step sizes; their
    ratio approaches 2/3 as the perturbation shrinks, i.e. the alternating
    step removes 1.5x more objective than the flow step.
    """
    if e.kind != "gaussian_real":
        raise ValueError("the decrease comparison is defined for real ensembles")
    if not 0 < perturbation <= 1e-3:
        raise ValueError("perturbation must be in (0, 1e-3]")
    if rng is None:
        rng = rng_stream(0, 0x5D)
    x0 = np.asarray(x0, dtype=float)
    delta = rng.standard_normal(e.d)
    delta *= perturbation * np.linalg.norm(x0) / np.linalg.norm(delta)
    point = x0 + delta
    b = measure(e, x0)

    gx, _ = split_grad(e, point, point, b, 0.0)
    sq = float(np.linalg.norm(gx) ** 2)
    if sq == 0.0:
        raise ValueError("zero gradient: the point is critical, no ratio defined")
    q = split_quad_form(e, point, gx, 0.0)
    dec_split = -(sq * sq) / (2.0 * q)

    g = wf_grad(e, point, b)
    sq_g = float(np.linalg.norm(g) ** 2)
    wq = wf_quad_form(e, point, g)
    dec_flow = -(sq_g * sq_g) / (2.0 * wq)

    return SpeedupReport(
        predicted_E_decrease=dec_split,
        predicted_G_decrease=dec_flow,
        ratio=dec_flow / dec_split,
        d=e.d,
        N=e.N,
        seed=e.seed,
        proximity=float(np.linalg.norm(delta) / np.linalg.norm(x0)),
    )


def monotonicity_audit(trace, slack=1e-12):
    """Scan objective values for an uptick beyond slack * (1 + |value|).

    Accepts a solve result or any sequence of objective values. Returns
    ``(ok, first_violation_index)`` with the index of the first offending
    entry, or ``(True, None)`` for a clean trace.
    """
    if hasattr(trace, "trace"):
        rows = trace.trace
        values = [row.E if row.E is not None else row.G for row in rows]
    else:
        values = list(trace)
    for i in range(1, len(values)):
        allowed = values[i - 1] + slack * (1.0 + abs(values[i - 1]))
        if values[i] > allowed:
            return False, i
    return True, None
