"""Alternating gradient descent on the split loss, and the Wirtinger-flow
baseline on the quartic loss.

One alternating round is a gradient step in x followed by a gradient step in
y *at the updated x* (Gauss-Seidel ordering), so a round costs two iterations
when budgets are matched against the single-variable flow. Steps follow either
the ramped schedule min(1 - e^{-tau/tau0}, mu_max) divided by ||z0||^2, or an
exact line search using the one-block quadratic form, which is exact because
the split loss is quadratic in each variable separately.

Scheduled steps multiply the plain Wirtinger derivative (d/d conjugate), the
normalization under which the flow baseline's step sizes are conventionally
quoted; that is half of the gradients exported by :mod:`.objective` for the
split loss and a quarter for the quartic loss, whose value is twice the
conventional half-squared misfit. Line-search steps are invariant to this
choice since the step is computed for the ray actually used.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import relative_error
from .measurement import adjoint, forward
from .objective import split_quad_form, wf_quad_form

__all__ = [
    "SplitPoint",
    "Schedules",
    "SolverConfig",
    "TraceRow",
    "SolveResult",
    "step_schedule",
    "coupling_schedule",
    "altmin_step",
    "altmin_solve",
    "wf_solve",
    "trace_to_csv",
    "TRACE_CSV_HEADER",
]


class SplitPoint(NamedTuple):
    x: np.ndarray
    y: np.ndarray


@dataclass(frozen=True)
class Schedules:
    """Step ramp and coupling decay controlling one solver run.

    step at round tau:      min(1 - e^{-tau/tau0}, mu_max), divided by
                            ||z0||^2 when step_scaling == "by_theta_squared"
    coupling at round tau:  lam0 * e^{-lam_decay * tau}
    """

    tau0: float
    mu_max: float
    lam0: float = 0.0
    lam_decay: float = 0.0
    step_scaling: str = "by_theta_squared"  # or "raw"

    def __post_init__(self):
        if self.tau0 <= 0 or self.mu_max <= 0:
            raise ValueError("tau0 and mu_max must be positive")
        if self.lam0 < 0 or self.lam_decay < 0:
            raise ValueError("lam0 and lam_decay must be nonnegative")
        if self.step_scaling not in ("by_theta_squared", "raw"):
            raise ValueError(f"unknown step_scaling {self.step_scaling!r}")


@dataclass(frozen=True)
class SolverConfig:
    max_rounds: int
    schedules: Schedules
    mode: str = "fixed_schedule"  # or "exact_linesearch"
    stop_tolerance: float | None = None  # None: always run the full budget
    seed: int = 0

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.mode not in ("fixed_schedule", "exact_linesearch"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.stop_tolerance is not None and self.stop_tolerance < 0:
            raise ValueError("stop_tolerance must be nonnegative")


@dataclass
class TraceRow:
    round: int
    tau: int
    E: float | None  # split objective (alternating runs)
    G: float | None  # quartic objective (flow runs)
    mu: float  # step size actually applied to the x (or flow) update
    lam: float
    rel_error: float | None


@dataclass
class SolveResult:
    x_final: np.ndarray
    y_final: np.ndarray
    z_final: np.ndarray  # (x + y) / 2, the reported estimate
    trace: list[TraceRow] = field(default_factory=list)
    converged: bool = False
    rounds_used: int = 0
    diverged: bool = False


def step_schedule(tau, tau0, mu_max):
    """Ramped step size min(1 - e^{-tau/tau0}, mu_max)."""
    return min(1.0 - np.exp(-tau / tau0), mu_max)


def coupling_schedule(tau, lam0, lam_decay):
    """Exponentially decaying proximity weight lam0 * e^{-lam_decay * tau}."""
    return lam0 * np.exp(-lam_decay * tau)


def _warn_if_rank_deficient(e):
    if e.maybe_rank_deficient:
        warnings.warn(
            f"frame has N={e.N} < d={e.d}; the split loss is not coercive "
            "for rank-deficient frames and the solver may not converge",
            stacklevel=3,
        )


def _step_scale(schedules, z0):
    if schedules.step_scaling == "by_theta_squared":
        return float(np.linalg.norm(z0) ** 2)
    return 1.0


def altmin_step(e, b, point, alpha, beta, lam):
    """One alternating round from ``point`` with explicit step sizes.

    The y-gradient is evaluated at the already-updated x.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("step sizes must be positive")
    x, y = np.asarray(point[0]), np.asarray(point[1])
    if x.shape != y.shape or x.shape[0] != e.d:
        raise ValueError("split point does not match the ensemble dimension")
    fy = forward(e, y)
    fx = forward(e, x)
    r = np.conj(fx) * fy - b
    gx = (2.0 / e.N) * adjoint(e, np.conj(r) * fy) + (2.0 * lam) * (x - y)
    x = x - alpha * gx
    fx = forward(e, x)
    r = np.conj(fx) * fy - b
    gy = (2.0 / e.N) * adjoint(e, r * fx) + (2.0 * lam) * (y - x)
    y = y - beta * gy
    return SplitPoint(x=x, y=y)


def _linesearch_step(sq_grad_norm, quad_form_value):
    # argmin of the exact one-block quadratic model; 0 at a critical point
    if sq_grad_norm == 0.0 or quad_form_value == 0.0:
        return 0.0
    return sq_grad_norm / (2.0 * quad_form_value)


def altmin_solve(e, b, z0, cfg, truth=None):
    """Run the alternating solver from x0 = y0 = z0.

    The trace records the split objective after every round (row 0 holds the
    starting point). A non-finite objective aborts the run with the
    ``diverged`` flag set instead of raising.
    """
    _warn_if_rank_deficient(e)
    z0 = np.asarray(z0)
    sched = cfg.schedules
    scale = _step_scale(sched, z0)
    x = z0.astype(complex if e.is_complex else float, copy=True)
    y = x.copy()
    fx = forward(e, x)
    fy = forward(e, y)

    def objective(lam):
        r = np.conj(fx) * fy - b
        val = float(np.sum(r.real**2 + r.imag**2)) / e.N
        return val + lam * float(np.linalg.norm(x - y) ** 2)

    def rel(z):
        return None if truth is None else relative_error(truth, z)

    lam1 = coupling_schedule(1, sched.lam0, sched.lam_decay)
    trace = [TraceRow(0, 0, objective(lam1), None, 0.0, lam1, rel(z0))]
    converged = False
    diverged = False
    rounds_used = 0

    # overflow here means divergence, which is reported via the flag
    with np.errstate(over="ignore", invalid="ignore"):
        for tau in range(1, cfg.max_rounds + 1):
            lam = coupling_schedule(tau, sched.lam0, sched.lam_decay)
            if cfg.mode == "fixed_schedule":
                # mu multiplies the Wirtinger derivative = gx / 2
                mu = step_schedule(tau, sched.tau0, sched.mu_max)
                alpha = beta = mu / (2.0 * scale)

            r = np.conj(fx) * fy - b
            gx = (2.0 / e.N) * adjoint(e, np.conj(r) * fy) + (2.0 * lam) * (x - y)
            if cfg.mode == "exact_linesearch":
                q = split_quad_form(e, y, gx, lam, f_anchor=fy)
                alpha = _linesearch_step(float(np.linalg.norm(gx) ** 2), q)
            x = x - alpha * gx
            fx = forward(e, x)

            r = np.conj(fx) * fy - b
            gy = (2.0 / e.N) * adjoint(e, r * fx) + (2.0 * lam) * (y - x)
            if cfg.mode == "exact_linesearch":
                q = split_quad_form(e, x, gy, lam, f_anchor=fx)
                beta = _linesearch_step(float(np.linalg.norm(gy) ** 2), q)
            y = y - beta * gy
            fy = forward(e, y)

            value = objective(lam)
            rounds_used = tau
            if not np.isfinite(value):
                diverged = True
                break
            err = rel((x + y) / 2.0)
            trace.append(TraceRow(tau, tau, value, None, alpha, lam, err))

            if cfg.stop_tolerance is not None:
                if truth is not None:
                    if err <= cfg.stop_tolerance:
                        converged = True
                        break
                elif max(np.linalg.norm(gx), np.linalg.norm(gy)) <= cfg.stop_tolerance:
                    converged = True
                    break

    return SolveResult(
        x_final=x,
        y_final=y,
        z_final=(x + y) / 2.0,
        trace=trace,
        converged=converged,
        rounds_used=rounds_used,
        diverged=diverged,
    )


def wf_solve(e, b, z0, cfg, truth=None):
    """Gradient flow on the quartic loss; ``cfg.max_rounds`` counts iterations.

    Matched-budget comparisons give the flow twice the alternating round
    count, since each alternating round performs two block updates.
    """
    _warn_if_rank_deficient(e)
    z0 = np.asarray(z0)
    sched = cfg.schedules
    scale = _step_scale(sched, z0)
    z = z0.astype(complex if e.is_complex else float, copy=True)
    fz = forward(e, z)

    def loss(fzv):
        r = fzv.real**2 + fzv.imag**2 - b
        return float(np.sum(r * r)) / e.N

    def rel(zv):
        return None if truth is None else relative_error(truth, zv)

    trace = [TraceRow(0, 0, None, loss(fz), 0.0, 0.0, rel(z0))]
    converged = False
    diverged = False
    rounds_used = 0

    # overflow here means divergence, which is reported via the flag
    with np.errstate(over="ignore", invalid="ignore"):
        for tau in range(1, cfg.max_rounds + 1):
            r = fz.real**2 + fz.imag**2 - b
            g = (4.0 / e.N) * adjoint(e, r * fz)
            if cfg.mode == "exact_linesearch":
                delta = 0.0
                sq = float(np.linalg.norm(g) ** 2)
                q = wf_quad_form(e, z, g, fz=fz)
                if sq > 0.0 and q > 0.0:
                    delta = sq / q
            else:
                # mu multiplies the reference-convention derivative = g / 4
                delta = step_schedule(tau, sched.tau0, sched.mu_max) / (4.0 * scale)
            z = z - delta * g
            fz = forward(e, z)

            value = loss(fz)
            rounds_used = tau
            if not np.isfinite(value):
                diverged = True
                break
            err = rel(z)
            trace.append(TraceRow(tau, tau, None, value, delta, 0.0, err))

            if cfg.stop_tolerance is not None:
                if truth is not None:
                    if err <= cfg.stop_tolerance:
                        converged = True
                        break
                elif np.linalg.norm(g) <= cfg.stop_tolerance:
                    converged = True
                    break

    return SolveResult(
        x_final=z,
        y_final=z,
        z_final=z,
        trace=trace,
        converged=converged,
        rounds_used=rounds_used,
        diverged=diverged,
    )


TRACE_CSV_HEADER = "round,tau,E,G,mu,lambda,rel_error"


def _fmt(value):
    if value is None:
        return ""
    return repr(float(value))


def trace_to_csv(result):
    """Serialize a solve trace; identical runs produce identical bytes."""
    lines = [TRACE_CSV_HEADER]
    for row in result.trace:
        lines.append(
            f"{row.round},{row.tau},{_fmt(row.E)},{_fmt(row.G)},"
            f"{_fmt(row.mu)},{_fmt(row.lam)},{_fmt(row.rel_error)}"
        )
    return "\n".join(lines) + "\n"
