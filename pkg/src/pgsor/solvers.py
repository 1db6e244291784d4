"""
GSOR, preconditioned GSOR and MHSS iterations for ``(W + iT) u = b``.

All three work in real arithmetic on the pair ``u = x + iy``.  Every
sub-system solve reuses one sparse SPD factorization built before the
first sweep.  The stopping test is the relative residual of the original
complex system, evaluated once per full sweep::

    ||b - A u_k||_2 / ||b||_2 < tol
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    InvalidInputError,
    NotPositiveDefiniteError,
    ScalingError,
    ZeroRightHandSideError,
)
from .problems import ProblemInstance
from .sparse import PairVector, SparseMatrix, factorize_spd, identity

__all__ = [
    "SolverSettings",
    "SolverReport",
    "residual_norm",
    "gsor_solve",
    "pgsor_solve",
    "mhss_solve",
    "complex_scale",
    "DIVERGENCE_LIMIT",
]

DIVERGENCE_LIMIT = 1e12

Callback = Callable[[int, PairVector], None]


@dataclass(frozen=True)
class SolverSettings:
    alpha: float
    omega: float | None = None
    tol: float = 1e-6
    max_iter: int = 10000
    x0: PairVector | None = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidInputError(f"alpha must be positive, got {self.alpha}")
        if self.omega is not None and not self.omega > 0:
            raise InvalidInputError(f"omega must be positive, got {self.omega}")
        if not self.tol > 0:
            raise InvalidInputError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise InvalidInputError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass
class SolverReport:
    """Outcome of one outer iteration.

    ``residual_history[k]`` is the relative residual after ``k`` sweeps, so
    it holds ``iterations + 1`` entries.  ``diverged`` is set when the
    residual exceeded ``DIVERGENCE_LIMIT`` or became non-finite.
    """

    method: str
    converged: bool
    iterations: int
    residual_history: list[float]
    settings: SolverSettings
    wall_time: float = 0.0
    diverged: bool = False

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1]


def _residual(W, T, p, q, bnorm, x, y) -> float:
    r_re = p - (W @ x - T @ y)
    r_im = q - (T @ x + W @ y)
    return math.sqrt(r_re @ r_re + r_im @ r_im) / bnorm


def _rhs_norm(prob: ProblemInstance) -> float:
    bnorm = prob.rhs.norm()
    if bnorm == 0.0:
        raise ZeroRightHandSideError("right-hand side is zero")
    return bnorm


def residual_norm(prob: ProblemInstance, u: PairVector) -> float:
    """Relative residual ``||b - (W + iT) u|| / ||b||`` of the complex system."""
    if len(u) != prob.n:
        raise DimensionMismatchError(f"vector of length {len(u)} for problem of size {prob.n}")
    return _residual(prob.W, prob.T, prob.p, prob.q, _rhs_norm(prob), u.re, u.im)


def _initial(prob: ProblemInstance, settings: SolverSettings):
    if settings.x0 is None:
        return np.zeros(prob.n), np.zeros(prob.n)
    if len(settings.x0) != prob.n:
        raise DimensionMismatchError(
            f"initial guess of length {len(settings.x0)} for problem of size {prob.n}"
        )
    return settings.x0.re.copy(), settings.x0.im.copy()


def _run(method, prob, settings, x, y, sweep, callback) -> tuple[PairVector, SolverReport]:
    """Drive ``sweep`` until the original-system residual drops below tol."""
    start = time.perf_counter()
    W, T, p, q = prob.W, prob.T, prob.p, prob.q
    bnorm = _rhs_norm(prob)
    history = [_residual(W, T, p, q, bnorm, x, y)]
    converged = history[0] < settings.tol
    diverged = False
    k = 0
    while not converged and k < settings.max_iter:
        x, y = sweep(x, y)
        k += 1
        if callback is not None:
            callback(k, PairVector(x, y))
        res = _residual(W, T, p, q, bnorm, x, y)
        history.append(res)
        if not math.isfinite(res) or res > DIVERGENCE_LIMIT:
            diverged = True
            break
        converged = res < settings.tol
    report = SolverReport(
        method=method,
        converged=converged,
        iterations=k,
        residual_history=history,
        settings=settings,
        wall_time=time.perf_counter() - start,
        diverged=diverged,
    )
    return PairVector(x, y), report


def _gsor_sweep(W: SparseMatrix, T: SparseMatrix, p, q, alpha: float, F):
    beta = 1.0 - alpha
    ap, aq = alpha * p, alpha * q

    def sweep(x, y):
        x = F.solve(beta * (W @ x) + alpha * (T @ y) + ap)
        y = F.solve(-alpha * (T @ x) + beta * (W @ y) + aq)
        return x, y

    return sweep


def gsor_solve(
    prob: ProblemInstance, settings: SolverSettings, callback: Callback | None = None
) -> tuple[PairVector, SolverReport]:
    """Solve with GSOR on the real block form ``[[W, -T], [T, W]]``.

    Each sweep does::

        W x+ = (1 - alpha) W x + alpha T y  + alpha p
        W y+ = -alpha T x+ + (1 - alpha) W y + alpha q

    ``callback(k, u)`` is called after every sweep.
    """
    F = factorize_spd(prob.W, name="W")
    x, y = _initial(prob, settings)
    sweep = _gsor_sweep(prob.W, prob.T, prob.p, prob.q, settings.alpha, F)
    return _run("gsor", prob, settings, x, y, sweep, callback)


def pgsor_solve(
    prob: ProblemInstance, settings: SolverSettings, callback: Callback | None = None
) -> tuple[PairVector, SolverReport]:
    """GSOR on the system left-multiplied by ``[[omega I, I], [-I, omega I]]``.

    The sweeps use ``omega W + T`` and ``omega T - W`` with right-hand side
    ``(omega p + q, omega q - p)``; convergence is still judged on the
    original system.
    """
    omega = settings.omega
    if omega is None:
        raise InvalidInputError("PGSOR needs omega")
    W_t = omega * prob.W + prob.T
    T_t = omega * prob.T - prob.W
    p_t = omega * prob.p + prob.q
    q_t = omega * prob.q - prob.p
    F = factorize_spd(W_t, name="omega*W + T")
    x, y = _initial(prob, settings)
    sweep = _gsor_sweep(W_t, T_t, p_t, q_t, settings.alpha, F)
    return _run("pgsor", prob, settings, x, y, sweep, callback)


def mhss_solve(
    prob: ProblemInstance, settings: SolverSettings, callback: Callback | None = None
) -> tuple[PairVector, SolverReport]:
    """Modified HSS iteration.

    The two half-steps::

        (alpha I + W) u_half = (alpha I - iT) u + b
        (alpha I + T) u_next = (alpha I + iW) u_half - i b

    have real coefficient matrices, so each is two real SPD solves, one for
    the real and one for the imaginary part.
    """
    a = settings.alpha
    eye = identity(prob.n)
    FW = factorize_spd(a * eye + prob.W, name="alpha*I + W")
    FT = factorize_spd(a * eye + prob.T, name="alpha*I + T")
    W, T, p, q = prob.W, prob.T, prob.p, prob.q

    def sweep(x, y):
        xh = FW.solve(a * x + T @ y + p)
        yh = FW.solve(a * y - T @ x + q)
        x = FT.solve(a * xh - W @ yh + q)
        y = FT.solve(a * yh + W @ xh - p)
        return x, y

    x, y = _initial(prob, settings)
    return _run("mhss", prob, settings, x, y, sweep, callback)


def complex_scale(prob: ProblemInstance, beta: float, delta: float) -> ProblemInstance:
    """Multiply the complex system through by ``beta - i*delta``.

    Returns ``(beta W + delta T) + i(beta T - delta W)`` with right-hand side
    ``(beta p + delta q) + i(beta q - delta p)``.  With ``(omega, 1)`` this
    gives exactly the matrices of preconditioned GSOR.

    Raises
    ------
    ScalingError
        If the new real part is not SPD.
    """
    if beta == 0 and delta == 0:
        raise InvalidInputError("beta and delta cannot both be zero")
    W_s = beta * prob.W + delta * prob.T
    T_s = beta * prob.T - delta * prob.W
    try:
        factorize_spd(W_s, name="beta*W + delta*T")
    except NotPositiveDefiniteError as exc:
        raise ScalingError(f"scaling ({beta}, {delta}) gives a non-SPD real part: {exc}") from exc
    b0, d0 = prob.scaling
    # (beta - i delta)(b0 - i d0) = (beta b0 - delta d0) - i(beta d0 + delta b0)
    composed = (beta * b0 - delta * d0, beta * d0 + delta * b0)
    return replace(
        prob,
        W=W_s,
        T=T_s,
        p=beta * prob.p + delta * prob.q,
        q=beta * prob.q - delta * prob.p,
        scaling=composed,
    )
