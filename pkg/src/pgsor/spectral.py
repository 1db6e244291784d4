"""
Extreme eigenvalues of ``S = W^{-1} T`` and the parameter formulas built on them.

For ``W`` SPD and ``T`` symmetric positive semidefinite the eigenvalues of
``S`` are real and non-negative.  Everything the solvers need follows from
the two extremes ``mu_min`` and ``mu_max``:

* GSOR converges iff ``0 < alpha < 2/(1 + mu_max)`` and its optimum is
  ``alpha* = 2/(1 + sqrt(1 + mu_max**2))`` with convergence factor
  ``1 - alpha*``.
* Preconditioning with ``omega`` maps each eigenvalue ``mu`` of ``S`` to
  ``(omega*mu - 1)/(omega + mu)``; the ``omega`` that balances the two
  extreme images is optimal, and feeding the resulting radius ``xi`` into
  the GSOR formula gives the PGSOR optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateSpectrumError,
    InsufficientDataError,
    InvalidInputError,
    NotPositiveDefiniteError,
)
from .sparse import SparseMatrix, SpdFactorization, factorize_spd

__all__ = [
    "SpectralEstimate",
    "ParamChoice",
    "estimate_mu_max",
    "estimate_mu_min",
    "estimate_spectrum",
    "map_lambda",
    "branch_values",
    "rho_S_tilde",
    "gsor_optimal_alpha",
    "pgsor_optimal_params",
    "gsor_convergence_interval",
    "improvement_threshold",
    "approx_params",
    "iteration_radius",
    "observed_convergence_factor",
    "APPROX_ALPHA",
    "APPROX_OMEGA",
]

DEFAULT_MAX_ITERS = 200
DEFAULT_TOL = 1e-8
DEFAULT_SEED = 20240
_REDRAWS = 3

APPROX_ALPHA = 0.828
APPROX_OMEGA = 1.0


@dataclass(frozen=True)
class SpectralEstimate:
    """Extreme eigenvalues of ``S = W^{-1} T`` with run metadata.

    ``*_iterations`` is the number of power steps taken (0 when the value
    was fixed without iterating) and ``*_change`` the last relative change
    of the eigenvalue estimate.
    """

    mu_min: float
    mu_max: float
    mu_min_iterations: int = 0
    mu_max_iterations: int = 0
    mu_min_change: float = 0.0
    mu_max_change: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.mu_min <= self.mu_max):
            raise InvalidInputError(
                f"need 0 <= mu_min <= mu_max, got mu_min={self.mu_min}, mu_max={self.mu_max}"
            )

    @property
    def rho_S(self) -> float:
        return self.mu_max


@dataclass(frozen=True)
class ParamChoice:
    """Relaxation parameters and the spectral radius they predict.

    ``omega`` and ``xi`` are ``None`` for plain GSOR.
    """

    alpha: float
    predicted_rho: float
    omega: float | None = None
    xi: float | None = None


def _power(apply, inner_num, inner_den, n, max_iters, tol, seed):
    """Generalized power iteration on ``z <- apply(z)``.

    Returns ``(eigenvalue, iterations, last_relative_change)``.  The Rayleigh
    quotient ``inner_num(z)/inner_den(z)`` is taken in the inner product in
    which the operator is self-adjoint.
    """
    rng = np.random.default_rng(seed)
    for _ in range(_REDRAWS):
        z = rng.standard_normal(n)
        z /= np.linalg.norm(z)
        z = apply(z)
        nz = np.linalg.norm(z)
        if nz > 0.0 and np.isfinite(nz):
            break
    else:
        return 0.0, 0, 0.0
    z /= nz
    mu = inner_num(z) / inner_den(z)
    change = math.inf
    k = 1
    while k < max_iters:
        z = apply(z)
        nz = np.linalg.norm(z)
        if nz == 0.0:
            return 0.0, k, 0.0
        z /= nz
        k += 1
        new = inner_num(z) / inner_den(z)
        change = abs(new - mu) / abs(new) if new != 0.0 else abs(new - mu)
        mu = new
        if change <= tol:
            break
    return float(mu), k, float(change)


def estimate_mu_max(
    W: SparseMatrix,
    T: SparseMatrix,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    W_factor: SpdFactorization | None = None,
    full: bool = False,
):
    """Largest eigenvalue of ``W^{-1} T`` by the power method.

    The iterate is ``z <- W^{-1}(T z)``; the eigenvalue estimate is the
    Rayleigh quotient ``<Tz, z>/<Wz, z>``.  Stops once the relative change
    is at most ``tol`` or after ``max_iters`` steps.  With ``full=True``
    returns ``(mu, iterations, change)``.
    """
    F = W_factor if W_factor is not None else factorize_spd(W, name="W")
    if T.nnz == 0:
        result = (0.0, 0, 0.0)
    else:
        result = _power(
            lambda z: F.solve(T @ z),
            lambda z: z @ (T @ z),
            lambda z: z @ (W @ z),
            W.n,
            max_iters,
            tol,
            seed,
        )
        result = (max(result[0], 0.0),) + result[1:]
    return result if full else result[0]


def estimate_mu_min(
    W: SparseMatrix,
    T: SparseMatrix,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    assume_singular: bool = False,
    T_factor: SpdFactorization | None = None,
    full: bool = False,
):
    """Smallest eigenvalue of ``W^{-1} T`` by inverse power iteration.

    If ``T`` cannot be factorized as SPD it is taken to be singular
    semidefinite and 0 is returned, as it is when ``assume_singular`` is
    set.  Otherwise the power method runs on ``T^{-1} W`` whose dominant
    eigenvalue is ``1/mu_min``.
    """
    if assume_singular or T.nnz == 0:
        result = (0.0, 0, 0.0)
    else:
        try:
            F = T_factor if T_factor is not None else factorize_spd(T, name="T")
        except NotPositiveDefiniteError:
            result = (0.0, 0, 0.0)
        else:
            inv, k, change = _power(
                lambda z: F.solve(W @ z),
                lambda z: z @ (W @ z),
                lambda z: z @ (T @ z),
                W.n,
                max_iters,
                tol,
                seed,
            )
            result = (1.0 / inv if inv > 0.0 else 0.0, k, change)
    return result if full else result[0]


def estimate_spectrum(
    W: SparseMatrix,
    T: SparseMatrix,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    assume_singular: bool = False,
) -> SpectralEstimate:
    hi, k_hi, c_hi = estimate_mu_max(W, T, max_iters, tol, seed, full=True)
    lo, k_lo, c_lo = estimate_mu_min(
        W, T, max_iters, tol, seed, assume_singular=assume_singular, full=True
    )
    # Two independent iterations can cross when the spectrum is a single point.
    lo = min(lo, hi)
    return SpectralEstimate(lo, hi, k_lo, k_hi, c_lo, c_hi)


def map_lambda(omega: float, mu):
    """Image ``(omega*mu - 1)/(omega + mu)`` of an eigenvalue of ``S``."""
    return (omega * mu - 1.0) / (omega + mu)


def branch_values(omega: float, mu_min: float, mu_max: float) -> tuple[float, float]:
    """The decreasing and increasing branches whose maximum is ``rho(S_omega)``."""
    f1 = (1.0 - omega * mu_min) / (omega + mu_min)
    f2 = (omega * mu_max - 1.0) / (omega + mu_max)
    return f1, f2


def rho_S_tilde(omega: float, est: SpectralEstimate) -> float:
    """Spectral radius of ``(omega W + T)^{-1}(omega T - W)``."""
    return max(branch_values(omega, est.mu_min, est.mu_max))


def gsor_optimal_alpha(rho_S: float) -> ParamChoice:
    if rho_S < 0:
        raise InvalidInputError(f"rho(S) must be non-negative, got {rho_S}")
    alpha = 2.0 / (1.0 + math.sqrt(1.0 + rho_S * rho_S))
    return ParamChoice(alpha=alpha, predicted_rho=1.0 - alpha)


def pgsor_optimal_params(est: SpectralEstimate) -> ParamChoice:
    """Jointly optimal ``(alpha, omega)`` for preconditioned GSOR.

    Raises
    ------
    DegenerateSpectrumError
        If ``mu_min = mu_max = 0``; then ``T`` vanishes on the problem and
        GSOR with ``alpha = 1`` is already exact.
    """
    lo, hi = est.mu_min, est.mu_max
    if lo + hi == 0.0:
        raise DegenerateSpectrumError("mu_min = mu_max = 0: use GSOR with alpha = 1")
    root = math.sqrt((1.0 + lo * lo) * (1.0 + hi * hi))
    omega = (1.0 - lo * hi + root) / (lo + hi)
    xi = rho_S_tilde(omega, est)
    alpha = 2.0 / (1.0 + math.sqrt(1.0 + xi * xi))
    return ParamChoice(alpha=alpha, predicted_rho=1.0 - alpha, omega=omega, xi=xi)


def gsor_convergence_interval(mu_max: float) -> tuple[float, float]:
    """Open interval of ``alpha`` for which GSOR converges."""
    if mu_max < 0:
        raise InvalidInputError(f"mu_max must be non-negative, got {mu_max}")
    return (0.0, 2.0 / (1.0 + mu_max))


def improvement_threshold(est: SpectralEstimate) -> float:
    """Every ``omega`` above this value gives ``rho(S_omega) < rho(S)``."""
    lo, hi = est.mu_min, est.mu_max
    if lo + hi == 0.0:
        raise DegenerateSpectrumError("mu_min = mu_max = 0")
    return max(0.0, (1.0 - lo * hi) / (lo + hi))


def approx_params() -> ParamChoice:
    """Fixed near-optimal preset ``(alpha, omega) = (0.828, 1)``.

    With ``omega = 1`` every preconditioned eigenvalue lies in ``[-1, 1]``,
    so the GSOR optimum is at worst ``2/(1 + sqrt 2)``.
    """
    return ParamChoice(
        alpha=APPROX_ALPHA,
        predicted_rho=1.0 - APPROX_ALPHA,
        omega=APPROX_OMEGA,
        xi=1.0,
    )


def iteration_radius(alpha: float, rho: float) -> float:
    """Spectral radius of the GSOR iteration matrix for any ``alpha > 0``.

    Each eigenvalue ``mu`` of ``S`` (or of the preconditioned ``S``) gives
    the pair of iteration eigenvalues solving
    ``lam**2 + (2(alpha - 1) + alpha**2 mu**2) lam + (alpha - 1)**2 = 0``.
    Their largest modulus grows with ``|mu|``, so only ``rho`` matters.
    At the optimal ``alpha`` this reduces to ``1 - alpha``.
    """
    b = 2.0 * (alpha - 1.0) + alpha * alpha * rho * rho
    c = (alpha - 1.0) ** 2
    disc = b * b - 4.0 * c
    if disc <= 0.0:
        return abs(1.0 - alpha)
    return (abs(b) + math.sqrt(disc)) / 2.0


def observed_convergence_factor(report_or_history, window: int = 5) -> float:
    """Geometric mean of the last ``window`` residual reduction ratios.

    Accepts a :class:`~pgsor.solvers.SolverReport` (which must have
    converged) or a bare residual history.
    """
    history = getattr(report_or_history, "residual_history", report_or_history)
    converged = getattr(report_or_history, "converged", True)
    if not converged:
        raise InsufficientDataError("run did not converge")
    r = np.asarray(history, dtype=np.float64)
    if r.size < window + 1:
        raise InsufficientDataError(
            f"need at least {window + 1} residuals, got {r.size}"
        )
    tail = r[-(window + 1):]
    if np.any(tail <= 0.0):
        raise InsufficientDataError("zero residual in the averaging window")
    return float(np.exp(np.mean(np.log(tail[1:] / tail[:-1]))))
