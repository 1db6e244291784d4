"""
Randomized property checks behind ``pgsor verify``.

Each property is checked against a dense eigensolver on small random
pairs (``W`` SPD, ``T`` symmetric positive semidefinite).  Trial ``k``
draws from ``default_rng([seed, k])`` so any single trial can be replayed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .problems import ProblemInstance, gen_example4
from .solvers import SolverSettings, complex_scale, gsor_solve, pgsor_solve
from .sparse import SparseMatrix
from .spectral import (
    SpectralEstimate,
    gsor_convergence_interval,
    map_lambda,
    pgsor_optimal_params,
)

ALPHA_LOWER = 2.0 / (1.0 + np.sqrt(2.0))
RHO_BOUND = (np.sqrt(2.0) - 1.0) / (np.sqrt(2.0) + 1.0)


@dataclass
class PropertyResult:
    name: str
    passed: int = 0
    total: int = 0
    values: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def record(self, ok: bool, value=None, note=None):
        self.total += 1
        self.passed += int(ok)
        self.values.append(value)
        if not ok:
            self.failures.append(note)


def random_pair(rng, n: int, singular: bool | None = None):
    """Dense SPD ``W`` and symmetric PSD ``T``; ``T`` is rank deficient when ``singular``."""
    M = rng.standard_normal((n, n))
    W = M.T @ M + 0.5 * np.eye(n)
    if singular is None:
        singular = bool(rng.integers(2))
    rank = int(rng.integers(1, n)) if singular and n > 1 else n
    B = rng.standard_normal((rank, n)) * rng.uniform(0.1, 3.0)
    T = B.T @ B
    # Exact symmetry is required by SparseMatrix.
    W = (W + W.T) / 2
    T = (T + T.T) / 2
    return W, T


def dense_mu(W, T):
    """Eigenvalues of ``W^{-1} T``, sorted, with round-off negatives clipped."""
    return np.clip(sla.eigh(T, W, eigvals_only=True), 0.0, None)


def dense_rho_tilde(W, T, omega):
    return float(np.max(np.abs(sla.eigvals(np.linalg.solve(omega * W + T, omega * T - W)))))


def check_eigen_map(seed: int, trials: int, omegas=(0.5, 1.0, 2.0), atol=1e-10) -> PropertyResult:
    res = PropertyResult("eigen-map")
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        n = int(rng.integers(2, 9))
        W, T = random_pair(rng, n)
        mu = dense_mu(W, T)
        worst = 0.0
        for omega in omegas:
            lam = np.sort(sla.eigvals(np.linalg.solve(omega * W + T, omega * T - W)).real)
            worst = max(worst, float(np.max(np.abs(lam - np.sort(map_lambda(omega, mu))))))
        res.record(worst <= atol, worst, f"trial {k}: deviation {worst:.3e}")
    return res


def check_optimal_bound(seed: int, trials: int) -> PropertyResult:
    res = PropertyResult("optimal-bound")
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        n = int(rng.integers(2, 9))
        W, T = random_pair(rng, n)
        mu = dense_mu(W, T)
        choice = pgsor_optimal_params(SpectralEstimate(float(mu[0]), float(mu[-1])))
        rho_dense = dense_rho_tilde(W, T, choice.omega)
        ok = (
            ALPHA_LOWER < choice.alpha <= 1.0
            and choice.predicted_rho < RHO_BOUND + 1e-12
            and rho_dense < 1.0
        )
        res.record(ok, (choice.alpha, choice.predicted_rho, rho_dense), f"trial {k}: {choice}")
    return res


def _sparse_instance(rng, n):
    W, T = random_pair(rng, n)
    return ProblemInstance(
        SparseMatrix(W), SparseMatrix(T), rng.standard_normal(n), rng.standard_normal(n)
    )


def _iterates(solve, prob, settings):
    seen = []
    solve(prob, settings, callback=lambda k, u: seen.append(np.concatenate([u.re, u.im])))
    return np.array(seen)


def scaling_equivalence(prob: ProblemInstance, omega: float, alpha: float, sweeps: int = 10) -> float:
    """Largest entrywise gap between PGSOR and GSOR on the ``(omega - i)``-scaled system."""
    settings = SolverSettings(alpha=alpha, omega=omega, tol=1e-300, max_iter=sweeps)
    a = _iterates(pgsor_solve, prob, settings)
    b = _iterates(gsor_solve, complex_scale(prob, omega, 1.0), settings)
    if a.shape != b.shape:
        return np.inf
    return float(np.max(np.abs(a - b)))


def check_scaling_equivalence(seed: int, trials: int, atol=1e-12) -> PropertyResult:
    res = PropertyResult("scaling-equivalence")
    gap = scaling_equivalence(gen_example4(8), omega=2.7, alpha=0.97)
    res.record(gap <= atol, gap, f"example 4: gap {gap:.3e}")
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        prob = _sparse_instance(rng, int(rng.integers(2, 9)))
        omega = float(rng.uniform(0.3, 3.0))
        alpha = float(rng.uniform(0.3, 1.0))
        gap = scaling_equivalence(prob, omega, alpha)
        res.record(gap <= atol, gap, f"trial {k}: gap {gap:.3e}")
    return res


def check_convergence_boundary(mus=(1.0, 3.0, 10.0), n=4) -> PropertyResult:
    res = PropertyResult("convergence-boundary")
    eye = SparseMatrix(np.eye(n))
    for mu in mus:
        prob = ProblemInstance(eye, mu * eye, np.ones(n), np.linspace(-1.0, 1.0, n))
        upper = gsor_convergence_interval(mu)[1]
        _, inside = gsor_solve(prob, SolverSettings(alpha=0.9 * upper))
        _, outside = gsor_solve(prob, SolverSettings(alpha=1.1 * upper))
        res.record(inside.converged, inside.iterations, f"mu={mu}: inside did not converge")
        res.record(
            not outside.converged and outside.diverged,
            outside.iterations,
            f"mu={mu}: outside was not flagged divergent",
        )
    return res


def run_all(seed: int, trials: int) -> list[PropertyResult]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    return [
        check_eigen_map(seed, trials),
        check_optimal_bound(seed, trials),
        check_scaling_equivalence(seed, min(trials, 20)),
        check_convergence_boundary(),
    ]
