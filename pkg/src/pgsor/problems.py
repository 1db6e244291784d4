"""
Finite-difference test problems for ``(W + iT) u = b``.

Four model problems on an ``m x m`` interior grid of the unit square with
``h = 1/(m+1)`` and ``n = m**2`` unknowns:

1. implicit time step of a parabolic problem (``tau`` defaults to ``h``),
2. damped structural dynamics, ``(-omega^2 M + K) + i(omega C_V + C_H)``,
3. Dirichlet Laplacian ``T`` against a periodic-type ``W``,
4. complex Helmholtz, ``(K + sigma1 I) + i sigma2 I``.

Problems 1, 2 and 4 are normalized by multiplying matrices and right-hand
side by ``h**2``; problem 3 is used as is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sps

from .exceptions import InvalidInputError, NotPositiveDefiniteError, ProblemGenerationError
from .sparse import (
    PairVector,
    SparseMatrix,
    add_rank_correction,
    factorize_spd,
    identity,
    kron_sum,
    tridiag,
)

__all__ = [
    "ProblemConfig",
    "ProblemInstance",
    "generate",
    "gen_example1",
    "gen_example2",
    "gen_example3",
    "gen_example4",
    "EXAMPLE_IDS",
]

EXAMPLE_IDS = (1, 2, 3, 4)


@dataclass(frozen=True)
class ProblemConfig:
    """Which problem to build and its scalars.

    ``tau=None`` means ``tau = h``.  Fields that do not apply to the chosen
    example are ignored by its generator.
    """

    example: int
    m: int
    tau: float | None = None
    omega_drive: float = math.pi
    mu_damp: float = 0.02
    sigma1: float = 100.0
    sigma2: float = 100.0

    def __post_init__(self):
        if self.example not in EXAMPLE_IDS:
            raise InvalidInputError(f"example id must be one of {EXAMPLE_IDS}, got {self.example}")
        min_m = 2 if self.example == 3 else 1
        if self.m < min_m:
            raise InvalidInputError(f"example {self.example} needs m >= {min_m}, got {self.m}")
        if self.tau is not None and not self.tau > 0:
            raise InvalidInputError(f"tau must be positive, got {self.tau}")
        if self.sigma1 < 0 or self.sigma2 < 0:
            raise InvalidInputError("sigma1 and sigma2 must be non-negative")

    @property
    def h(self) -> float:
        return 1.0 / (self.m + 1)

    @property
    def n(self) -> int:
        return self.m * self.m

    @property
    def tau_value(self) -> float:
        return self.h if self.tau is None else self.tau


@dataclass(frozen=True)
class ProblemInstance:
    """The complex system ``(W + iT)(x + iy) = p + iq``.

    ``scaling`` records a ``(beta, delta)`` pair when the instance was
    obtained by multiplying an original system through by ``beta - i delta``.
    """

    W: SparseMatrix
    T: SparseMatrix
    p: np.ndarray
    q: np.ndarray
    config: ProblemConfig | None = None
    scaling: tuple[float, float] = field(default=(1.0, 0.0))

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        q = np.asarray(self.q, dtype=np.float64)
        n = self.W.n
        if self.T.n != n or p.shape != (n,) or q.shape != (n,):
            raise InvalidInputError(
                f"inconsistent sizes: W {n}, T {self.T.n}, p {p.shape}, q {q.shape}"
            )
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def n(self) -> int:
        return self.W.n

    @property
    def rhs(self) -> PairVector:
        return PairVector(self.p, self.q)

    def block_matrix(self) -> sps.csr_matrix:
        """The real ``2n x 2n`` operator ``[[W, -T], [T, W]]``."""
        W, T = self.W.csr, self.T.csr
        return sps.bmat([[W, -T], [T, W]], format="csr")

    def complex_matrix(self) -> sps.csr_matrix:
        return (self.W.csr + 1j * self.T.csr).tocsr()


def _laplacian_2d(m: int, scale: float) -> SparseMatrix:
    return kron_sum(tridiag(m, scale))


def _rhs_from_ones(W: SparseMatrix, T: SparseMatrix) -> tuple[np.ndarray, np.ndarray]:
    # b = (1 + i)(W + iT) 1  =>  p = (W - T) 1, q = (W + T) 1
    w1 = W @ np.ones(W.n)
    t1 = T @ np.ones(T.n)
    return w1 - t1, w1 + t1


def _checked(W, T, p, q, config) -> ProblemInstance:
    try:
        factorize_spd(W, name="W")
    except NotPositiveDefiniteError as exc:
        raise ProblemGenerationError(
            f"example {config.example} with m={config.m}: W factorization failed: {exc}"
        ) from exc
    return ProblemInstance(W, T, p, q, config)


def gen_example1(m: int, tau: float | None = None) -> ProblemInstance:
    cfg = ProblemConfig(example=1, m=m, tau=tau)
    h, tau, n = cfg.h, cfg.tau_value, cfg.n
    K = _laplacian_2d(m, h ** -2)
    eye = identity(n)
    W = K + ((3.0 - math.sqrt(3.0)) / tau) * eye
    T = K + ((3.0 + math.sqrt(3.0)) / tau) * eye
    j = np.arange(1, n + 1, dtype=np.float64)
    p = j / (tau * (j + 1.0) ** 2)
    q = -p
    h2 = h * h
    return _checked(h2 * W, h2 * T, h2 * p, h2 * q, cfg)


def gen_example2(m: int, omega_drive: float = math.pi, mu_damp: float = 0.02) -> ProblemInstance:
    cfg = ProblemConfig(example=2, m=m, omega_drive=omega_drive, mu_damp=mu_damp)
    h2 = cfg.h ** 2
    K = _laplacian_2d(m, cfg.h ** -2)
    eye = identity(cfg.n)
    # M = I, C_V = 10 I, C_H = mu K
    W = h2 * (K - omega_drive ** 2 * eye)
    T = h2 * ((10.0 * omega_drive) * eye + mu_damp * K)
    return _checked(W, T, *_rhs_from_ones(W, T), cfg)


def gen_example3(m: int) -> ProblemInstance:
    cfg = ProblemConfig(example=3, m=m)
    V = tridiag(m, 1.0)
    T = kron_sum(V)
    last = m - 1
    Vc = add_rank_correction(V, [(0, last, -1.0), (last, 0, -1.0)])
    corner = sps.coo_matrix(([1.0, 1.0], ([0, last], [last, 0])), shape=(m, m))
    wrap = SparseMatrix(sps.kron(corner, sps.identity(m)), check=False)
    W = 10.0 * kron_sum(Vc) + 9.0 * wrap
    return _checked(W, T, *_rhs_from_ones(W, T), cfg)


def gen_example4(m: int, sigma1: float = 100.0, sigma2: float = 100.0) -> ProblemInstance:
    cfg = ProblemConfig(example=4, m=m, sigma1=sigma1, sigma2=sigma2)
    h2 = cfg.h ** 2
    K = _laplacian_2d(m, cfg.h ** -2)
    eye = identity(cfg.n)
    W = h2 * (K + sigma1 * eye)
    T = (h2 * sigma2) * eye
    return _checked(W, T, *_rhs_from_ones(W, T), cfg)


def generate(config: ProblemConfig) -> ProblemInstance:
    """Build the instance described by ``config``."""
    if config.example == 1:
        inst = gen_example1(config.m, config.tau)
    elif config.example == 2:
        inst = gen_example2(config.m, config.omega_drive, config.mu_damp)
    elif config.example == 3:
        inst = gen_example3(config.m)
    else:
        inst = gen_example4(config.m, config.sigma1, config.sigma2)
    return replace(inst, config=config)
