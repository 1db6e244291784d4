"""Stationary iterations for complex symmetric systems ``(W + iT) u = b``.

The system is handled in its real ``2 x 2`` block form.  Provided are the
GSOR iteration, its preconditioned variant PGSOR with closed-form optimal
``(alpha, omega)``, the MHSS iteration, power-method estimates of the
extreme eigenvalues of ``W^{-1} T`` and four finite-difference test
problems.
"""

from .exceptions import (
    DegenerateSpectrumError,
    DimensionMismatchError,
    InsufficientDataError,
    InvalidDimensionError,
    InvalidInputError,
    MatrixMarketParseError,
    NotPositiveDefiniteError,
    PgsorError,
    ProblemGenerationError,
    ScalingError,
    ZeroRightHandSideError,
)
from .mmio import mm_read, mm_write, read_vector, write_vector
from .problems import (
    ProblemConfig,
    ProblemInstance,
    gen_example1,
    gen_example2,
    gen_example3,
    gen_example4,
    generate,
)
from .solvers import (
    SolverReport,
    SolverSettings,
    complex_scale,
    gsor_solve,
    mhss_solve,
    pgsor_solve,
    residual_norm,
)
from .sparse import (
    PairVector,
    SparseMatrix,
    SpdFactorization,
    add_rank_correction,
    factorize_spd,
    identity,
    kron_sum,
    spd_solve,
    spmv,
    tridiag,
)
from .spectral import (
    ParamChoice,
    SpectralEstimate,
    approx_params,
    estimate_mu_max,
    estimate_mu_min,
    estimate_spectrum,
    gsor_convergence_interval,
    gsor_optimal_alpha,
    improvement_threshold,
    iteration_radius,
    map_lambda,
    observed_convergence_factor,
    pgsor_optimal_params,
    rho_S_tilde,
)

__version__ = "0.1.0"
