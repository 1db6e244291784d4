"""
Symmetric sparse matrices, assembly kernels and SPD factorization.

All matrices built here are square, real and exactly symmetric.  Storage is
compressed-row (scipy CSR) kept in canonical form: sorted column indices,
no duplicates and no stored zeros.  A ``SparseMatrix`` is frozen after
construction, so it can be shared freely between solves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from .exceptions import (
    DimensionMismatchError,
    InvalidDimensionError,
    InvalidInputError,
    NotPositiveDefiniteError,
)

__all__ = [
    "SparseMatrix",
    "PairVector",
    "SpdFactorization",
    "identity",
    "tridiag",
    "kron_sum",
    "add_rank_correction",
    "spmv",
    "factorize_spd",
    "spd_solve",
]

PIVOT_RTOL = 1e-14


def _canonical(csr: sps.csr_matrix) -> sps.csr_matrix:
    csr = sps.csr_matrix(csr, dtype=np.float64, copy=True)
    csr.sum_duplicates()
    csr.eliminate_zeros()
    csr.sort_indices()
    csr.data.setflags(write=False)
    csr.indices.setflags(write=False)
    csr.indptr.setflags(write=False)
    return csr


def _is_exactly_symmetric(csr: sps.csr_matrix) -> bool:
    diff = csr - csr.T.tocsr()
    diff.eliminate_zeros()
    return diff.nnz == 0


class SparseMatrix:
    """Square, real, exactly symmetric sparse matrix in CSR form.

    Parameters
    ----------
    data : scipy sparse matrix, ndarray or SparseMatrix
        Source entries.  Anything scipy can turn into CSR is accepted.
    check : bool
        Verify exact symmetry (default).  Internal kernels that preserve
        symmetry by construction pass ``check=False``.

    Raises
    ------
    InvalidDimensionError
        The input is not square.
    InvalidInputError
        The input is not exactly symmetric or has non-finite entries.
    """

    __slots__ = ("_csr",)

    def __init__(self, data, check: bool = True):
        if isinstance(data, SparseMatrix):
            data = data._csr
        csr = _canonical(sps.csr_matrix(data))
        if csr.shape[0] != csr.shape[1]:
            raise InvalidDimensionError(f"matrix must be square, got shape {csr.shape}")
        if check:
            if not np.all(np.isfinite(csr.data)):
                raise InvalidInputError("matrix has non-finite entries")
            if not _is_exactly_symmetric(csr):
                raise InvalidInputError("matrix is not exactly symmetric")
        object.__setattr__(self, "_csr", csr)

    def __setattr__(self, name, value):
        raise AttributeError("SparseMatrix is immutable")

    @property
    def n(self) -> int:
        return self._csr.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self._csr.shape

    @property
    def nnz(self) -> int:
        return self._csr.nnz

    @property
    def csr(self) -> sps.csr_matrix:
        """The underlying read-only CSR matrix."""
        return self._csr

    def row(self, i: int) -> list[tuple[int, float]]:
        """Stored ``(column, value)`` pairs of row ``i``."""
        lo, hi = self._csr.indptr[i], self._csr.indptr[i + 1]
        return list(zip(self._csr.indices[lo:hi].tolist(), self._csr.data[lo:hi].tolist()))

    def diagonal(self) -> np.ndarray:
        return self._csr.diagonal()

    def toarray(self) -> np.ndarray:
        return self._csr.toarray()

    def norm_inf(self) -> float:
        if self.nnz == 0:
            return 0.0
        return float(abs(self._csr).sum(axis=1).max())

    def __matmul__(self, v):
        return spmv(self, v)

    # Linear combinations of symmetric matrices stay symmetric, so no re-check.
    def __add__(self, other: SparseMatrix) -> SparseMatrix:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        _check_same_n(self, other)
        return SparseMatrix(self._csr + other._csr, check=False)

    def __sub__(self, other: SparseMatrix) -> SparseMatrix:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        _check_same_n(self, other)
        return SparseMatrix(self._csr - other._csr, check=False)

    def __mul__(self, scalar) -> SparseMatrix:
        if not np.isscalar(scalar):
            return NotImplemented
        return SparseMatrix(self._csr * float(scalar), check=False)

    __rmul__ = __mul__

    def __neg__(self) -> SparseMatrix:
        return self * -1.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        a, b = self._csr, other._csr
        return (
            a.shape == b.shape
            and np.array_equal(a.indptr, b.indptr)
            and np.array_equal(a.indices, b.indices)
            and np.array_equal(a.data, b.data)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"SparseMatrix(n={self.n}, nnz={self.nnz})"


def _check_same_n(a: SparseMatrix, b: SparseMatrix) -> None:
    if a.n != b.n:
        raise DimensionMismatchError(f"dimension mismatch: {a.n} vs {b.n}")


@dataclass(frozen=True)
class PairVector:
    """Real and imaginary parts of a complex vector ``re + 1j*im``."""

    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        re = np.asarray(self.re, dtype=np.float64)
        im = np.asarray(self.im, dtype=np.float64)
        if re.ndim != 1 or im.ndim != 1:
            raise InvalidDimensionError("PairVector parts must be 1-D")
        if re.shape != im.shape:
            raise DimensionMismatchError(
                f"real part has length {re.size}, imaginary part {im.size}"
            )
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @classmethod
    def zeros(cls, n: int) -> PairVector:
        return cls(np.zeros(n), np.zeros(n))

    @classmethod
    def from_complex(cls, z) -> PairVector:
        z = np.asarray(z, dtype=np.complex128)
        return cls(z.real.copy(), z.imag.copy())

    def __len__(self) -> int:
        return self.re.size

    def to_complex(self) -> np.ndarray:
        return self.re + 1j * self.im

    def norm(self) -> float:
        return float(np.sqrt(self.re @ self.re + self.im @ self.im))


def identity(n: int) -> SparseMatrix:
    if n < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {n}")
    return SparseMatrix(sps.identity(n, format="csr"), check=False)


def tridiag(m: int, scale: float = 1.0) -> SparseMatrix:
    """``scale * tridiag(-1, 2, -1)`` of size ``m x m``."""
    if m < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {m}")
    if not scale > 0:
        raise InvalidInputError(f"scale must be positive, got {scale}")
    off = np.full(m - 1, -scale)
    mat = sps.diags([off, np.full(m, 2.0 * scale), off], [-1, 0, 1], format="csr")
    return SparseMatrix(mat, check=False)


def kron_sum(V: SparseMatrix) -> SparseMatrix:
    """Kronecker sum ``I (x) V + V (x) I``.

    The eigenvalues of the result are all pairwise sums of eigenvalues of
    ``V``; with ``V`` a scaled 1-D Dirichlet Laplacian this is the
    five-point stencil on an ``m x m`` grid.
    """
    eye = sps.identity(V.n, format="csr")
    return SparseMatrix(sps.kron(eye, V.csr) + sps.kron(V.csr, eye), check=False)


def add_rank_correction(A: SparseMatrix, pairs: Iterable[Sequence]) -> SparseMatrix:
    """Add individual entries ``(i, j, value)`` to ``A``.

    The caller supplies both halves of every off-diagonal update; a list
    whose accumulated updates are not symmetric is rejected.
    """
    pairs = list(pairs)
    if not pairs:
        return A
    rows, cols, vals = [], [], []
    for entry in pairs:
        i, j, v = entry
        if not (0 <= i < A.n and 0 <= j < A.n):
            raise InvalidInputError(f"index ({i}, {j}) out of range for n={A.n}")
        rows.append(int(i))
        cols.append(int(j))
        vals.append(float(v))
    upd = sps.coo_matrix((vals, (rows, cols)), shape=A.shape).tocsr()
    upd.sum_duplicates()
    if not _is_exactly_symmetric(upd):
        raise InvalidInputError("rank correction is not symmetric")
    return SparseMatrix(A.csr + upd, check=False)


def spmv(A: SparseMatrix, v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (A.n,):
        raise DimensionMismatchError(f"vector of shape {v.shape} for matrix of order {A.n}")
    return A.csr @ v


class SpdFactorization:
    """Sparse symmetric factorization ``P A P^T = L D L^T`` of an SPD matrix.

    Backed by SuperLU run in symmetric mode: a symmetric minimum-degree
    column ordering, diagonal pivots only.  If SuperLU is forced off the
    diagonal (``perm_r != perm_c``) or any pivot is below
    ``PIVOT_RTOL * ||A||_inf`` the matrix is rejected as not positive
    definite.  Construct via :func:`factorize_spd`.
    """

    def __init__(self, A: SparseMatrix, name: str = "matrix"):
        self.matrix = A
        self.name = name
        scale = A.norm_inf()
        if scale == 0.0:
            raise NotPositiveDefiniteError(f"{name} is the zero matrix")
        try:
            lu = spla.splu(
                A.csr.tocsc(),
                permc_spec="MMD_AT_PLUS_A",
                diag_pivot_thresh=0.0,
                options={"SymmetricMode": True},
            )
        except RuntimeError as exc:  # exactly singular
            raise NotPositiveDefiniteError(f"{name} is singular: {exc}") from None
        if not np.array_equal(lu.perm_r, lu.perm_c):
            raise NotPositiveDefiniteError(f"{name} required off-diagonal pivoting")
        pivots = lu.U.diagonal()
        smallest = float(pivots.min())
        if not smallest > PIVOT_RTOL * scale:
            raise NotPositiveDefiniteError(
                f"{name} is not positive definite (pivot {smallest:.3e}, "
                f"norm {scale:.3e})"
            )
        self._lu = lu
        self.min_pivot = smallest

    @property
    def n(self) -> int:
        return self.matrix.n

    def solve(self, r) -> np.ndarray:
        return spd_solve(self, r)

    def __repr__(self):
        return f"SpdFactorization({self.name}, n={self.n})"


def factorize_spd(A: SparseMatrix, name: str = "matrix") -> SpdFactorization:
    return SpdFactorization(A, name=name)


def spd_solve(F: SpdFactorization, r) -> np.ndarray:
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (F.n,):
        raise DimensionMismatchError(f"right-hand side of shape {r.shape} for order {F.n}")
    return F._lu.solve(r)
