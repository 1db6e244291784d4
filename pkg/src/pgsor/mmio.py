"""Matrix Market coordinate I/O for symmetric real matrices, plus plain vectors.

Written files always use the ``coordinate real symmetric`` header with the
lower triangle stored and 1-based indices.  Values are written with
``repr`` so a write/read round trip reproduces every float bit for bit.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sps

from .exceptions import InvalidInputError, MatrixMarketParseError
from .sparse import SparseMatrix

__all__ = ["mm_write", "mm_read", "write_vector", "read_vector"]

HEADER = "%%MatrixMarket matrix coordinate real symmetric"
_FIELDS = ("real", "integer", "double")
_SYMMETRIES = ("symmetric", "general")


def mm_write(A: SparseMatrix, path, comment: str | None = None) -> None:
    lower = sps.tril(A.csr, format="coo")
    order = np.lexsort((lower.row, lower.col))
    with open(path, "w") as fh:
        fh.write(HEADER + "\n")
        if comment:
            for line in comment.splitlines():
                fh.write(f"% {line}\n")
        fh.write(f"{A.n} {A.n} {lower.nnz}\n")
        for k in order:
            fh.write(f"{lower.row[k] + 1} {lower.col[k] + 1} {float(lower.data[k])!r}\n")


def mm_read(path) -> SparseMatrix:
    """Read a real square coordinate Matrix Market file.

    ``symmetric`` files are expanded from the stored triangle.  ``general``
    files are accepted only when the entries are exactly symmetric.

    Raises
    ------
    MatrixMarketParseError
        Bad header, size line or entry; the message carries the line number.
    InvalidInputError
        A ``general`` file whose entries are not symmetric.
    """
    name = os.fspath(path)
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MatrixMarketParseError("empty file", lineno=1, path=name)

    tokens = lines[0].split()
    if len(tokens) != 5 or tokens[0].lower() != "%%matrixmarket":
        raise MatrixMarketParseError("missing %%MatrixMarket banner", 1, name)
    obj, fmt, field, symmetry = (t.lower() for t in tokens[1:])
    if obj != "matrix" or fmt != "coordinate":
        raise MatrixMarketParseError(f"unsupported object/format '{obj} {fmt}'", 1, name)
    if field not in _FIELDS:
        raise MatrixMarketParseError(f"unsupported field '{field}'", 1, name)
    if symmetry not in _SYMMETRIES:
        raise MatrixMarketParseError(f"unsupported symmetry '{symmetry}'", 1, name)

    lineno = 1
    size = None
    for lineno in range(2, len(lines) + 1):
        text = lines[lineno - 1].strip()
        if text and not text.startswith("%"):
            size = text.split()
            break
    if size is None:
        raise MatrixMarketParseError("missing size line", lineno + 1, name)
    try:
        nrows, ncols, nnz = (int(t) for t in size)
    except ValueError:
        raise MatrixMarketParseError(f"bad size line '{text}'", lineno, name) from None
    if nrows != ncols or nrows < 1 or nnz < 0:
        raise MatrixMarketParseError(f"invalid size {nrows}x{ncols} nnz={nnz}", lineno, name)

    rows, cols, vals = [], [], []
    for k in range(lineno + 1, len(lines) + 1):
        text = lines[k - 1].strip()
        if not text or text.startswith("%"):
            continue
        parts = text.split()
        if len(parts) != 3:
            raise MatrixMarketParseError(f"expected 'i j value', got '{text}'", k, name)
        try:
            i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise MatrixMarketParseError(f"bad entry '{text}'", k, name) from None
        if not (1 <= i <= nrows and 1 <= j <= ncols):
            raise MatrixMarketParseError(f"index ({i}, {j}) out of range", k, name)
        if symmetry == "symmetric" and j > i:
            raise MatrixMarketParseError("upper-triangle entry in symmetric file", k, name)
        rows.append(i - 1)
        cols.append(j - 1)
        vals.append(v)
    if len(vals) != nnz:
        raise MatrixMarketParseError(
            f"header declares {nnz} entries, found {len(vals)}", len(lines), name
        )

    rows, cols, vals = np.array(rows, dtype=int), np.array(cols, dtype=int), np.array(vals)
    if symmetry == "symmetric":
        off = rows != cols
        rows, cols, vals = (
            np.concatenate([rows, cols[off]]),
            np.concatenate([cols, rows[off]]),
            np.concatenate([vals, vals[off]]),
        )
    mat = sps.coo_matrix((vals, (rows, cols)), shape=(nrows, ncols)).tocsr()
    try:
        return SparseMatrix(mat)
    except InvalidInputError as exc:
        raise InvalidInputError(f"{name}: {exc}") from None


def write_vector(v, path) -> None:
    """One value per line, full precision."""
    v = np.asarray(v, dtype=np.float64)
    with open(path, "w") as fh:
        for x in v:
            fh.write(f"{float(x)!r}\n")


def read_vector(path) -> np.ndarray:
    return np.loadtxt(path, dtype=np.float64, ndmin=1)
