import functools
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from pgsor import ProblemConfig, SparseMatrix, generate  # noqa: E402


@functools.lru_cache(maxsize=None)
def problem(example, m):
    return generate(ProblemConfig(example=example, m=m))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def dense_spd(rng, n, shift=1.0):
    M = rng.standard_normal((n, n))
    A = M.T @ M + shift * np.eye(n)
    return (A + A.T) / 2


def dense_psd(rng, n, rank=None):
    rank = n if rank is None else rank
    B = rng.standard_normal((rank, n))
    A = B.T @ B
    return (A + A.T) / 2


def sparse(a):
    return SparseMatrix(np.asarray(a, dtype=float))
