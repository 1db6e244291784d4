import math

import numpy as np
import pytest
import scipy.linalg as sla

from conftest import problem
from pgsor import (
    InvalidInputError,
    ProblemConfig,
    ProblemGenerationError,
    factorize_spd,
    gen_example1,
    gen_example2,
    gen_example3,
    gen_example4,
    generate,
)


def dense_laplacian(m, scale=1.0):
    V = scale * (2 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1))
    return np.kron(np.eye(m), V) + np.kron(V, np.eye(m))


def dense_example(example, m):
    """Independent dense assembly straight from the problem statements."""
    h = 1.0 / (m + 1)
    n = m * m
    eye = np.eye(n)
    if example == 1:
        K = dense_laplacian(m, h ** -2)
        tau = h
        W = K + (3 - math.sqrt(3)) / tau * eye
        T = K + (3 + math.sqrt(3)) / tau * eye
        j = np.arange(1, n + 1)
        b = (1 - 1j) * j / (tau * (j + 1) ** 2)
        return h * h * W, h * h * T, h * h * b
    if example == 2:
        K = dense_laplacian(m, h ** -2)
        A = (-math.pi ** 2 * eye + K) + 1j * (10 * math.pi * eye + 0.02 * K)
        b = (1 + 1j) * A @ np.ones(n)
        return h * h * A.real, h * h * A.imag, h * h * b
    if example == 3:
        V = 2 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)
        E = np.zeros((m, m))
        E[0, m - 1] = E[m - 1, 0] = 1.0
        Vc = V - E
        T = np.kron(np.eye(m), V) + np.kron(V, np.eye(m))
        W = 10 * (np.kron(np.eye(m), Vc) + np.kron(Vc, np.eye(m))) + 9 * np.kron(E, np.eye(m))
        return W, T, (1 + 1j) * (W + 1j * T) @ np.ones(n)
    K = dense_laplacian(m, h ** -2)
    A = (K + 100 * eye) + 1j * 100 * eye
    b = (1 + 1j) * A @ np.ones(n)
    return h * h * A.real, h * h * A.imag, h * h * b


@pytest.mark.parametrize("example", [1, 2, 3, 4])
@pytest.mark.parametrize("m", [2, 3, 5])
def test_matches_dense_assembly(example, m):
    prob = generate(ProblemConfig(example=example, m=m))
    W, T, b = dense_example(example, m)
    assert np.allclose(prob.W.toarray(), W, rtol=1e-14, atol=1e-14)
    assert np.allclose(prob.T.toarray(), T, rtol=1e-14, atol=1e-14)
    assert np.allclose(prob.p, b.real, rtol=1e-13, atol=1e-14)
    assert np.allclose(prob.q, b.imag, rtol=1e-13, atol=1e-14)
    assert prob.n == m * m


@pytest.mark.parametrize("example", [1, 2, 3, 4])
@pytest.mark.parametrize("m", [4, 16])
def test_instance_invariants(example, m):
    prob = problem(example, m)
    for A in (prob.W, prob.T):
        assert (abs(A.csr - A.csr.T)).nnz == 0
    factorize_spd(prob.W)
    if example in (1, 4):
        factorize_spd(prob.T)
    if example != 1:
        one = np.ones(prob.n)
        assert np.allclose(prob.p, prob.W @ one - prob.T @ one, rtol=0, atol=1e-14 * np.abs(prob.p).max())
        assert np.allclose(prob.q, prob.W @ one + prob.T @ one, rtol=0, atol=1e-14 * np.abs(prob.q).max())


def test_example1_entry():
    prob = gen_example1(2, tau=1 / 3)
    # h = 1/3: h^2 * 4 h^-2 + h^2 * (3 - sqrt 3)/tau
    assert prob.W.toarray()[0, 0] == pytest.approx(4 + (3 - math.sqrt(3)) / 3, abs=1e-14)
    assert prob.W.toarray()[0, 0] == pytest.approx(4.4226, abs=1e-4)


def test_example1_rhs_structure():
    prob = gen_example1(5)
    assert np.array_equal(prob.q, -prob.p)
    assert np.all(prob.p > 0)


def test_example1_shift_identity():
    prob = gen_example1(6)
    h, tau = 1 / 7, 1 / 7
    D = (prob.T - prob.W).csr
    off = D - np.diag(D.diagonal())
    assert np.count_nonzero(off) == 0
    assert np.allclose(D.diagonal(), 2 * math.sqrt(3) / tau * h * h, rtol=1e-12)


def test_example2_identities():
    prob = gen_example2(5)
    one = np.ones(prob.n)
    assert np.allclose(prob.p + prob.q, 2 * (prob.W @ one), rtol=1e-14, atol=1e-15)
    assert np.allclose(prob.q - prob.p, 2 * (prob.T @ one), rtol=1e-14, atol=1e-15)


def test_example2_diagonal():
    prob = gen_example2(2)
    h = 1 / 3
    assert prob.W.diagonal()[0] == pytest.approx(4 - math.pi ** 2 * h * h, abs=1e-14)


def test_example2_indefinite_W_reported():
    # large driving frequency pushes -omega^2 I + K indefinite
    with pytest.raises(ProblemGenerationError, match="W factorization"):
        gen_example2(4, omega_drive=20.0)


def test_example3_corners():
    prob = gen_example3(3)
    W = prob.W.toarray()
    m = 3
    # block (1, m): 10 * (Vc corner -1) + 9 = -1 on the identity pattern
    for i in range(m):
        assert W[i, (m - 1) * m + i] == -1.0
        assert W[(m - 1) * m + i, i] == -1.0
    # within-block periodic corner of I (x) Vc: 10 * -1
    assert W[0, m - 1] == -10.0
    factorize_spd(prob.T)


def test_example3_needs_m2():
    with pytest.raises(InvalidInputError):
        gen_example3(1)
    gen_example3(2)


def test_example4_spectrum_closed_form():
    m = 6
    prob = gen_example4(m)
    h = 1 / (m + 1)
    lam_min = 2 * h ** -2 * (2 - 2 * math.cos(math.pi * h))
    mu = sla.eigh(prob.T.toarray(), prob.W.toarray(), eigvals_only=True)
    assert mu.max() == pytest.approx(100 / (100 + lam_min), rel=1e-12)
    assert mu.min() > 0


def test_deterministic():
    a, b = gen_example3(5), gen_example3(5)
    assert a.W == b.W and a.T == b.T
    assert np.array_equal(a.p, b.p)


def test_config_validation():
    with pytest.raises(InvalidInputError):
        ProblemConfig(example=5, m=4)
    with pytest.raises(InvalidInputError):
        ProblemConfig(example=1, m=0)
    with pytest.raises(InvalidInputError):
        ProblemConfig(example=1, m=4, tau=-1.0)
    assert ProblemConfig(example=1, m=9).h == 0.1


def test_block_matrix_solves_complex_system():
    prob = gen_example4(4)
    A = prob.complex_matrix().toarray()
    u = np.linalg.solve(A, prob.p + 1j * prob.q)
    xy = np.linalg.solve(prob.block_matrix().toarray(), np.concatenate([prob.p, prob.q]))
    assert np.allclose(xy[: prob.n], u.real) and np.allclose(xy[prob.n:], u.imag)
    # b = (1 + i) A 1  =>  u = (1 + i) 1
    assert np.allclose(u, (1 + 1j) * np.ones(prob.n))
