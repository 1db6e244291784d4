import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dense_psd, dense_spd, problem, sparse
from reference_values import GSOR_ALPHA, MHSS_ALPHA, PGSOR_ALPHA, PGSOR_OMEGA
from pgsor import (
    InvalidInputError,
    NotPositiveDefiniteError,
    PairVector,
    ProblemInstance,
    ScalingError,
    SolverSettings,
    ZeroRightHandSideError,
    complex_scale,
    estimate_spectrum,
    gsor_optimal_alpha,
    gsor_solve,
    identity,
    mhss_solve,
    observed_convergence_factor,
    pgsor_optimal_params,
    pgsor_solve,
    residual_norm,
)


def tiny_problem():
    return ProblemInstance(sparse([[2.0]]), sparse([[1.0]]), np.array([1.0]), np.array([0.0]))


def random_instance(seed, n=6, rank=None):
    r = np.random.default_rng(seed)
    return ProblemInstance(
        sparse(dense_spd(r, n)), sparse(dense_psd(r, n, rank)),
        r.standard_normal(n), r.standard_normal(n),
    )


def exact_solution(prob):
    u = np.linalg.solve(prob.complex_matrix().toarray(), prob.p + 1j * prob.q)
    return PairVector.from_complex(u)


class TestResidual:
    def test_exact(self):
        prob = problem(4, 4)
        assert residual_norm(prob, exact_solution(prob)) < 1e-12

    def test_zero_guess(self):
        prob = problem(1, 4)
        assert residual_norm(prob, PairVector.zeros(prob.n)) == 1.0

    def test_scalar(self):
        # r = (1 - 2, 0 - 1) = (-1, -1)
        assert residual_norm(tiny_problem(), PairVector([1.0], [0.0])) == pytest.approx(math.sqrt(2), abs=1e-15)

    def test_zero_rhs(self):
        prob = ProblemInstance(identity(2), identity(2), np.zeros(2), np.zeros(2))
        with pytest.raises(ZeroRightHandSideError):
            residual_norm(prob, PairVector.zeros(2))


class TestSettings:
    @pytest.mark.parametrize(
        "kwargs", [{"alpha": 0.0}, {"alpha": 1.0, "tol": 0.0}, {"alpha": 1.0, "max_iter": 0},
                   {"alpha": 1.0, "omega": -1.0}]
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidInputError):
            SolverSettings(**kwargs)

    def test_pgsor_requires_omega(self):
        with pytest.raises(InvalidInputError):
            pgsor_solve(tiny_problem(), SolverSettings(alpha=1.0))


class TestGsor:
    def test_example1_table_alpha(self):
        _, rep = gsor_solve(problem(1, 16), SolverSettings(alpha=0.550))
        assert rep.converged and rep.iterations == 19

    def test_T_zero_one_step(self):
        r = np.random.default_rng(3)
        W = sparse(dense_spd(r, 5))
        prob = ProblemInstance(W, sparse(np.zeros((5, 5))), r.standard_normal(5), r.standard_normal(5))
        u, rep = gsor_solve(prob, SolverSettings(alpha=1.0, tol=1e-12))
        assert rep.converged and rep.iterations == 1
        assert np.allclose(u.re, np.linalg.solve(W.toarray(), prob.p), atol=1e-13)

    def test_divergence_outside_interval(self):
        n = 4
        prob = ProblemInstance(identity(n), 3.0 * identity(n), np.ones(n), np.arange(n, dtype=float))
        # oracle: dense iteration matrix eigenvalues exceed 1 in modulus for alpha=0.6
        a = 0.6
        I, Z = np.eye(n), np.zeros((n, n))
        G = np.linalg.solve(np.block([[I, Z], [a * 3 * I, I]]), np.block([[(1 - a) * I, a * 3 * I], [Z, (1 - a) * I]]))
        assert np.max(np.abs(np.linalg.eigvals(G))) > 1
        _, rep = gsor_solve(prob, SolverSettings(alpha=a))
        assert not rep.converged and rep.diverged
        hist = np.array(rep.residual_history)
        assert hist[-1] > 1e12 and hist[-1] > hist[5]

    def test_history_shape(self):
        _, rep = gsor_solve(problem(3, 8), SolverSettings(alpha=0.9))
        assert len(rep.residual_history) == rep.iterations + 1
        assert rep.residual_history[0] == 1.0
        assert rep.final_residual < 1e-6
        assert all(r >= 1e-6 for r in rep.residual_history[:-1])

    def test_max_iter_cap(self):
        _, rep = gsor_solve(problem(1, 8), SolverSettings(alpha=0.5, max_iter=3))
        assert rep.iterations == 3 and not rep.converged and not rep.diverged

    def test_non_spd_W(self):
        prob = ProblemInstance(sparse([[1.0, 2.0], [2.0, 1.0]]), identity(2), np.ones(2), np.ones(2))
        with pytest.raises(NotPositiveDefiniteError):
            gsor_solve(prob, SolverSettings(alpha=0.5))

    def test_deterministic(self):
        prob = problem(2, 8)
        a = gsor_solve(prob, SolverSettings(alpha=0.45))[1].residual_history
        b = gsor_solve(prob, SolverSettings(alpha=0.45))[1].residual_history
        assert a == b


class TestPgsor:
    def test_example1(self):
        _, rep = pgsor_solve(problem(1, 16), SolverSettings(alpha=0.990, omega=0.657))
        assert rep.converged and rep.iterations == 4

    def test_example4_m32(self):
        _, rep = pgsor_solve(problem(4, 32), SolverSettings(alpha=0.970, omega=2.711))
        assert rep.converged and rep.iterations == 5

    def test_W_equals_T(self):
        r = np.random.default_rng(5)
        W = sparse(dense_spd(r, 4))
        prob = ProblemInstance(W, W, r.standard_normal(4), r.standard_normal(4))
        _, rep = pgsor_solve(prob, SolverSettings(alpha=1.0, omega=1.0, tol=1e-12))
        assert rep.converged and rep.iterations == 1


class TestMhss:
    def test_example1(self):
        _, rep = mhss_solve(problem(1, 16), SolverSettings(alpha=1.06))
        assert rep.converged and rep.iterations == 40

    def test_example2(self):
        _, rep = mhss_solve(problem(2, 16), SolverSettings(alpha=0.21))
        assert rep.converged and rep.iterations == 34

    def test_fixed_point(self):
        prob = problem(4, 6)
        u0 = exact_solution(prob)
        u, rep = mhss_solve(prob, SolverSettings(alpha=0.4, x0=u0))
        assert rep.converged and rep.iterations == 0
        # one explicit sweep keeps the fixed point
        u1, _ = mhss_solve(prob, SolverSettings(alpha=0.4, x0=u0, tol=1e-300, max_iter=1))
        assert np.allclose(u1.re, u0.re, atol=1e-12) and np.allclose(u1.im, u0.im, atol=1e-12)

    def test_matches_complex_arithmetic(self):
        # independent oracle: one MHSS step in complex arithmetic with dense solves
        prob = random_instance(9)
        W, T = prob.W.toarray(), prob.T.toarray()
        b = prob.p + 1j * prob.q
        a, n = 0.7, prob.n
        u = np.zeros(n, complex)
        for _ in range(3):
            uh = np.linalg.solve(a * np.eye(n) + W, (a * np.eye(n) - 1j * T) @ u + b)
            u = np.linalg.solve(a * np.eye(n) + T, (a * np.eye(n) + 1j * W) @ uh - 1j * b)
        got, _ = mhss_solve(prob, SolverSettings(alpha=a, tol=1e-300, max_iter=3))
        assert np.allclose(got.to_complex(), u, atol=1e-12)


class TestComplexScale:
    def test_identity(self):
        prob = problem(4, 4)
        s = complex_scale(prob, 1.0, 0.0)
        assert s.W == prob.W and s.T == prob.T
        assert np.array_equal(s.p, prob.p) and np.array_equal(s.q, prob.q)

    def test_pgsor_matrices(self):
        prob = problem(2, 4)
        w = 1.3
        s = complex_scale(prob, w, 1.0)
        assert s.W == w * prob.W + prob.T
        assert s.T == w * prob.T - prob.W
        assert np.array_equal(s.p, w * prob.p + prob.q)
        assert s.scaling == (w, 1.0)

    def test_multiply_by_i(self):
        # i (W + iT) = -T + iW; valid when -T is SPD
        r = np.random.default_rng(11)
        W, Tneg = dense_spd(r, 4), -dense_spd(r, 4)
        prob = ProblemInstance(sparse(W), sparse(Tneg), r.standard_normal(4), r.standard_normal(4))
        s = complex_scale(prob, 0.0, -1.0)
        A = s.W.toarray() + 1j * s.T.toarray()
        assert np.allclose(A, 1j * (W + 1j * Tneg), atol=0)
        assert np.allclose(s.p + 1j * s.q, 1j * (prob.p + 1j * prob.q), atol=0)

    def test_rejects_non_spd(self):
        with pytest.raises(ScalingError):
            complex_scale(problem(4, 4), 0.0, -1.0)

    def test_zero_scale(self):
        with pytest.raises(InvalidInputError):
            complex_scale(problem(4, 4), 0.0, 0.0)

    def test_same_solution(self):
        prob = random_instance(4)
        s = complex_scale(prob, 2.0, 0.5)
        assert np.allclose(exact_solution(s).to_complex(), exact_solution(prob).to_complex())


def _iterates(solver, prob, st_):
    seen = []
    solver(prob, st_, callback=lambda k, u: seen.append(np.concatenate([u.re, u.im])))
    return np.array(seen)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), omega=st.floats(0.2, 4.0), alpha=st.floats(0.3, 1.0))
def test_scaling_equivalence(seed, omega, alpha):
    prob = random_instance(seed, n=5)
    cfg = SolverSettings(alpha=alpha, omega=omega, tol=1e-300, max_iter=10)
    a = _iterates(pgsor_solve, prob, cfg)
    b = _iterates(gsor_solve, complex_scale(prob, omega, 1.0), cfg)
    assert a.shape == (10, 10)
    assert np.max(np.abs(a - b)) <= 1e-12


@pytest.mark.parametrize("mu", [0.5, 1.0, 3.0, 10.0])
@pytest.mark.parametrize("frac", [0.2, 0.5, 0.8, 0.95])
def test_convergence_boundary(mu, frac):
    n = 4
    prob = ProblemInstance(identity(n), mu * identity(n), np.ones(n), np.ones(n))
    upper = 2 / (1 + mu)
    _, inside = gsor_solve(prob, SolverSettings(alpha=frac * upper))
    assert inside.converged
    _, outside = gsor_solve(prob, SolverSettings(alpha=(2 - frac) * upper, max_iter=20000))
    assert not outside.converged


@pytest.mark.parametrize("example", [1, 2, 3, 4])
@pytest.mark.parametrize("m", [4, 8])
@pytest.mark.parametrize("method", ["gsor", "pgsor"])
def test_solution_accuracy(example, m, method):
    prob = problem(example, m)
    est = estimate_spectrum(prob.W, prob.T)
    if method == "gsor":
        u, rep = gsor_solve(prob, SolverSettings(alpha=gsor_optimal_alpha(est.mu_max).alpha))
    else:
        c = pgsor_optimal_params(est)
        u, rep = pgsor_solve(prob, SolverSettings(alpha=c.alpha, omega=c.omega))
    assert rep.converged
    assert residual_norm(prob, u) < 1e-6
    ref = exact_solution(prob).to_complex()
    assert np.linalg.norm(u.to_complex() - ref) / np.linalg.norm(ref) < 100 * 1e-6


@pytest.mark.parametrize("example,m", [(e, m) for e in (1, 2, 3, 4) for m in (16, 32)])
def test_residuals_monotone_after_transient(example, m):
    prob = problem(example, m)
    est = estimate_spectrum(prob.W, prob.T)
    runs = [gsor_solve(prob, SolverSettings(alpha=gsor_optimal_alpha(est.mu_max).alpha))[1]]
    c = pgsor_optimal_params(est)
    runs.append(pgsor_solve(prob, SolverSettings(alpha=c.alpha, omega=c.omega))[1])
    for rep in runs:
        h = np.array(rep.residual_history[3:])
        assert np.all(np.diff(h) <= 0), (rep.method, h)


def test_observed_factor_example1():
    prob = problem(1, 16)
    alpha = gsor_optimal_alpha(estimate_spectrum(prob.W, prob.T).mu_max).alpha
    _, rep = gsor_solve(prob, SolverSettings(alpha=alpha))
    assert observed_convergence_factor(rep) == pytest.approx(0.450, abs=0.05)


def test_reference_parameters_converge():
    for key in GSOR_ALPHA:
        prob = problem(*key)
        assert gsor_solve(prob, SolverSettings(alpha=GSOR_ALPHA[key]))[1].converged
        assert pgsor_solve(prob, SolverSettings(alpha=PGSOR_ALPHA[key], omega=PGSOR_OMEGA[key]))[1].converged
        assert mhss_solve(prob, SolverSettings(alpha=MHSS_ALPHA[key]))[1].converged
