import re

import numpy as np
import pytest

from optval_tools import errors, leastnorm, linalg

from ..basedata import BaseData, random_ln_instance


def test_wrong_types():
    bd = BaseData()

    with pytest.raises(ValueError, match=re.escape('`p` must be of type LeastNormProblem.')):
        leastnorm.solve_least_norm((bd.ln_A1, bd.ln_b1))
    with pytest.raises(ValueError, match=re.escape('`phase1` must be of type PhaseSolution.')):
        leastnorm.predict_delta_f(None, bd.ln_A2, bd.ln_b2)
    with pytest.raises(ValueError, match=re.escape('`p1` must be of type LeastNormProblem.')):
        leastnorm.solve_stacked(None, bd.ln_A2, bd.ln_b2)

    # Shapes
    # ************************************
    with pytest.raises(
        errors.DimensionMismatch, match=re.escape('`A` has 1 rows but `b` has 2 entries.')
    ):
        leastnorm.LeastNormProblem(A=bd.ln_A1, b=[1.0, 2.0])
    phase1 = leastnorm.solve_least_norm(leastnorm.LeastNormProblem(A=bd.ln_A1, b=bd.ln_b1))
    with pytest.raises(errors.DimensionMismatch, match=re.escape('`A2` must have 2 columns')):
        leastnorm.predict_delta_f(phase1, np.ones((1, 3)), [1.0])
    with pytest.raises(errors.DimensionMismatch, match=re.escape('`A2` has 1 rows')):
        leastnorm.predict_delta_f(phase1, bd.ln_A2, [1.0, 2.0])


def test_small_example():
    bd = BaseData()
    p1 = leastnorm.LeastNormProblem(A=bd.ln_A1, b=bd.ln_b1)
    phase1 = leastnorm.solve_least_norm(p1)
    np.testing.assert_allclose(phase1.x_star, [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(phase1.cov, [[0.0, 0.0], [0.0, 1.0]], atol=1e-15)
    assert phase1.f_star == pytest.approx(1.0, abs=1e-15)

    delta_f = leastnorm.predict_delta_f(phase1, bd.ln_A2, bd.ln_b2)
    assert delta_f == pytest.approx(4.0, rel=1e-14)
    phase2 = leastnorm.solve_stacked(p1, bd.ln_A2, bd.ln_b2)
    assert phase2.f_star == pytest.approx(phase1.f_star + delta_f, rel=1e-14)


def test_no_constraints():
    p = leastnorm.LeastNormProblem(A=np.zeros((0, 3)), b=np.zeros(0))
    sol = leastnorm.solve_least_norm(p)
    assert np.array_equal(sol.x_star, np.zeros(3))
    assert np.array_equal(sol.cov, np.eye(3))
    assert sol.f_star == 0.0

    # Predicting with no new rows changes nothing
    # ************************************
    assert leastnorm.predict_delta_f(sol, np.zeros((0, 3)), np.zeros(0)) == 0.0


def test_solution_is_read_only():
    bd = BaseData()
    p1 = leastnorm.LeastNormProblem(A=bd.ln_A1, b=bd.ln_b1)
    sol = leastnorm.solve_least_norm(p1)
    with pytest.raises(ValueError, match='read-only'):
        sol.x_star[0] = 1.0
    with pytest.raises(ValueError, match='read-only'):
        sol.cov[0, 0] = 1.0
    assert leastnorm.solve_least_norm(p1).x_star.tolist() == sol.x_star.tolist()


def test_rank_deficient():
    A = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])
    with pytest.raises(errors.RankDeficient, match=re.escape('`A` must have full row rank')):
        leastnorm.solve_least_norm(leastnorm.LeastNormProblem(A=A, b=[1.0, 2.0]))
    with pytest.raises(errors.RankDeficient):
        leastnorm.solve_least_norm(leastnorm.LeastNormProblem(A=np.eye(2)[[0, 1, 1]], b=[1, 2, 3]))


def test_singular_w():
    bd = BaseData()
    phase1 = leastnorm.solve_least_norm(leastnorm.LeastNormProblem(A=bd.ln_A1, b=bd.ln_b1))

    # A2 repeats A1
    # ************************************
    with pytest.raises(errors.SingularW, match=re.escape('A2 Cov A2^T')):
        leastnorm.predict_delta_f(phase1, bd.ln_A1, [3.0])

    # A2 is a combination of A1 rows
    # ************************************
    rng = np.random.default_rng(5)
    A1 = rng.standard_normal((3, 8))
    phase1 = leastnorm.solve_least_norm(leastnorm.LeastNormProblem(A=A1, b=rng.standard_normal(3)))
    A2 = rng.standard_normal((2, 3)) @ A1
    with pytest.raises(errors.SingularW):
        leastnorm.predict_delta_f(phase1, A2, [1.0, 1.0])


def test_projector_identities():
    for seed in range(50):
        A1, b1, _, _ = random_ln_instance(seed, max_n=20)
        n = A1.shape[1]
        sol = leastnorm.solve_least_norm(leastnorm.LeastNormProblem(A=A1, b=b1))
        np.testing.assert_allclose(sol.cov @ sol.cov, sol.cov, atol=1e-12)
        np.testing.assert_allclose(sol.cov, sol.cov.T, atol=0)
        np.testing.assert_allclose(A1 @ sol.cov, np.zeros((A1.shape[0], n)), atol=1e-12)
        assert np.trace(sol.cov) == pytest.approx(n - A1.shape[0], abs=1e-10)
        np.testing.assert_allclose(A1 @ sol.x_star, b1, atol=1e-10)
        assert sol.f_star == pytest.approx(sol.x_star @ sol.x_star, rel=1e-14)


def test_already_satisfied_constraints_add_nothing():
    rng = np.random.default_rng(9)
    A1 = rng.standard_normal((2, 6))
    sol = leastnorm.solve_least_norm(leastnorm.LeastNormProblem(A=A1, b=rng.standard_normal(2)))
    A2 = rng.standard_normal((2, 6))
    delta_f = leastnorm.predict_delta_f(sol, A2, A2 @ sol.x_star)
    assert delta_f == pytest.approx(0.0, abs=1e-20)


def test_change_of_optimal_value():
    W = np.array([[2.0, 0.0], [0.0, 4.0]])
    assert leastnorm.change_of_optimal_value(np.array([2.0, 2.0]), W) == pytest.approx(3.0)
    with pytest.raises(errors.DimensionMismatch, match=re.escape('`W` must be 2x2')):
        leastnorm.change_of_optimal_value(np.ones(2), np.eye(3))
    with pytest.raises(errors.SingularW, match=re.escape('is not positive definite')):
        leastnorm.change_of_optimal_value(np.ones(2), -np.eye(2))


def test_exactness_random():
    '''f* + delta_f equals the stacked optimum on random full rank instances.'''
    for seed in range(1000):
        A1, b1, A2, b2 = random_ln_instance(seed)
        p1 = leastnorm.LeastNormProblem(A=A1, b=b1)
        phase1 = leastnorm.solve_least_norm(p1)
        delta_f = leastnorm.predict_delta_f(phase1, A2, b2)
        f_star_star = leastnorm.solve_stacked(p1, A2, b2).f_star
        assert delta_f >= 0.0
        assert phase1.f_star + delta_f == pytest.approx(f_star_star, rel=1e-8), f'seed {seed}'


def test_schur_consistency():
    '''delta_f read off the Schur complement of the stacked constraint Gram matrix.'''
    for seed in range(100):
        A1, b1, A2, b2 = random_ln_instance(seed, max_n=15)
        if A1.shape[0] == 0:
            continue
        phase1 = leastnorm.solve_least_norm(leastnorm.LeastNormProblem(A=A1, b=b1))
        U, P = A1 @ A1.T, A1 @ A2.T
        Q, V = A2 @ A1.T, A2 @ A2.T
        _, block_diag, _ = linalg.schur_decompose(U, P, Q, V)
        m1 = A1.shape[0]
        # The Schur complement of U is W = A2 Cov A2^T
        W = block_diag[m1:, m1:]
        np.testing.assert_allclose(W, A2 @ phase1.cov @ A2.T, atol=1e-9)
        residual = A2 @ phase1.x_star - b2
        expected = residual @ np.linalg.solve(W, residual)
        assert leastnorm.predict_delta_f(phase1, A2, b2) == pytest.approx(expected, rel=1e-8)
