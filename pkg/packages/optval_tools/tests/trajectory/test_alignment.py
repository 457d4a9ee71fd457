import re

import numpy as np
import pytest
import scipy.linalg as sla

from optval_tools import errors, liegroup, nlpredict, trajectory


def test_evaluate_pair_modes():
    tA, tB, _ = trajectory.simulate_pair(8, seed=1)
    pair = trajectory.AlignmentPair(4, 5)

    report = trajectory.evaluate_pair(tA, tB, pair, mode='predict')
    assert report.delta_f > 0.0
    assert report.f_real is None
    assert report.t_solve is None
    assert report.rel_error is None

    report = trajectory.evaluate_pair(tA, tB, pair, mode='solve')
    assert report.delta_f is None
    assert report.f_real > 0.0
    assert report.t_predict is None
    assert report.t_solve >= 0.0

    report = trajectory.evaluate_pair(tA, tB, pair)
    assert (report.l, report.r) == (4, 5)
    assert report.error is None
    assert report.rel_error == pytest.approx(
        abs(report.delta_f - report.f_real) / report.f_real, rel=1e-12
    )

    with pytest.raises(
        ValueError, match=re.escape("`mode` must be one of ('predict', 'solve', 'both').")
    ):
        trajectory.evaluate_pair(tA, tB, pair, mode='guess')
    with pytest.raises(errors.IndexOutOfRange):
        trajectory.evaluate_pair(tA, tB, trajectory.AlignmentPair(9, 1))


def test_evaluate_pair_records_errors():
    cov = [np.eye(6)] * 2
    step = liegroup.Pose.identity()
    half_turn = liegroup.Pose(rotation=np.diag([-1.0, -1.0, 1.0]), translation=np.zeros(3))
    tA = trajectory.Trajectory(head=liegroup.Pose.identity(), rel_poses=[step], edge_covs=cov)
    tB = trajectory.Trajectory(head=half_turn, rel_poses=[step], edge_covs=cov)
    report = trajectory.evaluate_pair(tA, tB, trajectory.AlignmentPair(1, 1), mode='predict')
    assert report.delta_f is None
    assert report.error.startswith('NearPiRotation: ')
    assert report.t_predict >= 0.0


def test_relabeling():
    '''Swapping the roles of A and B does not change the prediction.'''
    for seed in range(5):
        tA, tB, _ = trajectory.simulate_pair(12, seed=seed)
        pair = trajectory.AlignmentPair(3 + seed, 9 - seed)
        delta_f = trajectory.predict_alignment_cost(tA, tB, pair)
        swapped = trajectory.predict_alignment_cost(tB, tA, pair.swapped())
        assert swapped == pytest.approx(delta_f, rel=1e-9)


def test_zero_at_the_meeting_pose():
    _, _, (ta, tb) = trajectory.simulate_pair(20, seed=2)
    pair = trajectory.AlignmentPair(10, 10)
    assert trajectory.predict_alignment_cost(ta, tb, pair) < 1e-12
    f_real, _ = trajectory.solve_alignment(ta, tb, pair)
    assert f_real == pytest.approx(0.0, abs=1e-12)


def test_solve_alignment():
    tA, tB, _ = trajectory.simulate_pair(10, seed=4)
    pair = trajectory.AlignmentPair(6, 8)
    f_real, (a, b) = trajectory.solve_alignment(tA, tB, pair)
    assert a.n_poses == tA.n_poses
    assert b.n_poses == tB.n_poses
    for cov, expected in zip(a.edge_covs, tA.edge_covs, strict=True):
        np.testing.assert_array_equal(cov, expected)

    # The bent trajectories meet, and the cost is measured against the measurements
    # ************************************
    assert trajectory.chain_pose(a, 6).allclose(trajectory.chain_pose(b, 8), atol=1e-8)
    cost = trajectory.trajectory_cost(a, tA) + trajectory.trajectory_cost(b, tB)
    assert f_real == pytest.approx(cost, rel=1e-9)
    assert trajectory.trajectory_cost(tA, tA) < 1e-20


def test_prediction_close_to_solved():
    tA, tB, _ = trajectory.simulate_pair(20, seed=0)
    report = trajectory.evaluate_pair(tA, tB, trajectory.AlignmentPair(10, 12))
    assert report.error is None
    assert report.rel_error <= 0.15
    assert report.t_predict < report.t_solve


def test_far_pair_real_cost_is_the_lowest():
    '''Far from the meeting pose the prediction drifts, while the solved cost stays the minimum.'''
    tA, tB, _ = trajectory.simulate_pair(20, seed=1)
    pair = trajectory.AlignmentPair(20, 18)
    delta_f = trajectory.predict_alignment_cost(tA, tB, pair)
    f_real, _ = trajectory.solve_alignment(tA, tB, pair)
    assert delta_f == pytest.approx(1922.26, rel=1e-3)
    assert f_real == pytest.approx(2425.71, rel=1e-3)

    problem = nlpredict.ManifoldProblem(
        x_tilde=trajectory.stack_state(tA, tB),
        Sigma=sla.block_diag(tA.covariance(), tB.covariance()),
        constraints=(trajectory.alignment_constraint(tA, tB, pair),),
    )
    std = np.sqrt(np.diag(problem.Sigma))
    rng = np.random.default_rng(12345)
    n_converged = 0
    for scale in (0.3, 1.0, 0.3):
        init = problem.manifold.boxplus(
            problem.x_tilde, scale * std * rng.standard_normal(problem.n)
        )
        try:
            sol = nlpredict.solve_nl(problem, init=init, with_covariance=False)
        except errors.NoConvergence:
            continue
        n_converged += 1
        assert sol.f_star >= f_real * (1 - 1e-6)
    assert n_converged > 0


def test_trajectory_cost_errors():
    tA, tB, _ = trajectory.simulate_pair(5, seed=0)
    short, _, _ = trajectory.simulate_pair(4, seed=0)
    with pytest.raises(
        ValueError, match=re.escape('`t` and `t_tilde` must be of type Trajectory.')
    ):
        trajectory.trajectory_cost(tA, tA.variables)
    with pytest.raises(
        errors.DimensionMismatch, match=re.escape('Trajectories of 4 and 5 poses.')
    ):
        trajectory.trajectory_cost(short, tA)
    assert trajectory.trajectory_cost(tA, tB) > 0.0
