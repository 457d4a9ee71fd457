import time

import numpy as np
import scipy.linalg as sla

from .. import liegroup as lg
from ..errors import DimensionMismatch, OptvalError
from ..leastnorm import change_of_optimal_value
from ..linalg import solve_spd
from ..nlpredict import MAX_ITERATIONS, SOLVER_TOL, ManifoldProblem, solve_nl
from ._module_jacobian import alignment_blocks, alignment_constraint
from ._module_model import (
    AlignmentPair,
    PredictionReport,
    Trajectory,
    make_report,
    stack_state,
    unstack_state,
)

__all__ = [
    'MODES',
    'predict_alignment_cost',
    'solve_alignment',
    'trajectory_cost',
    'evaluate_pair',
]

MODES = ('predict', 'solve', 'both')


def predict_alignment_cost(tA: Trajectory, tB: Trajectory, pair: AlignmentPair) -> float:
    """Predicted cost of forcing `A_T_l = B_T_r`, without solving anything.

    The measurements are the Phase I solution (`f* = 0`, `H = I`, `Cov = Sigma`), so

    ```
    delta_f = eta^T [A2 Sigma A2^T]^-1 eta,    eta = Log(A_T_l B_T_r^-1)
    ```

    `A2 Sigma A2^T` is accumulated block by block over the l + r populated columns of `A2`.

    Parameters
    ----------
    tA, tB : Trajectory
        The two measured trajectories.
    pair : AlignmentPair
        Which poses to align.

    Returns
    -------
    float
        delta_f >= 0.

    Raises
    ------
    IndexOutOfRange
        If the pair is outside of the trajectories.
    NearPiRotation
        If the rotation of `eta` is too close to pi.
    SingularW
        If `A2 Sigma A2^T` is not invertible.
    """
    eta, blocks_a, blocks_b = alignment_blocks(tA, tB, pair)
    W = np.zeros((6, 6))
    scale = 0.0
    for blocks, covs in ((blocks_a, tA.edge_covs), (blocks_b, tB.edge_covs)):
        for block, cov in zip(blocks, covs):
            W += block @ cov @ block.T
            scale += np.linalg.norm(block) ** 2 * np.linalg.norm(cov)
    return change_of_optimal_value(eta.vector, W, scale=scale)


def solve_alignment(
    tA: Trajectory,
    tB: Trajectory,
    pair: AlignmentPair,
    tol: float = SOLVER_TOL,
    max_iterations: int = MAX_ITERATIONS,
    report_print: bool = False,
) -> tuple[float, tuple[Trajectory, Trajectory]]:
    """Bend both trajectories so that `A_T_l = B_T_r`, staying as close as possible to the measurements.

    Solves `min sum_k ||x_k boxminus x_tilde_k||^2_Sigma_k  s.t. Log(A_T_l B_T_r^-1) = 0` with
    `nlpredict.solve_nl`, starting from the measurements.

    Returns
    -------
    tuple[float, tuple[Trajectory, Trajectory]]
        The real cost and the bent (A, B).

    Raises
    ------
    IndexOutOfRange
        If the pair is outside of the trajectories.
    NoConvergence
        If the solver does not converge.
    """
    constraint = alignment_constraint(tA, tB, pair)
    problem = ManifoldProblem(
        x_tilde=stack_state(tA, tB),
        Sigma=sla.block_diag(tA.covariance(), tB.covariance()),
        constraints=(constraint,),
    )
    sol = solve_nl(
        problem,
        tol=tol,
        max_iterations=max_iterations,
        with_covariance=False,
        report_print=report_print,
    )
    return sol.f_star, unstack_state(sol.x_star, tA, tB)


def trajectory_cost(t: Trajectory, t_tilde: Trajectory) -> float:
    '''`sum_k ||t_k boxminus t_tilde_k||^2` weighted by the covariances of `t_tilde`.'''
    if not isinstance(t, Trajectory) or not isinstance(t_tilde, Trajectory):
        raise ValueError('`t` and `t_tilde` must be of type Trajectory.')
    if t.n_poses != t_tilde.n_poses:
        raise DimensionMismatch(f'Trajectories of {t.n_poses} and {t_tilde.n_poses} poses.')
    cost = 0.0
    for v, v_tilde, cov in zip(t.variables, t_tilde.variables, t_tilde.edge_covs):
        r = lg.boxminus(v, v_tilde).vector
        cost += float(r @ solve_spd(cov, r))
    return cost


def evaluate_pair(
    tA: Trajectory,
    tB: Trajectory,
    pair: AlignmentPair,
    mode: str = 'both',
    tol: float = SOLVER_TOL,
    max_iterations: int = MAX_ITERATIONS,
) -> PredictionReport:
    """Predict and/or solve one pair, timing each part.

    Timings are wall clock seconds around the computation only. Numerical failures do not
    raise: they are recorded in `PredictionReport.error` as `ExceptionClass: message`.

    Parameters
    ----------
    mode : str, optional
        'predict', 'solve' or 'both', by default 'both'.

    Raises
    ------
    ValueError
        `mode` must be one of 'predict', 'solve', 'both'.
    IndexOutOfRange
        If the pair is outside of the trajectories.
    """
    if mode not in MODES:
        raise ValueError(f'`mode` must be one of {MODES}.')
    pair.check(tA, tB)
    delta_f = f_real = t_predict = t_solve = None
    errors = []
    if mode in ('predict', 'both'):
        start = time.perf_counter()
        try:
            delta_f = predict_alignment_cost(tA, tB, pair)
        except OptvalError as e:
            errors.append(f'{type(e).__name__}: {e}')
        t_predict = time.perf_counter() - start
    if mode in ('solve', 'both'):
        start = time.perf_counter()
        try:
            f_real, _ = solve_alignment(tA, tB, pair, tol=tol, max_iterations=max_iterations)
        except OptvalError as e:
            errors.append(f'{type(e).__name__}: {e}')
        t_solve = time.perf_counter() - start
    return make_report(
        pair,
        delta_f=delta_f,
        f_real=f_real,
        t_predict=t_predict,
        t_solve=t_solve,
        error='; '.join(errors) if errors else None,
    )
