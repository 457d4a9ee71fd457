__all__ = [
    'Trajectory',
    'AlignmentPair',
    'PredictionReport',
    'chain_pose',
    'stack_state',
    'unstack_state',
    'make_report',
    'noise_covariance',
    'simulate_pair',
    'alignment_blocks',
    'alignment_jacobian',
    'alignment_constraint',
    'MODES',
    'predict_alignment_cost',
    'solve_alignment',
    'trajectory_cost',
    'evaluate_pair',
    'write_trajectory',
    'read_trajectory',
    'trajectory_to_csv',
]

from ._module_alignment import (
    MODES,
    evaluate_pair,
    predict_alignment_cost,
    solve_alignment,
    trajectory_cost,
)
from ._module_io import read_trajectory, trajectory_to_csv, write_trajectory
from ._module_jacobian import alignment_blocks, alignment_constraint, alignment_jacobian
from ._module_model import (
    AlignmentPair,
    PredictionReport,
    Trajectory,
    chain_pose,
    make_report,
    stack_state,
    unstack_state,
)
from ._module_simulate import noise_covariance, simulate_pair
