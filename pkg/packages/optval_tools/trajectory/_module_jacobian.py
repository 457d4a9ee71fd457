"""Analytic Jacobian of the alignment constraint `C(x) = Log(A_T_l B_T_r^-1)`.

With `eta = C(x)` and right perturbations `T boxplus xi` of every variable:

```
A2[A variable i] = -J_l(eta)^-1 Ad(A_T_i)                    i = 1..l
A2[B variable j] =  J_l(eta)^-1 Ad(A_T_l B_T_r^-1 B_T_j)     j = 1..r
```

where `A_T_i` is the absolute pose reached after variable i (the head is variable 1). All
other columns are zero. The B-side uses `B_T_j`, the absolute pose of the j-th B variable.
"""

from typing import Sequence

import numpy as np

from .. import liegroup as lg
from ..linalg import DenseMatrix
from ..nlpredict import Constraint
from ._module_model import AlignmentPair, Trajectory

__all__ = ['alignment_blocks', 'alignment_jacobian', 'alignment_constraint']


def _blocks_from_poses(
    poses_a: Sequence[lg.Pose], poses_b: Sequence[lg.Pose], l: int, r: int
) -> tuple[lg.Twist, list[np.ndarray], list[np.ndarray]]:
    T = poses_a[l - 1] @ poses_b[r - 1].inverse()
    eta = lg.log(T)
    J_inv = lg.left_jacobian_inv(eta)
    blocks_a = [-J_inv @ lg.adjoint(poses_a[i]) for i in range(l)]
    blocks_b = [J_inv @ lg.adjoint(T @ poses_b[j]) for j in range(r)]
    return eta, blocks_a, blocks_b


def alignment_blocks(
    tA: Trajectory, tB: Trajectory, pair: AlignmentPair
) -> tuple[lg.Twist, list[DenseMatrix], list[DenseMatrix]]:
    """The populated 6x6 blocks of the alignment Jacobian.

    Returns
    -------
    tuple[Twist, list[DenseMatrix], list[DenseMatrix]]
        `eta`, the l blocks of the A variables and the r blocks of the B variables.

    Raises
    ------
    IndexOutOfRange
        If the pair is outside of the trajectories.
    NearPiRotation
        If the rotation of `A_T_l B_T_r^-1` is too close to pi.
    """
    pair.check(tA, tB)
    return _blocks_from_poses(tA.poses, tB.poses, pair.l, pair.r)


def _assemble(
    blocks_a: list[np.ndarray], blocks_b: list[np.ndarray], n_a: int, n_b: int
) -> np.ndarray:
    A2 = np.zeros((6, 6 * (n_a + n_b)))
    for i, block in enumerate(blocks_a):
        A2[:, 6 * i : 6 * i + 6] = block
    for j, block in enumerate(blocks_b):
        col = 6 * (n_a + j)
        A2[:, col : col + 6] = block
    return A2


def alignment_jacobian(
    tA: Trajectory, tB: Trajectory, pair: AlignmentPair
) -> tuple[DenseMatrix, lg.Twist]:
    """Full alignment Jacobian `A2` (6 x 6 (N_A+1 + N_B+1)) and `eta = Log(A_T_l B_T_r^-1)`.

    Columns follow `stack_state`: A head, A edges, B head, B edges.

    Raises
    ------
    IndexOutOfRange
        If the pair is outside of the trajectories.
    NearPiRotation
        If the rotation of `eta` is too close to pi.
    """
    eta, blocks_a, blocks_b = alignment_blocks(tA, tB, pair)
    return _assemble(blocks_a, blocks_b, tA.n_poses, tB.n_poses), eta


def alignment_constraint(tA: Trajectory, tB: Trajectory, pair: AlignmentPair) -> Constraint:
    """The alignment constraint as a `nlpredict.Constraint` on the stacked state.

    The state is a tuple of poses laid out like `stack_state(tA, tB)`; only the sizes of `tA`
    and `tB` are used, so the constraint and its analytic Jacobian are valid at any state.
    """
    pair.check(tA, tB)
    n_a, n_b = tA.n_poses, tB.n_poses
    l, r = pair.l, pair.r

    def split(x):
        if len(x) != n_a + n_b:
            raise ValueError(f'The state must hold {n_a + n_b} poses, got {len(x)}.')
        return lg.cumulative_compose(x[:l]), lg.cumulative_compose(x[n_a : n_a + r])

    def function(x):
        poses_a, poses_b = split(x)
        return lg.log(poses_a[-1] @ poses_b[-1].inverse()).vector

    def jacobian(x):
        poses_a, poses_b = split(x)
        _, blocks_a, blocks_b = _blocks_from_poses(poses_a, poses_b, l, r)
        return _assemble(blocks_a, blocks_b, n_a, n_b)

    return Constraint(function=function, jacobian=jacobian, name=f'align({l},{r})')

