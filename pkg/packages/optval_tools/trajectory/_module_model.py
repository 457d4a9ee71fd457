import re
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .. import liegroup as lg
from ..errors import DimensionMismatch, IndexOutOfRange, NotSPD
from ..linalg import DenseMatrix, as_matrix

__all__ = [
    'Trajectory',
    'AlignmentPair',
    'PredictionReport',
    'chain_pose',
    'stack_state',
    'unstack_state',
    'make_report',
]

# Floor of the denominator of the relative error.
REL_ERROR_FLOOR = 1e-12


def _check_cov(cov, k: int) -> DenseMatrix:
    cov = as_matrix(cov, f'edge_covs[{k}]')
    if cov.shape != (6, 6):
        raise DimensionMismatch(f'`edge_covs[{k}]` must be 6x6, got {cov.shape}.')
    if not np.allclose(cov, cov.T, rtol=1e-12, atol=0.0):
        raise NotSPD(f'`edge_covs[{k}]` is not symmetric.')
    try:
        sla.cholesky(cov, lower=True, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise NotSPD(f'`edge_covs[{k}]` is not positive definite.') from e
    return cov


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A head pose plus a chain of relative poses, with one 6x6 covariance per variable.

    Attributes
    ----------
    head : Pose
        First absolute pose.
    rel_poses : tuple[Pose, ...]
        N relative poses, `rel_poses[k]` goes from pose k+1 to pose k+2 (1-based poses).
    edge_covs : tuple[DenseMatrix, ...]
        N+1 SPD covariances in (rho, phi) order: the head's first, then one per relative pose.
    """

    head: lg.Pose
    rel_poses: Sequence[lg.Pose]
    edge_covs: Sequence[DenseMatrix]

    def __post_init__(self) -> None:
        if not isinstance(self.head, lg.Pose):
            raise ValueError('`head` must be of type Pose.')
        rel_poses = tuple(self.rel_poses)
        if not all(isinstance(p, lg.Pose) for p in rel_poses):
            raise ValueError('`rel_poses` must only contain Pose objects.')
        if len(self.edge_covs) != len(rel_poses) + 1:
            raise DimensionMismatch(
                f'{len(rel_poses)} relative poses need {len(rel_poses) + 1} covariances, '
                f'got {len(self.edge_covs)}.'
            )
        edge_covs = tuple(_check_cov(cov, k) for k, cov in enumerate(self.edge_covs))
        object.__setattr__(self, 'rel_poses', rel_poses)
        object.__setattr__(self, 'edge_covs', edge_covs)

    @classmethod
    def from_variables(cls, variables: Sequence[lg.Pose], edge_covs: Sequence[DenseMatrix]):
        '''Inverse of `variables`: `(head, rel_1, ..., rel_N)`.'''
        variables = tuple(variables)
        if len(variables) == 0:
            raise ValueError('`variables` must hold at least the head pose.')
        return cls(head=variables[0], rel_poses=variables[1:], edge_covs=edge_covs)

    @property
    def n_rel(self) -> int:
        return len(self.rel_poses)

    @property
    def n_poses(self) -> int:
        return len(self.rel_poses) + 1

    @property
    def variables(self) -> tuple[lg.Pose, ...]:
        return (self.head, *self.rel_poses)

    @cached_property
    def poses(self) -> tuple[lg.Pose, ...]:
        '''Absolute poses `T_1 ... T_{N+1}`.'''
        return tuple(lg.cumulative_compose(self.variables))

    def covariance(self) -> DenseMatrix:
        '''Block diagonal covariance of all the variables.'''
        return sla.block_diag(*self.edge_covs)


def chain_pose(t: Trajectory, k: int) -> lg.Pose:
    """Absolute pose `T_k = T_1 T_{1,2} ... T_{k-1,k}` (1-based).

    Raises
    ------
    ValueError
        `t` must be of type Trajectory.
    IndexOutOfRange
        If `k` is not in `[1, N+1]`.
    """
    if not isinstance(t, Trajectory):
        raise ValueError('`t` must be of type Trajectory.')
    if not 1 <= k <= t.n_poses:
        raise IndexOutOfRange(f'Pose index {k} outside of [1, {t.n_poses}].')
    return t.poses[k - 1]


@dataclass(frozen=True)
class AlignmentPair:
    '''Hard constraint `A_T_l = B_T_r` between pose `l` of trajectory A and pose `r` of B, 1-based.'''

    l: int
    r: int

    def __post_init__(self) -> None:
        for name in ('l', 'r'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ValueError(f'`{name}` must be an integer.')
            if value < 1:
                raise IndexOutOfRange(f'`{name}` must be at least 1, got {value}.')
            object.__setattr__(self, name, int(value))

    @classmethod
    def parse(cls, text: str) -> 'AlignmentPair':
        '''Build a pair from `"l,r"`.'''
        match = re.fullmatch(r'\s*(\d+)\s*,\s*(\d+)\s*', str(text))
        if match is None:
            raise ValueError(f'A pair must read "l,r", got "{text}".')
        return cls(l=int(match.group(1)), r=int(match.group(2)))

    def check(self, tA: Trajectory, tB: Trajectory) -> None:
        if self.l > tA.n_poses:
            raise IndexOutOfRange(f'`l`={self.l} outside of trajectory A with {tA.n_poses} poses.')
        if self.r > tB.n_poses:
            raise IndexOutOfRange(f'`r`={self.r} outside of trajectory B with {tB.n_poses} poses.')

    def swapped(self) -> 'AlignmentPair':
        return AlignmentPair(l=self.r, r=self.l)


@dataclass(frozen=True)
class PredictionReport:
    '''Predicted and (optionally) solved cost of one alignment pair, timings in seconds.'''

    l: int
    r: int
    delta_f: float | None
    f_real: float | None = None
    rel_error: float | None = None
    t_predict: float | None = None
    t_solve: float | None = None
    error: str | None = None


def make_report(
    pair: AlignmentPair,
    delta_f: float | None,
    f_real: float | None = None,
    t_predict: float | None = None,
    t_solve: float | None = None,
    error: str | None = None,
) -> PredictionReport:
    '''Build a PredictionReport, `rel_error = |delta_f - f_real| / max(f_real, 1e-12)`.'''
    rel_error = None
    if delta_f is not None and f_real is not None:
        rel_error = abs(delta_f - f_real) / max(f_real, REL_ERROR_FLOOR)
    return PredictionReport(
        l=pair.l,
        r=pair.r,
        delta_f=delta_f,
        f_real=f_real,
        rel_error=rel_error,
        t_predict=t_predict,
        t_solve=t_solve,
        error=error,
    )


def stack_state(tA: Trajectory, tB: Trajectory) -> tuple[lg.Pose, ...]:
    '''State of the alignment problem: `[A head, A edges, B head, B edges]`.'''
    return tA.variables + tB.variables


def unstack_state(
    x: Sequence[lg.Pose], tA: Trajectory, tB: Trajectory
) -> tuple[Trajectory, Trajectory]:
    '''Split a state built like `stack_state(tA, tB)` back into two trajectories, keeping covariances.'''
    if len(x) != tA.n_poses + tB.n_poses:
        raise DimensionMismatch(
            f'The state has {len(x)} poses, expected {tA.n_poses + tB.n_poses}.'
        )
    return (
        Trajectory.from_variables(x[: tA.n_poses], tA.edge_covs),
        Trajectory.from_variables(x[tA.n_poses :], tB.edge_covs),
    )
