from abc import ABC, abstractmethod
from typing import Any, Sequence

import numpy as np
import scipy.linalg as sla

from .. import liegroup as lg
from ..errors import DimensionMismatch
from ..linalg import DenseMatrix, DenseVector

__all__ = ['Manifold', 'EuclideanSpace', 'SE3', 'SE3Product', 'manifold_of']


class Manifold(ABC):
    """A state space with a retraction `boxplus` and a local difference `boxminus`.

    Subclasses implement `x boxminus y` as "y seen from x", so that the least distance residual
    `r(x) = x boxminus x_tilde` linearizes as `r(x boxplus xi) ~ r(x) - H xi` with
    `H = diff_jacobian(x, x_tilde)`.
    """

    @abstractmethod
    def dim(self, x: Any) -> int:
        '''Dimension of the tangent space at `x`.'''

    @abstractmethod
    def boxplus(self, x: Any, xi: DenseVector) -> Any:
        pass

    @abstractmethod
    def boxminus(self, x1: Any, x2: Any) -> DenseVector:
        pass

    @abstractmethod
    def diff_jacobian(self, x: Any, x_tilde: Any) -> DenseMatrix:
        '''`H = -d((x boxplus xi) boxminus x_tilde)/d xi` at `xi = 0`.'''

    def _check_step(self, x: Any, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=np.float64).reshape(-1)
        if xi.shape[0] != self.dim(x):
            raise DimensionMismatch(
                f'`xi` has {xi.shape[0]} entries, the tangent space has {self.dim(x)}.'
            )
        return xi


class EuclideanSpace(Manifold):
    '''Flat space: `x boxplus xi = x + xi`, `x1 boxminus x2 = x2 - x1`, `H = I`.'''

    def dim(self, x) -> int:
        return np.asarray(x).shape[0]

    def boxplus(self, x, xi) -> DenseVector:
        return np.asarray(x, dtype=np.float64) + self._check_step(x, xi)

    def boxminus(self, x1, x2) -> DenseVector:
        return np.asarray(x2, dtype=np.float64) - np.asarray(x1, dtype=np.float64)

    def diff_jacobian(self, x, x_tilde) -> DenseMatrix:
        return np.eye(self.dim(x))


class SE3(Manifold):
    '''A single pose, with the `liegroup` boxplus/boxminus.'''

    def dim(self, x: lg.Pose) -> int:
        return 6

    def boxplus(self, x: lg.Pose, xi) -> lg.Pose:
        return lg.boxplus(x, self._check_step(x, xi))

    def boxminus(self, x1: lg.Pose, x2: lg.Pose) -> DenseVector:
        return lg.boxminus(x1, x2).vector

    def diff_jacobian(self, x: lg.Pose, x_tilde: lg.Pose) -> DenseMatrix:
        # Log(Exp(-xi) Exp(r)) ~ r - J_l(r)^-1 xi
        return lg.left_jacobian_inv(self.boxminus(x, x_tilde))


class SE3Product(Manifold):
    '''An ordered tuple of poses, every operation applied blockwise (6 tangent entries per pose).'''

    def dim(self, x: Sequence[lg.Pose]) -> int:
        return 6 * len(x)

    def boxplus(self, x: Sequence[lg.Pose], xi) -> tuple[lg.Pose, ...]:
        xi = self._check_step(x, xi).reshape(-1, 6)
        return tuple(
            pose if not np.any(block) else lg.boxplus(pose, block) for pose, block in zip(x, xi)
        )

    def boxminus(self, x1: Sequence[lg.Pose], x2: Sequence[lg.Pose]) -> DenseVector:
        if len(x1) != len(x2):
            raise DimensionMismatch(f'Pose tuples of different lengths: {len(x1)} and {len(x2)}.')
        if len(x1) == 0:
            return np.zeros(0)
        return np.concatenate([lg.boxminus(p1, p2).vector for p1, p2 in zip(x1, x2)])

    def diff_jacobian(self, x: Sequence[lg.Pose], x_tilde: Sequence[lg.Pose]) -> DenseMatrix:
        r = self.boxminus(x, x_tilde).reshape(-1, 6)
        if r.shape[0] == 0:
            return np.zeros((0, 0))
        return sla.block_diag(*(lg.left_jacobian_inv(block) for block in r))


_EUCLIDEAN = EuclideanSpace()
_SE3 = SE3()
_SE3_PRODUCT = SE3Product()


def manifold_of(x: Any) -> Manifold:
    """Infer the manifold of a state point from its type.

    Parameters
    ----------
    x : Any
        A Pose, a tuple/list of Poses or a 1-D array of floats.

    Returns
    -------
    Manifold
        SE3, SE3Product or EuclideanSpace.

    Raises
    ------
    ValueError
        If no manifold matches the type of `x`.
    """
    if isinstance(x, lg.Pose):
        return _SE3
    if isinstance(x, (tuple, list)) and len(x) > 0 and all(isinstance(p, lg.Pose) for p in x):
        return _SE3_PRODUCT
    try:
        arr = np.asarray(x, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise ValueError(f'No manifold for a state of type {type(x).__name__}.') from e
    if arr.ndim != 1:
        raise ValueError('A Euclidean state must be a 1-D array.')
    return _EUCLIDEAN
