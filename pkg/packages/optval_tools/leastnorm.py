"""Minimum norm optimization and the exact change of its optimal value.

Phase I solves `min x^T x  s.t. A1 x = b1`. When the constraints `A2 x = b2` arrive, the optimal
value of the stacked problem is `f** = f* + delta_f` with

```
delta_f = (A2 x1* - b2)^T [A2 Cov(x1*) A2^T]^-1 (A2 x1* - b2)
```

which only needs the Phase I solution and covariance.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, RankDeficient, SingularW
from .linalg import DenseMatrix, DenseVector, as_matrix, as_vector, numerical_rank, symmetrize

__all__ = [
    'LeastNormProblem',
    'PhaseSolution',
    'solve_least_norm',
    'predict_delta_f',
    'solve_stacked',
    'change_of_optimal_value',
]

# A Cholesky pivot below this many ulps of `scale` is treated as a zero pivot.
_PIVOT_ULPS = 100.0


@dataclass(frozen=True)
class LeastNormProblem:
    """`min x^T x  s.t. A x = b`.

    The rank of `A` is checked when solving, not here, so problems can be built incrementally.
    """

    A: DenseMatrix
    b: DenseVector

    def __post_init__(self) -> None:
        A = as_matrix(self.A, 'A')
        b = as_vector(self.b, 'b')
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatch(f'`A` has {A.shape[0]} rows but `b` has {b.shape[0]} entries.')
        object.__setattr__(self, 'A', A)
        object.__setattr__(self, 'b', b)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class PhaseSolution:
    '''Optimal point, covariance (the null space projector of `A`) and optimal value.'''

    x_star: DenseVector
    cov: DenseMatrix
    f_star: float

    def __post_init__(self) -> None:
        object.__setattr__(self, 'x_star', as_vector(self.x_star, 'x_star'))
        object.__setattr__(self, 'cov', as_matrix(self.cov, 'cov'))
        object.__setattr__(self, 'f_star', float(self.f_star))


def change_of_optimal_value(
    residual: DenseVector,
    W: DenseMatrix,
    scale: float | None = None,
) -> float:
    """Evaluate `residual^T W^-1 residual` through a Cholesky factorization of `W`.

    Computed as `||L^-1 residual||^2`, so the result is never negative.

    Parameters
    ----------
    residual : DenseVector
        `A2 x1* - b2` (or `C2(x1*)` in the nonlinear case).
    W : DenseMatrix
        `A2 Cov(x1*) A2^T`.
    scale : float | None, optional
        Magnitude `W` would have if the rows of `A2` were independent, usually
        `||A2||_F^2 ||Cov||_F`. Pivots below `100 * eps * scale` count as zero. By default
        `max(|diag(W)|)`, which only catches factorizations that fail outright.

    Returns
    -------
    float
        The change of optimal value, >= 0.

    Raises
    ------
    DimensionMismatch
        `residual` and `W` are not conformal.
    SingularW
        `W` is not positive definite at working precision.
    """
    residual = np.asarray(residual, dtype=np.float64)
    W = symmetrize(np.asarray(W, dtype=np.float64))
    m = residual.shape[0]
    if W.shape != (m, m):
        raise DimensionMismatch(f'`W` must be {m}x{m}, got {W.shape}.')
    if m == 0:
        return 0.0
    try:
        L = sla.cholesky(W, lower=True, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise SingularW(f'A2 Cov A2^T is not positive definite: {e}') from e
    if scale is None:
        scale = float(np.max(np.abs(np.diag(W))))
    pivots = np.diag(L) ** 2
    if np.min(pivots) <= _PIVOT_ULPS * m * np.finfo(float).eps * scale:
        raise SingularW(
            'A2 Cov A2^T is singular: the new constraints depend on the previous ones.'
        )
    y = sla.solve_triangular(L, residual, lower=True, check_finite=False)
    return float(y @ y)


def solve_least_norm(p: LeastNormProblem) -> PhaseSolution:
    """Solve a minimum norm problem in closed form.

    ```
    x*  = A^T (A A^T)^-1 b
    Cov = I - A^T (A A^T)^-1 A
    f*  = b^T (A A^T)^-1 b = x*^T x*
    ```

    The inverse is never formed: with the thin QR factorization `A^T = Q R` we have
    `A A^T = R^T R`, `x* = Q R^-T b` and `Cov = I - Q Q^T`.

    Parameters
    ----------
    p : LeastNormProblem
        The problem.

    Returns
    -------
    PhaseSolution
        The solution.

    Raises
    ------
    ValueError
        `p` must be of type LeastNormProblem.
    RankDeficient
        If `A` does not have full row rank.
    """
    if not isinstance(p, LeastNormProblem):
        raise ValueError('`p` must be of type LeastNormProblem.')
    m, n = p.m, p.n
    if m == 0:
        return PhaseSolution(x_star=np.zeros(n), cov=np.eye(n), f_star=0.0)
    rank = numerical_rank(p.A)
    if m > n or rank < m:
        raise RankDeficient(f'`A` must have full row rank: rank {rank} for {m} rows.')

    Q, R = sla.qr(p.A.T, mode='economic', check_finite=False)
    z = sla.solve_triangular(R, p.b, trans='T', check_finite=False)
    x_star = Q @ z
    cov = symmetrize(np.eye(n) - Q @ Q.T)
    return PhaseSolution(x_star=x_star, cov=cov, f_star=float(x_star @ x_star))


def _validate_new_constraints(n: int, A2, b2) -> tuple[np.ndarray, np.ndarray]:
    A2 = np.asarray(A2, dtype=np.float64)
    # No new constraints at all
    if A2.size == 0:
        A2 = A2.reshape(0, n)
    A2 = as_matrix(A2, 'A2')
    b2 = as_vector(np.asarray(b2, dtype=np.float64).reshape(-1), 'b2')
    if A2.shape[1] != n:
        raise DimensionMismatch(f'`A2` must have {n} columns, got {A2.shape[1]}.')
    if A2.shape[0] != b2.shape[0]:
        raise DimensionMismatch(f'`A2` has {A2.shape[0]} rows but `b2` has {b2.shape[0]} entries.')
    return A2, b2


def predict_delta_f(phase1: PhaseSolution, A2: DenseMatrix, b2: DenseVector) -> float:
    """Change of optimal value when `A2 x = b2` is added to a solved Phase I problem.

    The optimal value of the stacked problem is `phase1.f_star + predict_delta_f(...)`,
    no need to solve it.

    Parameters
    ----------
    phase1 : PhaseSolution
        Solution of the Phase I problem.
    A2 : DenseMatrix
        New constraint rows, (m2, n).
    b2 : DenseVector
        New right hand side, (m2,).

    Returns
    -------
    float
        delta_f >= 0.

    Raises
    ------
    ValueError
        `phase1` must be of type PhaseSolution.
    SingularW
        If `A2 Cov(x1*) A2^T` is not invertible.
    """
    if not isinstance(phase1, PhaseSolution):
        raise ValueError('`phase1` must be of type PhaseSolution.')
    A2, b2 = _validate_new_constraints(phase1.x_star.shape[0], A2, b2)
    residual = A2 @ phase1.x_star - b2
    W = A2 @ phase1.cov @ A2.T
    scale = np.linalg.norm(A2) ** 2 * max(np.linalg.norm(phase1.cov), 1.0)
    return change_of_optimal_value(residual, W, scale=scale)


def solve_stacked(p1: LeastNormProblem, A2: DenseMatrix, b2: DenseVector) -> PhaseSolution:
    '''Solve the Phase II problem `[A1; A2] x = [b1; b2]` directly.'''
    if not isinstance(p1, LeastNormProblem):
        raise ValueError('`p1` must be of type LeastNormProblem.')
    A2, b2 = _validate_new_constraints(p1.n, A2, b2)
    return solve_least_norm(
        LeastNormProblem(A=np.vstack([p1.A, A2]), b=np.concatenate([p1.b, b2]))
    )
