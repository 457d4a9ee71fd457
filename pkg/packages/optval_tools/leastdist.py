"""Least distance optimization `min (Hx - h)^T Sigma^-1 (Hx - h)  s.t. A1 x = b1`.

The substitution `y = Sigma^-1/2 (H x - h)` turns the problem into a least norm one, so the
change of optimal value keeps the form of `leastnorm.predict_delta_f`, with the covariance

```
Cov(x1*) = Q - Q A1^T (A1 Q A1^T)^-1 A1 Q,    Q = H^-1 Sigma H^-T
```
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, RankDeficient, SingularH
from .leastnorm import LeastNormProblem, _validate_new_constraints, change_of_optimal_value
from .linalg import (
    DenseMatrix,
    DenseVector,
    as_matrix,
    as_vector,
    numerical_rank,
    solve_spd,
    symmetric_sqrt,
    symmetrize,
)

__all__ = [
    'LeastDistanceProblem',
    'LDPhaseSolution',
    'LeastDistanceTransform',
    'to_least_norm',
    'recover_x',
    'explicit_covariance',
    'ld_objective',
    'solve_ld',
    'solve_stacked_ld',
    'predict_delta_f_ld',
]


@dataclass(frozen=True)
class LeastDistanceProblem:
    """`min (Hx - h)^T Sigma^-1 (Hx - h)  s.t. A1 x = b1`.

    `H` must be invertible, `Sigma` SPD and `A1` of full row rank; this is checked when solving.
    """

    H: DenseMatrix
    Sigma: DenseMatrix
    h: DenseVector
    A1: DenseMatrix
    b1: DenseVector

    def __post_init__(self) -> None:
        H = as_matrix(self.H, 'H')
        Sigma = as_matrix(self.Sigma, 'Sigma')
        h = as_vector(self.h, 'h')
        A1 = np.asarray(self.A1, dtype=np.float64)
        if A1.size == 0:
            A1 = A1.reshape(0, H.shape[1])
        A1 = as_matrix(A1, 'A1')
        b1 = as_vector(np.asarray(self.b1, dtype=np.float64).reshape(-1), 'b1')
        n = H.shape[0]
        if H.shape != (n, n) or Sigma.shape != (n, n) or h.shape != (n,):
            raise DimensionMismatch(
                f'`H`, `Sigma` must be {n}x{n} and `h` of length {n}: '
                f'H{H.shape}, Sigma{Sigma.shape}, h{h.shape}.'
            )
        if A1.shape[1] != n or A1.shape[0] != b1.shape[0]:
            raise DimensionMismatch(f'`A1`{A1.shape} and `b1`{b1.shape} are not conformal.')
        for name, value in (('H', H), ('Sigma', Sigma), ('h', h), ('A1', A1), ('b1', b1)):
            object.__setattr__(self, name, value)

    @property
    def n(self) -> int:
        return self.H.shape[0]


@dataclass(frozen=True)
class LDPhaseSolution:
    '''Optimal point, covariance and optimal value of a least distance problem.'''

    x_star: DenseVector
    cov: DenseMatrix
    f_star: float

    def __post_init__(self) -> None:
        object.__setattr__(self, 'x_star', as_vector(self.x_star, 'x_star'))
        object.__setattr__(self, 'cov', as_matrix(self.cov, 'cov'))
        object.__setattr__(self, 'f_star', float(self.f_star))


@dataclass(frozen=True)
class LeastDistanceTransform:
    """Record of `x = H^-1 (Sigma^1/2 y + h)`, enough to map a least norm solution back."""

    H_lu: tuple
    sigma_sqrt: DenseMatrix
    h: DenseVector


def _factor_h(H: np.ndarray) -> tuple:
    if numerical_rank(H) < H.shape[0]:
        raise SingularH('`H` is not invertible.')
    return sla.lu_factor(H, check_finite=False)


def _q_matrix(H_lu: tuple, Sigma: np.ndarray) -> np.ndarray:
    # Q = G G^T with G = H^-1 Sigma^1/2 keeps Q symmetric PSD
    G = sla.lu_solve(H_lu, symmetric_sqrt(Sigma), check_finite=False)
    return G @ G.T


def _check_full_row_rank(A1: np.ndarray) -> None:
    if A1.shape[0] == 0:
        return
    rank = numerical_rank(A1)
    if rank < A1.shape[0]:
        raise RankDeficient(f'`A1` must have full row rank: rank {rank} for {A1.shape[0]} rows.')


def to_least_norm(p: LeastDistanceProblem) -> tuple[LeastNormProblem, LeastDistanceTransform]:
    """Rewrite a least distance problem as `min y^T y  s.t. A1 H^-1 Sigma^1/2 y = b1 - A1 H^-1 h`.

    Returns
    -------
    tuple[LeastNormProblem, LeastDistanceTransform]
        The least norm problem and the record needed by `recover_x`.

    Raises
    ------
    NotSPD
        If `Sigma` is not SPD.
    SingularH
        If `H` is not invertible.
    """
    if not isinstance(p, LeastDistanceProblem):
        raise ValueError('`p` must be of type LeastDistanceProblem.')
    H_lu = _factor_h(p.H)
    sigma_sqrt = symmetric_sqrt(p.Sigma)
    h_inv_sqrt = sla.lu_solve(H_lu, sigma_sqrt, check_finite=False)
    h_inv_h = sla.lu_solve(H_lu, p.h, check_finite=False)
    ln_problem = LeastNormProblem(A=p.A1 @ h_inv_sqrt, b=p.b1 - p.A1 @ h_inv_h)
    return ln_problem, LeastDistanceTransform(H_lu=H_lu, sigma_sqrt=sigma_sqrt, h=p.h)


def recover_x(transform: LeastDistanceTransform, y: DenseVector) -> DenseVector:
    '''Map a least norm variable `y` back to `x = H^-1 (Sigma^1/2 y + h)`.'''
    return sla.lu_solve(transform.H_lu, transform.sigma_sqrt @ y + transform.h, check_finite=False)


def explicit_covariance(H: DenseMatrix, Sigma: DenseMatrix, A1: DenseMatrix) -> DenseMatrix:
    """`Q - Q A1^T (A1 Q A1^T)^-1 A1 Q` with `Q = H^-1 Sigma H^-T`.

    With no rows in `A1` this is simply `Q`.

    Raises
    ------
    SingularH
        If `H` is not invertible.
    NotSPD
        If `Sigma` or `A1 Q A1^T` is not SPD.
    """
    H = np.asarray(H, dtype=np.float64)
    Sigma = np.asarray(Sigma, dtype=np.float64)
    A1 = np.asarray(A1, dtype=np.float64).reshape(-1, H.shape[0])
    Q = _q_matrix(_factor_h(H), Sigma)
    if A1.shape[0] == 0:
        return symmetrize(Q)
    QA1t = Q @ A1.T
    cov = Q - QA1t @ solve_spd(symmetrize(A1 @ QA1t), QA1t.T)
    return symmetrize(cov)


def ld_objective(p: LeastDistanceProblem, x: DenseVector) -> float:
    '''Evaluate `(Hx - h)^T Sigma^-1 (Hx - h)`.'''
    r = p.H @ np.asarray(x, dtype=np.float64) - p.h
    return float(r @ solve_spd(p.Sigma, r))


def solve_ld(p: LeastDistanceProblem) -> LDPhaseSolution:
    """Solve a least distance problem in closed form.

    ```
    x*  = H^-1 h + Q A1^T (A1 Q A1^T)^-1 (b1 - A1 H^-1 h)
    Cov = Q - Q A1^T (A1 Q A1^T)^-1 A1 Q
    ```

    with `Q = H^-1 Sigma H^-T`. `f*` is the objective evaluated at `x*`.

    Parameters
    ----------
    p : LeastDistanceProblem
        The problem.

    Returns
    -------
    LDPhaseSolution
        The solution.

    Raises
    ------
    ValueError
        `p` must be of type LeastDistanceProblem.
    NotSPD
        If `Sigma` is not SPD.
    SingularH
        If `H` is not invertible.
    RankDeficient
        If `A1` does not have full row rank.
    """
    if not isinstance(p, LeastDistanceProblem):
        raise ValueError('`p` must be of type LeastDistanceProblem.')
    _check_full_row_rank(p.A1)
    H_lu = _factor_h(p.H)
    Q = _q_matrix(H_lu, p.Sigma)
    x_free = sla.lu_solve(H_lu, p.h, check_finite=False)

    if p.A1.shape[0] == 0:
        x_star, cov = x_free, symmetrize(Q)
    else:
        QA1t = Q @ p.A1.T
        S = symmetrize(p.A1 @ QA1t)
        x_star = x_free + QA1t @ solve_spd(S, p.b1 - p.A1 @ x_free)
        cov = symmetrize(Q - QA1t @ solve_spd(S, QA1t.T))
    return LDPhaseSolution(x_star=x_star, cov=cov, f_star=ld_objective(p, x_star))


def solve_stacked_ld(p1: LeastDistanceProblem, A2: DenseMatrix, b2: DenseVector) -> LDPhaseSolution:
    '''Solve the Phase II least distance problem with `[A1; A2] x = [b1; b2]` directly.'''
    if not isinstance(p1, LeastDistanceProblem):
        raise ValueError('`p1` must be of type LeastDistanceProblem.')
    A2, b2 = _validate_new_constraints(p1.n, A2, b2)
    return solve_ld(
        LeastDistanceProblem(
            H=p1.H,
            Sigma=p1.Sigma,
            h=p1.h,
            A1=np.vstack([p1.A1, A2]),
            b1=np.concatenate([p1.b1, b2]),
        )
    )


def predict_delta_f_ld(sol: LDPhaseSolution, A2: DenseMatrix, b2: DenseVector) -> float:
    """Change of optimal value when `A2 x = b2` is added to a solved least distance problem.

    ```
    delta_f = (A2 x1* - b2)^T [A2 Cov(x1*) A2^T]^-1 (A2 x1* - b2)
    ```

    Exact in the linear case.

    Raises
    ------
    ValueError
        `sol` must be of type LDPhaseSolution.
    DimensionMismatch
        `A2`, `b2` and the solution are not conformal.
    SingularW
        If `A2 Cov(x1*) A2^T` is not invertible.
    """
    if not isinstance(sol, LDPhaseSolution):
        raise ValueError('`sol` must be of type LDPhaseSolution.')
    A2, b2 = _validate_new_constraints(sol.x_star.shape[0], A2, b2)
    residual = A2 @ sol.x_star - b2
    W = A2 @ sol.cov @ A2.T
    scale = np.linalg.norm(A2) ** 2 * np.linalg.norm(sol.cov)
    return change_of_optimal_value(residual, W, scale=scale)
