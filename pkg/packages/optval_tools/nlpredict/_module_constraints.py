from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from ..errors import DimensionMismatch, EvaluationFailure, OptvalError
from ..linalg import DenseMatrix, DenseVector, as_matrix, as_vector
from ._module_manifold import Manifold, manifold_of

__all__ = [
    'FD_STEP',
    'Constraint',
    'LinearConstraint',
    'evaluate_constraint',
    'linearize_constraint',
]

# Central finite difference step, in tangent space units.
FD_STEP = 1e-6


@dataclass(frozen=True)
class Constraint:
    """An equality constraint `C(x) = 0` on a manifold.

    Attributes
    ----------
    function : Callable[[Any], array_like]
        `C(x)`, a residual vector of fixed length.
    jacobian : Callable[[Any], array_like] | None
        Optional analytic `A = -dC(x boxplus xi)/d xi` at `xi = 0`, shape (len(C(x)), dim).
        Without it `linearize_constraint` uses central finite differences.
    name : str
        Used in error messages and reports.
    """

    function: Callable[[Any], Any]
    jacobian: Callable[[Any], Any] | None = None
    name: str = 'C'

    def __post_init__(self) -> None:
        if not callable(self.function):
            raise ValueError('`function` must be callable.')
        if self.jacobian is not None and not callable(self.jacobian):
            raise ValueError('`jacobian` must be callable or None.')

    def __call__(self, x: Any) -> DenseVector:
        return evaluate_constraint(self, x)


class LinearConstraint(Constraint):
    '''`C(x) = b - A x` on a Euclidean space, so that the linearization gives back `(A, b)`.'''

    def __init__(self, A: DenseMatrix, b: DenseVector, name: str = 'linear') -> None:
        A = as_matrix(A, 'A')
        b = as_vector(np.asarray(b, dtype=np.float64).reshape(-1), 'b')
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatch(f'`A` has {A.shape[0]} rows but `b` has {b.shape[0]} entries.')
        super().__init__(
            function=lambda x: b - A @ np.asarray(x, dtype=np.float64),
            jacobian=lambda x: A,
            name=name,
        )
        object.__setattr__(self, 'A', A)
        object.__setattr__(self, 'b', b)


def evaluate_constraint(C: Constraint, x: Any) -> DenseVector:
    """Evaluate `C(x)` as a 1-D float array.

    Raises
    ------
    EvaluationFailure
        If the constraint function raises a foreign exception or returns non finite values.
        Errors of this package (like NearPiRotation) propagate unchanged.
    """
    try:
        value = np.asarray(C.function(x), dtype=np.float64).reshape(-1)
    except OptvalError:
        raise
    except Exception as e:
        raise EvaluationFailure(f'Constraint `{C.name}` could not be evaluated: {e}') from e
    if not np.all(np.isfinite(value)):
        raise EvaluationFailure(f'Constraint `{C.name}` returned non finite values.')
    return value


def _finite_difference_jacobian(
    C: Constraint, x: Any, manifold: Manifold, m: int, step: float
) -> np.ndarray:
    n = manifold.dim(x)
    A = np.empty((m, n))
    e = np.zeros(n)
    for k in range(n):
        e[k] = step
        c_plus = evaluate_constraint(C, manifold.boxplus(x, e))
        e[k] = -step
        c_minus = evaluate_constraint(C, manifold.boxplus(x, e))
        e[k] = 0.0
        A[:, k] = -(c_plus - c_minus) / (2.0 * step)
    return A


def linearize_constraint(
    C: Constraint,
    x: Any,
    manifold: Manifold = None,
    step: float = FD_STEP,
) -> tuple[DenseMatrix, DenseVector]:
    """Linearize a constraint at `x`: `C(x boxplus xi) ~ b - A xi`.

    Parameters
    ----------
    C : Constraint
        The constraint.
    x : Any
        Linearization point.
    manifold : Manifold, optional
        Manifold of `x`, by default inferred with `manifold_of`.
    step : float, optional
        Finite difference step when `C` has no analytic Jacobian, by default 1e-6.

    Returns
    -------
    tuple[DenseMatrix, DenseVector]
        `A = -dC(x boxplus xi)/d xi` at 0 and `b = C(x)`.

    Raises
    ------
    ValueError
        `C` must be of type Constraint.
    EvaluationFailure
        If `C` cannot be evaluated.
    DimensionMismatch
        If an analytic Jacobian has the wrong shape.
    """
    if not isinstance(C, Constraint):
        raise ValueError('`C` must be of type Constraint.')
    if manifold is None:
        manifold = manifold_of(x)
    b = evaluate_constraint(C, x)
    m, n = b.shape[0], manifold.dim(x)
    if C.jacobian is None:
        A = _finite_difference_jacobian(C, x, manifold, m, step)
    else:
        try:
            A = np.asarray(C.jacobian(x), dtype=np.float64)
        except OptvalError:
            raise
        except Exception as e:
            raise EvaluationFailure(f'Jacobian of `{C.name}` could not be evaluated: {e}') from e
        if A.shape != (m, n):
            raise DimensionMismatch(f'Jacobian of `{C.name}` must be {m}x{n}, got {A.shape}.')
    return A, b
