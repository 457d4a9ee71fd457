from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from ..leastnorm import change_of_optimal_value
from ._module_constraints import Constraint, linearize_constraint
from ._module_solve import NLPhaseSolution

__all__ = ['predict_delta_f_nl', 'predict_many']


def predict_delta_f_nl(sol: NLPhaseSolution, C2: Constraint) -> float:
    """Approximate change of optimal value when `C2(x) = 0` is added to a solved problem.

    ```
    delta_f = C2(x1*)^T [A2 Cov(x1*) A2^T]^-1 C2(x1*),    A2 = -dC2(x1* boxplus xi)/d xi
    ```

    Exact when the manifold is flat and `C2` is linear.

    Parameters
    ----------
    sol : NLPhaseSolution
        Phase I solution, with its covariance.
    C2 : Constraint
        The new constraint.

    Returns
    -------
    float
        delta_f >= 0.

    Raises
    ------
    ValueError
        `sol` must be of type NLPhaseSolution with a covariance.
    SingularW
        If `A2 Cov(x1*) A2^T` is not invertible.
    """
    if not isinstance(sol, NLPhaseSolution):
        raise ValueError('`sol` must be of type NLPhaseSolution.')
    if sol.cov is None:
        raise ValueError('`sol` has no covariance, solve it with `with_covariance=True`.')
    A2, b2 = linearize_constraint(C2, sol.x_star, sol.manifold)
    W = A2 @ sol.cov @ A2.T
    scale = np.linalg.norm(A2) ** 2 * np.linalg.norm(sol.cov)
    return change_of_optimal_value(b2, W, scale=scale)


def predict_many(
    sol: NLPhaseSolution,
    candidates: Sequence[Constraint],
    max_workers: int | None = None,
) -> list[float]:
    """`predict_delta_f_nl` for many candidate constraints sharing one Phase I solution.

    Parameters
    ----------
    sol : NLPhaseSolution
        Phase I solution, only read.
    candidates : Sequence[Constraint]
        Candidate constraints.
    max_workers : int | None, optional
        Number of threads, by default None (sequential). Results keep the order of `candidates`.

    Returns
    -------
    list[float]
        One delta_f per candidate.
    """
    candidates = list(candidates)
    if max_workers is None or max_workers <= 1 or len(candidates) <= 1:
        return [predict_delta_f_nl(sol, C2) for C2 in candidates]
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(lambda C2: predict_delta_f_nl(sol, C2), candidates))
