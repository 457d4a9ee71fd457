import io
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import pandas as pd
import scipy.linalg as sla

from .. import _report_formatting as f
from ..errors import DimensionMismatch, NoConvergence, NotSPD, RankDeficient
from ..leastdist import explicit_covariance
from ..linalg import DenseMatrix, as_matrix, symmetrize
from ._module_constraints import Constraint, linearize_constraint
from ._module_manifold import Manifold, manifold_of

__all__ = [
    'SOLVER_TOL',
    'MAX_ITERATIONS',
    'ManifoldProblem',
    'NLPhaseSolution',
    'solve_nl',
]

SOLVER_TOL = 1e-10
MAX_ITERATIONS = 100
MAX_STEP_HALVINGS = 30

_HISTORY_COLUMNS = ['iteration', 'f', 'constraint_norm', 'step_norm', 'alpha', 'merit', 'mu']


@dataclass(frozen=True, eq=False)
class ManifoldProblem:
    """`min ||x boxminus x_tilde||^2_Sigma  s.t. C_k(x) = 0` for every constraint.

    Attributes
    ----------
    x_tilde : Any
        The measurement, a point of `manifold`.
    Sigma : DenseMatrix
        SPD weight in the tangent space of `x_tilde`.
    constraints : tuple[Constraint, ...]
        Phase I constraints, possibly empty.
    manifold : Manifold
        By default inferred from `x_tilde`.
    """

    x_tilde: Any
    Sigma: DenseMatrix
    constraints: Sequence[Constraint] = ()
    manifold: Manifold = None

    def __post_init__(self) -> None:
        manifold = manifold_of(self.x_tilde) if self.manifold is None else self.manifold
        if not isinstance(manifold, Manifold):
            raise ValueError('`manifold` must be of type Manifold.')
        constraints = tuple(self.constraints)
        if not all(isinstance(c, Constraint) for c in constraints):
            raise ValueError('`constraints` must only contain Constraint objects.')
        Sigma = as_matrix(self.Sigma, 'Sigma')
        n = manifold.dim(self.x_tilde)
        if Sigma.shape != (n, n):
            raise DimensionMismatch(f'`Sigma` must be {n}x{n}, got {Sigma.shape}.')
        object.__setattr__(self, 'manifold', manifold)
        object.__setattr__(self, 'constraints', constraints)
        object.__setattr__(self, 'Sigma', Sigma)

    @property
    def n(self) -> int:
        return self.manifold.dim(self.x_tilde)


@dataclass(frozen=True, eq=False)
class NLPhaseSolution:
    """Solution of a ManifoldProblem.

    `cov` is given in the tangent space of `x_star`; it is None when the solver was asked not
    to compute it.
    """

    x_star: Any
    cov: DenseMatrix | None
    f_star: float
    manifold: Manifold = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.manifold is None:
            object.__setattr__(self, 'manifold', manifold_of(self.x_star))
        if self.cov is not None:
            object.__setattr__(self, 'cov', as_matrix(self.cov, 'cov'))


def _linearize_all(p: ManifoldProblem, x: Any) -> tuple[np.ndarray, np.ndarray]:
    n = p.n
    if len(p.constraints) == 0:
        return np.zeros((0, n)), np.zeros(0)
    pieces = [linearize_constraint(C, x, p.manifold) for C in p.constraints]
    return np.vstack([A for A, _ in pieces]), np.concatenate([b for _, b in pieces])


def _constraint_values(p: ManifoldProblem, x: Any) -> np.ndarray:
    if len(p.constraints) == 0:
        return np.zeros(0)
    return np.concatenate([C(x) for C in p.constraints])


def _solve_kkt(B: np.ndarray, A: np.ndarray, g: np.ndarray, c: np.ndarray):
    # [[B, A^T], [A, 0]] [xi; nu] = [g; c]
    n, m = B.shape[0], A.shape[0]
    K = np.zeros((n + m, n + m))
    K[:n, :n] = B
    K[:n, n:] = A.T
    K[n:, :n] = A
    try:
        sol = sla.solve(K, np.concatenate([g, c]), assume_a='sym', check_finite=False)
    except (np.linalg.LinAlgError, sla.LinAlgError) as e:
        raise RankDeficient(f'The linearized constraints are rank deficient: {e}') from e
    if not np.all(np.isfinite(sol)):
        raise RankDeficient('The linearized constraints are rank deficient.')
    return sol[:n], sol[n:]


def solve_nl(
    p: ManifoldProblem,
    init: Any = None,
    tol: float = SOLVER_TOL,
    max_iterations: int = MAX_ITERATIONS,
    with_covariance: bool = True,
    report_print: bool = False,
) -> NLPhaseSolution:
    """Solve a ManifoldProblem by sequential linearization.

    At each iterate the residual `x boxminus x_tilde` and the constraints are linearized in the
    tangent space, the resulting linear least distance problem is solved exactly through its KKT
    system and the step is retracted with boxplus. The step is halved (up to 30 times) until the
    merit `f + mu ||C||_1` does not increase, `mu` being kept above twice the largest multiplier.

    Parameters
    ----------
    p : ManifoldProblem
        The problem.
    init : Any, optional
        Starting point, by default `p.x_tilde`.
    tol : float, optional
        Convergence when the step and the constraint residual are both below `tol` in max norm,
        by default 1e-10.
    max_iterations : int, optional
        By default 100.
    with_covariance : bool, optional
        Whether to assemble the covariance of the solution from the last linearization, by
        default True.
    report_print : bool, optional
        Whether to print the iteration report, by default False.

    Returns
    -------
    NLPhaseSolution
        `diagnostics` holds:
        <ul>
        <li><b>'iterations'</b>: int. Accepted steps, 0 if the start is optimal.</li>
        <li><b>'converged'</b>: bool.</li>
        <li><b>'history'</b>: pd.DataFrame, one row per accepted step.</li>
        <li><b>'report'</b>: str. The generated report, stored even if it wasn't printed.</li>
        </ul>

    Raises
    ------
    ValueError
        `p` must be of type ManifoldProblem.
    NotSPD
        If `Sigma` is not SPD.
    RankDeficient
        If the linearized constraints lose full row rank.
    NoConvergence
        If the tolerance is not met, `.solution` holds the last iterate.
    """
    if not isinstance(p, ManifoldProblem):
        raise ValueError('`p` must be of type ManifoldProblem.')
    if tol <= 0:
        raise ValueError('`tol` must be positive.')
    if max_iterations < 1:
        raise ValueError('`max_iterations` must be a positive integer.')

    M = p.manifold
    try:
        sigma_factor = sla.cho_factor(symmetrize(p.Sigma), lower=True, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise NotSPD(f'`Sigma` is not positive definite: {e}') from e

    def objective(x):
        r = M.boxminus(x, p.x_tilde)
        return float(r @ sla.cho_solve(sigma_factor, r, check_finite=False)), r

    stream = io.StringIO()
    f.print_title(
        1,
        'Solving constrained least distance problem',
        subtitle=f'{p.n} tangent dimensions, {len(p.constraints)} constraint(s)',
        file=stream,
    )

    x = p.x_tilde if init is None else init
    mu = 0.0
    history = []
    converged = False
    f_x, r = objective(x)
    for iteration in range(1, max_iterations + 1):
        A, c = _linearize_all(p, x)
        H = M.diff_jacobian(x, p.x_tilde)
        sigma_inv_H = sla.cho_solve(sigma_factor, H, check_finite=False)
        B = symmetrize(H.T @ sigma_inv_H)
        xi, nu = _solve_kkt(B, A, sigma_inv_H.T @ r, c)

        c_norm = float(np.max(np.abs(c))) if c.size else 0.0
        step_norm = float(np.max(np.abs(xi))) if xi.size else 0.0
        if max(step_norm, c_norm) < tol:
            converged = True
            break

        if nu.size:
            mu = max(mu, 2.0 * float(np.max(np.abs(nu))) + 1.0)
        merit = f_x + mu * float(np.sum(np.abs(c)))
        slack = 1e-12 * max(1.0, merit)
        alpha = 1.0
        for _ in range(MAX_STEP_HALVINGS + 1):
            x_new = M.boxplus(x, alpha * xi)
            f_new, r_new = objective(x_new)
            merit_new = f_new + mu * float(np.sum(np.abs(_constraint_values(p, x_new))))
            if merit_new <= merit + slack:
                break
            alpha *= 0.5
        else:
            f.print_event(1, f'Line search failed at iteration {iteration}', ok=False, file=stream)
            break
        x, f_x, r = x_new, f_new, r_new
        history.append([iteration, f_x, c_norm, step_norm, alpha, merit_new, mu])

    # iterations count the accepted steps, 0 when the start is already optimal
    iterations = len(history)
    history_df = pd.DataFrame(history, columns=_HISTORY_COLUMNS)
    if len(history_df):
        f.print_frame(1, history_df, file=stream)
    diagnostics = {'iterations': iterations, 'converged': converged, 'history': history_df}

    if not converged:
        f.print_result(f'😓 No convergence after {iterations} iteration(s)', file=stream)
        diagnostics['report'] = stream.getvalue()
        if report_print is True:
            print(stream.getvalue(), end='')
        best = NLPhaseSolution(
            x_star=x, cov=None, f_star=f_x, manifold=M, diagnostics=diagnostics
        )
        raise NoConvergence(
            f'No convergence to {tol:g} after {iterations} iteration(s).',
            solution=best,
            diagnostics=diagnostics,
        )

    f.print_result(f'✅ Converged after {iterations} iteration(s), f* = {f_x:.9g}', file=stream)
    diagnostics['report'] = stream.getvalue()
    if report_print is True:
        print(stream.getvalue(), end='')

    cov = None
    if with_covariance:
        A, _ = _linearize_all(p, x)
        cov = explicit_covariance(M.diff_jacobian(x, p.x_tilde), p.Sigma, A)
    return NLPhaseSolution(x_star=x, cov=cov, f_star=f_x, manifold=M, diagnostics=diagnostics)
