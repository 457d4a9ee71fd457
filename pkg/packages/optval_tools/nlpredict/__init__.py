__all__ = [
    'SOLVER_TOL',
    'MAX_ITERATIONS',
    'Manifold',
    'EuclideanSpace',
    'SE3',
    'SE3Product',
    'manifold_of',
    'Constraint',
    'LinearConstraint',
    'evaluate_constraint',
    'linearize_constraint',
    'ManifoldProblem',
    'NLPhaseSolution',
    'solve_nl',
    'predict_delta_f_nl',
    'predict_many',
]

from ._module_constraints import (
    Constraint,
    LinearConstraint,
    evaluate_constraint,
    linearize_constraint,
)
from ._module_manifold import SE3, EuclideanSpace, Manifold, SE3Product, manifold_of
from ._module_predict import predict_delta_f_nl, predict_many
from ._module_solve import MAX_ITERATIONS, SOLVER_TOL, ManifoldProblem, NLPhaseSolution, solve_nl
