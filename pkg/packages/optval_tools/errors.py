"""Exceptions raised by optval_tools.

All of them derive from `ValueError` (through `OptvalError`) so a caller that only catches
`ValueError`, like for argument validation, also catches numerical failures.
"""

__all__ = [
    'OptvalError',
    'DimensionMismatch',
    'NotSPD',
    'SingularBlock',
    'RankDeficient',
    'SingularW',
    'SingularH',
    'NearPiRotation',
    'EvaluationFailure',
    'NoConvergence',
    'IndexOutOfRange',
]


class OptvalError(ValueError):
    '''Base class for every error raised by this package.'''


class DimensionMismatch(OptvalError):
    '''Operands have non conformal shapes.'''


class NotSPD(OptvalError):
    '''A matrix expected to be symmetric positive definite is not.'''


class SingularBlock(OptvalError):
    '''The leading block of a Schur decomposition is not invertible.'''


class RankDeficient(OptvalError):
    '''A constraint matrix does not have full row rank.'''


class SingularW(OptvalError):
    '''`A2 Cov(x1*) A2^T` failed the SPD factorization.

    The new constraint rows depend on the row space of the previous ones, so the change of
    optimal value cannot be computed.
    '''


class SingularH(OptvalError):
    '''The measurement matrix `H` of a least distance problem is not invertible.'''


class NearPiRotation(OptvalError):
    '''A rotation angle is too close to pi, the logarithm is ambiguous there.'''


class EvaluationFailure(OptvalError):
    '''A constraint function could not be evaluated or returned non finite values.'''


class NoConvergence(OptvalError):
    """The iterative solver stopped before reaching its tolerance.

    Attributes
    ----------
    solution : object
        The best iterate found, same type as the solver's regular return value.
    diagnostics : dict
        Iteration information, includes a 'report' key.
    """

    def __init__(self, message: str, solution=None, diagnostics: dict = None) -> None:
        super().__init__(message)
        self.solution = solution
        self.diagnostics = {} if diagnostics is None else diagnostics


class IndexOutOfRange(OptvalError):
    '''A pose index is outside of a trajectory.'''
