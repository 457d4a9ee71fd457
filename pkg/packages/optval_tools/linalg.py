import numpy as np
import numpy.typing as npt
import pandas as pd
import scipy.linalg as sla

from .errors import DimensionMismatch, NotSPD, SingularBlock

__all__ = [
    'DenseMatrix',
    'DenseVector',
    'as_matrix',
    'as_vector',
    'symmetrize',
    'solve_spd',
    'symmetric_sqrt',
    'numerical_rank',
    'schur_decompose',
    'write_matrix_csv',
    'read_matrix_csv',
    'write_vector_csv',
    'read_vector_csv',
]

DenseMatrix = npt.NDArray[np.float64]
DenseVector = npt.NDArray[np.float64]

# Relative tolerance used to accept a matrix as symmetric.
SYMMETRY_RTOL = 1e-12

# 17 significant digits round trip every float64 exactly.
CSV_FLOAT_FORMAT = '%.17g'


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


def as_matrix(data, name: str = 'M') -> DenseMatrix:
    """Build a read-only 2-D float64 array, rejecting non finite values.

    Parameters
    ----------
    data : array_like
        Anything `np.asarray` accepts as a 2-D array.
    name : str, optional
        Name used in error messages, by default 'M'.

    Returns
    -------
    DenseMatrix
        A read-only copy of `data`.

    Raises
    ------
    ValueError
        `{name}` must be a 2-D array.
    ValueError
        `{name}` must contain only finite values.
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f'`{name}` must be a 2-D array.')
    if not np.all(np.isfinite(arr)):
        raise ValueError(f'`{name}` must contain only finite values.')
    return _frozen(arr)


def as_vector(data, name: str = 'v') -> DenseVector:
    """Build a read-only 1-D float64 array, rejecting non finite values.

    Parameters
    ----------
    data : array_like
        Anything `np.asarray` accepts as a 1-D array.
    name : str, optional
        Name used in error messages, by default 'v'.

    Returns
    -------
    DenseVector
        A read-only copy of `data`.

    Raises
    ------
    ValueError
        `{name}` must be a 1-D array.
    ValueError
        `{name}` must contain only finite values.
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f'`{name}` must be a 1-D array.')
    if not np.all(np.isfinite(arr)):
        raise ValueError(f'`{name}` must contain only finite values.')
    return _frozen(arr)


def symmetrize(M: DenseMatrix) -> DenseMatrix:
    '''Return `(M + M^T) / 2`.'''
    return 0.5 * (M + M.T)


def _check_symmetric(M: np.ndarray, name: str) -> None:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f'`{name}` must be square, got shape {M.shape}.')
    scale = np.linalg.norm(M)
    if np.linalg.norm(M - M.T) > SYMMETRY_RTOL * max(scale, np.finfo(float).tiny):
        raise NotSPD(f'`{name}` is not symmetric.')


def solve_spd(M: DenseMatrix, rhs: DenseMatrix | DenseVector) -> DenseMatrix | DenseVector:
    """Solve `M X = rhs` for a symmetric positive definite `M` using a Cholesky factorization.

    Parameters
    ----------
    M : DenseMatrix
        Symmetric positive definite matrix (n, n). Symmetry is checked to a relative 1e-12.
    rhs : DenseMatrix | DenseVector
        Right hand side, (n,) or (n, k).

    Returns
    -------
    DenseMatrix | DenseVector
        X, with the same shape as `rhs`.

    Raises
    ------
    DimensionMismatch
        If `M` is not square or `rhs` has a different number of rows.
    NotSPD
        If `M` is not symmetric or the factorization meets a non positive pivot.
    """
    M = np.asarray(M, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    _check_symmetric(M, 'M')
    if rhs.shape[0] != M.shape[0]:
        raise DimensionMismatch(
            f'`rhs` has {rhs.shape[0]} rows but `M` is {M.shape[0]}x{M.shape[1]}.'
        )
    if M.shape[0] == 0:
        return np.zeros_like(rhs)
    try:
        factor = sla.cho_factor(M, lower=True, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise NotSPD(f'Cholesky factorization failed: {e}') from e
    return sla.cho_solve(factor, rhs, check_finite=False)


def symmetric_sqrt(M: DenseMatrix) -> DenseMatrix:
    """Symmetric square root `S` of a symmetric positive definite matrix, `S @ S == M`.

    Computed from the eigendecomposition `M = V diag(w) V^T` as `V diag(sqrt(w)) V^T`.

    Raises
    ------
    NotSPD
        If `M` is not symmetric or has a non positive eigenvalue.
    """
    M = np.asarray(M, dtype=np.float64)
    _check_symmetric(M, 'M')
    if M.shape[0] == 0:
        return np.zeros_like(M)
    w, V = sla.eigh(M)
    if w[0] <= M.shape[0] * np.finfo(float).eps * abs(w[-1]) or w[0] <= 0.0:
        raise NotSPD(f'`M` is not positive definite (smallest eigenvalue {w[0]:.3e}).')
    return symmetrize((V * np.sqrt(w)) @ V.T)


def numerical_rank(M: DenseMatrix, tol: float | None = None) -> int:
    """Number of singular values of `M` above `tol`.

    Parameters
    ----------
    M : DenseMatrix
        Any 2-D matrix.
    tol : float | None, optional
        Cutoff, by default `max(rows, cols) * eps * largest_singular_value`.

    Returns
    -------
    int
        The numerical rank.

    Raises
    ------
    ValueError
        `tol` must be non negative.
    """
    M = np.asarray(M, dtype=np.float64)
    if tol is not None and tol < 0:
        raise ValueError('`tol` must be non negative.')
    if M.size == 0:
        return 0
    s = sla.svdvals(M, check_finite=False)
    if tol is None:
        tol = max(M.shape) * np.finfo(float).eps * s[0]
    return int(np.count_nonzero(s > tol))


def schur_decompose(
    U: DenseMatrix,
    P: DenseMatrix,
    Q: DenseMatrix,
    V: DenseMatrix,
) -> tuple[DenseMatrix, DenseMatrix, DenseMatrix]:
    """Block LDU factorization of `[[U, P], [Q, V]]` through the Schur complement of `U`.

    ```
    [[U, P],    [[I,      0],   [[U, 0            ],   [[I, U^-1 P],
     [Q, V]]  =  [Q U^-1, I]] @  [0, V - Q U^-1 P]] @   [0, I     ]]
    ```

    Returns
    -------
    tuple[DenseMatrix, DenseMatrix, DenseMatrix]
        (lower, block_diag, upper).

    Raises
    ------
    DimensionMismatch
        If the blocks are not conformal.
    SingularBlock
        If `U` is not invertible at working tolerance.
    """
    U, P, Q, V = (np.atleast_2d(np.asarray(m, dtype=np.float64)) for m in (U, P, Q, V))
    k = U.shape[0]
    p = V.shape[0]
    if (
        U.shape != (k, k)
        or V.shape != (p, p)
        or P.shape != (k, p)
        or Q.shape != (p, k)
    ):
        raise DimensionMismatch(
            f'Blocks are not conformal: U{U.shape}, P{P.shape}, Q{Q.shape}, V{V.shape}.'
        )
    if numerical_rank(U) < k:
        raise SingularBlock('`U` is not invertible.')

    lu = sla.lu_factor(U, check_finite=False)
    u_inv_p = sla.lu_solve(lu, P, check_finite=False)
    # Q U^-1 = (U^-T Q^T)^T
    q_u_inv = sla.lu_solve(lu, Q.T, trans=1, check_finite=False).T

    lower = np.block([[np.eye(k), np.zeros((k, p))], [q_u_inv, np.eye(p)]])
    block_diag = sla.block_diag(U, V - Q @ u_inv_p)
    upper = np.block([[np.eye(k), u_inv_p], [np.zeros((p, k)), np.eye(p)]])
    return lower, block_diag, upper


def write_matrix_csv(M: DenseMatrix, path) -> None:
    '''Write `M` as plain comma separated rows, no header, 17 significant digits.'''
    M = as_matrix(M)
    pd.DataFrame(M).to_csv(
        path, header=False, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n'
    )


def read_matrix_csv(path) -> DenseMatrix:
    '''Read a matrix written by `write_matrix_csv`.'''
    df = pd.read_csv(path, header=None, float_precision='round_trip', dtype=np.float64)
    return as_matrix(df.to_numpy())


def write_vector_csv(v: DenseVector, path) -> None:
    '''Write `v` with one value per line.'''
    write_matrix_csv(as_vector(v).reshape(-1, 1), path)


def read_vector_csv(path) -> DenseVector:
    '''Read a vector written by `write_vector_csv`.'''
    return as_vector(read_matrix_csv(path).ravel())
