"""SE(3) primitives: exponential and logarithm maps, adjoint, left Jacobian, boxplus/boxminus.

Conventions
-----------
- A twist is ordered (rho, phi): translational part first, rotational part second.
- `T boxplus xi = T Exp(xi)` (right perturbation).
- `T1 boxminus T2 = Log(T1^-1 T2)`, i.e. T2 measured in the frame of T1.
- The left Jacobian `J_l(eta)` satisfies `Exp(J_l(eta) d) Exp(eta) ~ Exp(eta + d)`.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NearPiRotation
from .linalg import DenseMatrix, DenseVector, as_vector

__all__ = [
    'Twist',
    'Pose',
    'hat3',
    'vee3',
    'exp',
    'log',
    'adjoint',
    'left_jacobian',
    'left_jacobian_inv',
    'boxplus',
    'boxminus',
    'orthonormalize',
    'cumulative_compose',
    'chain_compose',
]

# Below this angle exp/log use Taylor series of their coefficients.
SMALL_ANGLE = 1e-8
# The Jacobian coefficients lose precision much earlier, see `_jacobian_coefficients`.
JACOBIAN_SERIES_ANGLE = 1e-2
# trace(R) must stay above -1 + PI_MARGIN for the logarithm to be unambiguous.
PI_MARGIN = 1e-9
ORTHONORMAL_ATOL = 1e-10
REORTHONORMALIZE_EVERY = 100


@dataclass(frozen=True, eq=False)
class Twist:
    '''Tangent vector of SE(3), `rho` translational (meters), `phi` rotational (radians).'''

    rho: DenseVector
    phi: DenseVector

    def __post_init__(self) -> None:
        rho = as_vector(self.rho, 'rho')
        phi = as_vector(self.phi, 'phi')
        if rho.shape != (3,) or phi.shape != (3,):
            raise DimensionMismatch('`rho` and `phi` must have 3 entries each.')
        object.__setattr__(self, 'rho', rho)
        object.__setattr__(self, 'phi', phi)

    @classmethod
    def from_vector(cls, v) -> 'Twist':
        v = np.asarray(v, dtype=np.float64).reshape(-1)
        if v.shape != (6,):
            raise DimensionMismatch(f'A twist vector must have 6 entries, got {v.shape[0]}.')
        return cls(rho=v[:3], phi=v[3:])

    @classmethod
    def zero(cls) -> 'Twist':
        return cls(rho=np.zeros(3), phi=np.zeros(3))

    @property
    def vector(self) -> DenseVector:
        return np.concatenate([self.rho, self.phi])

    @property
    def angle(self) -> float:
        return float(np.linalg.norm(self.phi))


@dataclass(frozen=True, eq=False)
class Pose:
    """Rigid transformation `x -> R x + t`.

    The constructor checks `R^T R = I` and `det(R) = 1` to 1e-10. Products of valid poses are
    built without re-checking.
    """

    rotation: DenseMatrix
    translation: DenseVector

    def __post_init__(self) -> None:
        R = np.array(self.rotation, dtype=np.float64)
        t = np.array(self.translation, dtype=np.float64).reshape(-1)
        if R.shape != (3, 3) or t.shape != (3,):
            raise DimensionMismatch('`rotation` must be 3x3 and `translation` of length 3.')
        if not (np.all(np.isfinite(R)) and np.all(np.isfinite(t))):
            raise ValueError('`rotation` and `translation` must contain only finite values.')
        if (
            np.max(np.abs(R.T @ R - np.eye(3))) > ORTHONORMAL_ATOL
            or abs(np.linalg.det(R) - 1.0) > ORTHONORMAL_ATOL
        ):
            raise ValueError('`rotation` must be orthonormal with determinant +1.')
        self._set(R, t)

    def _set(self, R: np.ndarray, t: np.ndarray) -> None:
        R.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, 'rotation', R)
        object.__setattr__(self, 'translation', t)

    @classmethod
    def _unchecked(cls, R: np.ndarray, t: np.ndarray) -> 'Pose':
        pose = object.__new__(cls)
        pose._set(np.array(R, dtype=np.float64), np.array(t, dtype=np.float64))
        return pose

    @classmethod
    def identity(cls) -> 'Pose':
        return cls._unchecked(np.eye(3), np.zeros(3))

    @classmethod
    def from_matrix(cls, M) -> 'Pose':
        M = np.asarray(M, dtype=np.float64)
        if M.shape != (4, 4):
            raise DimensionMismatch(f'A homogeneous transform must be 4x4, got {M.shape}.')
        if np.max(np.abs(M[3] - [0.0, 0.0, 0.0, 1.0])) > ORTHONORMAL_ATOL:
            raise ValueError('The last row of a homogeneous transform must be [0, 0, 0, 1].')
        return cls(rotation=M[:3, :3], translation=M[:3, 3])

    @classmethod
    def from_row(cls, row: Sequence[float]) -> 'Pose':
        '''Inverse of `to_row`: 12 numbers, rotation row-major then translation.'''
        row = np.asarray(row, dtype=np.float64).reshape(-1)
        if row.shape != (12,):
            raise DimensionMismatch(f'A pose row must have 12 numbers, got {row.shape[0]}.')
        return cls(rotation=row[:9].reshape(3, 3), translation=row[9:])

    def to_row(self) -> DenseVector:
        return np.concatenate([self.rotation.ravel(), self.translation])

    def matrix(self) -> DenseMatrix:
        M = np.eye(4)
        M[:3, :3] = self.rotation
        M[:3, 3] = self.translation
        return M

    def inverse(self) -> 'Pose':
        Rt = self.rotation.T
        return Pose._unchecked(Rt, -Rt @ self.translation)

    def compose(self, other: 'Pose') -> 'Pose':
        return Pose._unchecked(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def __matmul__(self, other: 'Pose') -> 'Pose':
        if not isinstance(other, Pose):
            return NotImplemented
        return self.compose(other)

    def allclose(self, other: 'Pose', atol: float = 1e-9) -> bool:
        return bool(
            np.allclose(self.rotation, other.rotation, rtol=0.0, atol=atol)
            and np.allclose(self.translation, other.translation, rtol=0.0, atol=atol)
        )

    def __repr__(self) -> str:
        return f'Pose(rotation={self.rotation.tolist()}, translation={self.translation.tolist()})'


def _as_twist_vector(xi) -> np.ndarray:
    if isinstance(xi, Twist):
        return xi.vector
    v = np.asarray(xi, dtype=np.float64).reshape(-1)
    if v.shape != (6,):
        raise DimensionMismatch(f'A twist vector must have 6 entries, got {v.shape[0]}.')
    return v


def hat3(v) -> DenseMatrix:
    '''Skew symmetric matrix `[v]x` such that `[v]x w = v x w`.'''
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee3(M) -> DenseVector:
    '''Inverse of `hat3`.'''
    return np.array([M[2, 1], M[0, 2], M[1, 0]])


def _exp_coefficients(theta: float) -> tuple[float, float, float]:
    # sin(t)/t, (1 - cos(t))/t^2, (t - sin(t))/t^3
    if theta < SMALL_ANGLE:
        t2 = theta * theta
        return (
            1.0 - t2 / 6.0 + t2 * t2 / 120.0,
            0.5 - t2 / 24.0 + t2 * t2 / 720.0,
            1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0,
        )
    s = math.sin(theta)
    half = math.sin(0.5 * theta)
    return s / theta, 2.0 * half * half / theta**2, (theta - s) / theta**3


def _so3_jacobian(K: np.ndarray, b: float, c: float) -> np.ndarray:
    return np.eye(3) + b * K + c * (K @ K)


def _so3_jacobian_inv_coefficient(theta: float) -> float:
    # (1 - (t/2) cot(t/2)) / t^2
    if theta < JACOBIAN_SERIES_ANGLE:
        t2 = theta * theta
        return 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
    half = 0.5 * theta
    return (1.0 - half * math.cos(half) / math.sin(half)) / theta**2


def exp(xi) -> Pose:
    """Exponential map of SE(3).

    Parameters
    ----------
    xi : Twist | array_like
        The twist, (rho, phi).

    Returns
    -------
    Pose
        `R = I + A K + B K^2`, `t = (I + B K + C K^2) rho` with `K = [phi]x`.
    """
    v = _as_twist_vector(xi)
    rho, phi = v[:3], v[3:]
    theta = float(np.linalg.norm(phi))
    a, b, c = _exp_coefficients(theta)
    K = hat3(phi)
    K2 = K @ K
    R = np.eye(3) + a * K + b * K2
    V = np.eye(3) + b * K + c * K2
    return Pose._unchecked(R, V @ rho)


def log(T: Pose) -> Twist:
    """Logarithm map of SE(3), inverse of `exp` for rotation angles below pi.

    Raises
    ------
    ValueError
        `T` must be of type Pose.
    NearPiRotation
        If `trace(R) <= -1 + 1e-9`.
    """
    if not isinstance(T, Pose):
        raise ValueError('`T` must be of type Pose.')
    R = T.rotation
    trace = float(np.trace(R))
    if trace <= -1.0 + PI_MARGIN:
        raise NearPiRotation(f'Rotation angle too close to pi (trace {trace:.12f}).')
    w = 0.5 * vee3(R - R.T)
    s = float(np.linalg.norm(w))
    theta = math.atan2(s, 0.5 * (trace - 1.0))
    if theta < SMALL_ANGLE:
        t2 = theta * theta
        phi = (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0) * w
    else:
        phi = (theta / s) * w
    K = hat3(phi)
    if theta < SMALL_ANGLE:
        t2 = theta * theta
        d = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
    else:
        d = _so3_jacobian_inv_coefficient(theta)
    V_inv = np.eye(3) - 0.5 * K + d * (K @ K)
    return Twist(rho=V_inv @ T.translation, phi=phi)


def adjoint(T: Pose) -> DenseMatrix:
    '''6x6 adjoint `[[R, [t]x R], [0, R]]`, so that `T Exp(xi) T^-1 = Exp(Ad(T) xi)`.'''
    R = T.rotation
    Ad = np.zeros((6, 6))
    Ad[:3, :3] = R
    Ad[:3, 3:] = hat3(T.translation) @ R
    Ad[3:, 3:] = R
    return Ad


def _jacobian_coefficients(theta: float) -> tuple[float, float, float]:
    # The closed forms below cancel catastrophically for small angles:
    # (t - sin t)/t^3, (t^2 + 2 cos t - 2)/(2 t^4), (2t - 3 sin t + t cos t)/(2 t^5)
    if theta < JACOBIAN_SERIES_ANGLE:
        t2 = theta * theta
        return (
            1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0,
            1.0 / 24.0 - t2 / 720.0 + t2 * t2 / 40320.0,
            1.0 / 120.0 - t2 / 2520.0 + t2 * t2 / 120960.0,
        )
    s, c = math.sin(theta), math.cos(theta)
    return (
        (theta - s) / theta**3,
        (theta**2 + 2.0 * c - 2.0) / (2.0 * theta**4),
        (2.0 * theta - 3.0 * s + theta * c) / (2.0 * theta**5),
    )


def _translation_block(rho: np.ndarray, phi: np.ndarray, theta: float) -> np.ndarray:
    c1, c2, c3 = _jacobian_coefficients(theta)
    P = hat3(rho)
    K = hat3(phi)
    KP = K @ P
    PK = P @ K
    KPK = KP @ K
    KK = K @ K
    return (
        0.5 * P
        + c1 * (KP + PK + KPK)
        + c2 * (KK @ P + PK @ K - 3.0 * KPK)
        + c3 * (KPK @ K + K @ KPK)
    )


def left_jacobian(eta) -> DenseMatrix:
    '''6x6 left Jacobian `[[J, Q], [0, J]]` of SE(3) at `eta`.'''
    v = _as_twist_vector(eta)
    rho, phi = v[:3], v[3:]
    theta = float(np.linalg.norm(phi))
    _, b, c = _exp_coefficients(theta)
    J3 = _so3_jacobian(hat3(phi), b, c)
    Jl = np.zeros((6, 6))
    Jl[:3, :3] = J3
    Jl[:3, 3:] = _translation_block(rho, phi, theta)
    Jl[3:, 3:] = J3
    return Jl


def left_jacobian_inv(eta) -> DenseMatrix:
    """Inverse of the SE(3) left Jacobian, `[[J^-1, -J^-1 Q J^-1], [0, J^-1]]`.

    Raises
    ------
    NearPiRotation
        If the rotation angle of `eta` is not below `pi - 1e-9`.
    """
    v = _as_twist_vector(eta)
    rho, phi = v[:3], v[3:]
    theta = float(np.linalg.norm(phi))
    if theta >= math.pi - PI_MARGIN:
        raise NearPiRotation(f'Rotation angle {theta:.12f} too close to pi.')
    K = hat3(phi)
    J3_inv = np.eye(3) - 0.5 * K + _so3_jacobian_inv_coefficient(theta) * (K @ K)
    Jl_inv = np.zeros((6, 6))
    Jl_inv[:3, :3] = J3_inv
    Jl_inv[:3, 3:] = -J3_inv @ _translation_block(rho, phi, theta) @ J3_inv
    Jl_inv[3:, 3:] = J3_inv
    return Jl_inv


def boxplus(T: Pose, xi) -> Pose:
    '''`T Exp(xi)`.'''
    return T @ exp(xi)


def boxminus(T1: Pose, T2: Pose) -> Twist:
    '''`Log(T1^-1 T2)`.'''
    return log(T1.inverse() @ T2)


def orthonormalize(R) -> DenseMatrix:
    '''Closest rotation matrix to `R` (polar projection through the SVD).'''
    U, _, Vt = np.linalg.svd(np.asarray(R, dtype=np.float64))
    if np.linalg.det(U @ Vt) < 0.0:
        U[:, -1] = -U[:, -1]
    return U @ Vt


def cumulative_compose(
    poses: Sequence[Pose],
    reorthonormalize_every: int = REORTHONORMALIZE_EVERY,
) -> list[Pose]:
    """Prefix products `[P1, P1 P2, P1 P2 P3, ...]`, left to right.

    Every `reorthonormalize_every` compositions the running rotation is projected back onto
    SO(3) so that long chains do not drift.
    """
    if reorthonormalize_every < 1:
        raise ValueError('`reorthonormalize_every` must be a positive integer.')
    out: list[Pose] = []
    current = None
    for count, pose in enumerate(poses):
        if current is None:
            current = pose
        else:
            current = current @ pose
            if count % reorthonormalize_every == 0:
                current = Pose._unchecked(orthonormalize(current.rotation), current.translation)
        out.append(current)
    return out


def chain_compose(poses: Sequence[Pose]) -> Pose:
    '''Product `P1 P2 ... Pn` with the re-orthonormalization policy of `cumulative_compose`.'''
    if len(poses) == 0:
        return Pose.identity()
    return cumulative_compose(poses)[-1]
