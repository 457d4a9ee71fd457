import math

import numpy as np

from .. import liegroup as lg
from ._module_model import Trajectory

__all__ = ['DEFAULT_TRANS_NOISE', 'DEFAULT_ROT_NOISE', 'noise_covariance', 'simulate_pair']

DEFAULT_TRANS_NOISE = 0.1
DEFAULT_ROT_NOISE = 0.01
DEFAULT_MAX_HEADING = math.pi / 4


def noise_covariance(trans_noise_std: float, rot_noise_std: float) -> np.ndarray:
    """`diag(trans^2 I3, rot^2 I3)` in (rho, phi) order.

    A zero standard deviation falls back to its default (0.1 m, 0.01 rad) so the covariance
    stays SPD for noise free simulations.
    """
    trans = trans_noise_std if trans_noise_std > 0 else DEFAULT_TRANS_NOISE
    rot = rot_noise_std if rot_noise_std > 0 else DEFAULT_ROT_NOISE
    return np.diag([trans**2] * 3 + [rot**2] * 3)


def _planar_step(heading: float, trans_step: float) -> lg.Pose:
    # rotate by `heading`, then move `trans_step` forward along the new x axis
    c, s = math.cos(heading), math.sin(heading)
    R = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return lg.Pose(rotation=R, translation=R @ np.array([trans_step, 0.0, 0.0]))


def _perturb(pose: lg.Pose, eps: np.ndarray) -> lg.Pose:
    return pose if not np.any(eps) else lg.boxplus(pose, eps)


def simulate_pair(
    n_poses: int,
    trans_step: float = 1.0,
    rot_noise_std: float = DEFAULT_ROT_NOISE,
    trans_noise_std: float = DEFAULT_TRANS_NOISE,
    seed: int = 0,
    max_heading: float = DEFAULT_MAX_HEADING,
) -> tuple[Trajectory, Trajectory, tuple[Trajectory, Trajectory]]:
    """Simulate two noisy trajectories that intersect in the middle.

    Every step rotates the robot by a heading drawn uniformly in `(-max_heading, max_heading)`
    around z, then moves it `trans_step` forward. Trajectory B is rigidly moved so that its
    middle pose (index `ceil(n_poses / 2)`, 1-based) equals the middle pose of A. Noise is
    applied on the right of the head and of every relative pose, `T Exp(eps)`, with
    `eps ~ N(0, diag(trans^2 I3, rot^2 I3))`.

    Parameters
    ----------
    n_poses : int
        Number of absolute poses per trajectory (N+1), at least 2.
    trans_step : float, optional
        Forward motion per step in meters, by default 1.0.
    rot_noise_std : float, optional
        Rotational noise in radians, by default 0.01.
    trans_noise_std : float, optional
        Translational noise in meters, by default 0.1.
    seed : int, optional
        Seed of `numpy.random.default_rng`, by default 0.
    max_heading : float, optional
        Bound of the random headings, by default pi/4.

    Returns
    -------
    tuple[Trajectory, Trajectory, tuple[Trajectory, Trajectory]]
        Noisy A, noisy B and the noise free (A, B). All carry the noise covariance.

    Raises
    ------
    ValueError
        If `n_poses < 2` or a standard deviation is negative.
    """
    if isinstance(n_poses, bool) or not isinstance(n_poses, (int, np.integer)) or n_poses < 2:
        raise ValueError('`n_poses` must be an integer >= 2.')
    if trans_noise_std < 0 or rot_noise_std < 0:
        raise ValueError('Noise standard deviations must be non negative.')
    if max_heading < 0:
        raise ValueError('`max_heading` must be non negative.')

    rng = np.random.default_rng(seed)
    n_rel = n_poses - 1
    headings_a = rng.uniform(-max_heading, max_heading, size=n_rel)
    headings_b = rng.uniform(-max_heading, max_heading, size=n_rel)
    std = np.array([trans_noise_std] * 3 + [rot_noise_std] * 3)
    noise_a = rng.standard_normal((n_poses, 6)) * std
    noise_b = rng.standard_normal((n_poses, 6)) * std

    cov = noise_covariance(trans_noise_std, rot_noise_std)
    covs = [cov] * n_poses

    rel_a = [_planar_step(h, trans_step) for h in headings_a]
    rel_b = [_planar_step(h, trans_step) for h in headings_b]
    truth_a = Trajectory(head=lg.Pose.identity(), rel_poses=rel_a, edge_covs=covs)
    b_unplaced = Trajectory(head=lg.Pose.identity(), rel_poses=rel_b, edge_covs=covs)

    middle = math.ceil(n_poses / 2)
    offset = truth_a.poses[middle - 1] @ b_unplaced.poses[middle - 1].inverse()
    truth_b = Trajectory(head=offset @ b_unplaced.head, rel_poses=rel_b, edge_covs=covs)

    noisy_a = Trajectory.from_variables(
        [_perturb(p, e) for p, e in zip(truth_a.variables, noise_a)], covs
    )
    noisy_b = Trajectory.from_variables(
        [_perturb(p, e) for p, e in zip(truth_b.variables, noise_b)], covs
    )
    return noisy_a, noisy_b, (truth_a, truth_b)
