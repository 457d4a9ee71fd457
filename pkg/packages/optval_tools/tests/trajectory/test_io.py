import re

import numpy as np
import pytest

from optval_tools import trajectory


def _rows(t: trajectory.Trajectory) -> np.ndarray:
    return np.array([p.to_row() for p in t.variables])


def test_round_trip(tmp_path):
    t, _, _ = trajectory.simulate_pair(20, seed=11)
    path = tmp_path / 'A.csv'
    trajectory.write_trajectory(t, path)
    back = trajectory.read_trajectory(path)
    assert np.array_equal(_rows(back), _rows(t))
    for cov, expected in zip(back.edge_covs, t.edge_covs, strict=True):
        assert np.array_equal(cov, expected)

    lines = path.read_text(encoding='utf-8').splitlines()
    assert lines[0] == 'N_REL_POSES,19'
    assert len(lines) == 1 + 2 * 20
    assert len(lines[1].split(',')) == 12
    assert len(lines[-1].split(',')) == 36


def test_to_csv():
    t, _, _ = trajectory.simulate_pair(2, seed=0)
    text = trajectory.trajectory_to_csv(t)
    assert text.startswith('N_REL_POSES,1\n')
    assert text.endswith('\n')
    with pytest.raises(ValueError, match=re.escape('`t` must be of type Trajectory.')):
        trajectory.trajectory_to_csv(t.variables)


def test_read_errors(tmp_path):
    t, _, _ = trajectory.simulate_pair(3, seed=0)
    good = trajectory.trajectory_to_csv(t).splitlines()
    path = tmp_path / 'bad.csv'

    path.write_text('\n'.join(['N_POSES,2', *good[1:]]), encoding='utf-8')
    with pytest.raises(
        ValueError, match=re.escape('The first line must read "N_REL_POSES,<N>", got "N_POSES,2"')
    ):
        trajectory.read_trajectory(path)

    path.write_text('', encoding='utf-8')
    with pytest.raises(ValueError, match=re.escape('got ""')):
        trajectory.read_trajectory(path)

    path.write_text('\n'.join(good[:-1]), encoding='utf-8')
    with pytest.raises(ValueError, match=re.escape('Expected 3 covariance lines, got 2.')):
        trajectory.read_trajectory(path)

    long_pose = good[1] + ',0.0'
    path.write_text('\n'.join([good[0], long_pose, *good[2:]]), encoding='utf-8')
    with pytest.raises(ValueError, match=re.escape('Expected 3 pose lines of 12 numbers')):
        trajectory.read_trajectory(path)

    not_a_rotation = ','.join(['2'] + good[1].split(',')[1:])
    path.write_text('\n'.join([good[0], not_a_rotation, *good[2:]]), encoding='utf-8')
    with pytest.raises(ValueError, match=re.escape('`rotation` must be orthonormal')):
        trajectory.read_trajectory(path)
