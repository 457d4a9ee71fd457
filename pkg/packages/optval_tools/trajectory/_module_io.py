"""Trajectory CSV files.

```
N_REL_POSES,<N>
<N+1 pose lines: 12 numbers, rotation row-major then translation; head first>
<N+1 covariance lines: 36 numbers, 6x6 row-major in (rho, phi) order; head first>
```

Numbers are written with 17 significant digits so a file round trips exactly.
"""

import io
from pathlib import Path

import numpy as np
import pandas as pd

from .. import liegroup as lg
from ..linalg import CSV_FLOAT_FORMAT
from ._module_model import Trajectory

__all__ = ['HEADER_KEY', 'write_trajectory', 'read_trajectory', 'trajectory_to_csv']

HEADER_KEY = 'N_REL_POSES'


def trajectory_to_csv(t: Trajectory) -> str:
    '''The CSV text of `t`, see the module documentation for the layout.'''
    if not isinstance(t, Trajectory):
        raise ValueError('`t` must be of type Trajectory.')
    stream = io.StringIO()
    stream.write(f'{HEADER_KEY},{t.n_rel}\n')
    options = dict(header=False, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    pd.DataFrame([p.to_row() for p in t.variables]).to_csv(stream, **options)
    pd.DataFrame([cov.ravel() for cov in t.edge_covs]).to_csv(stream, **options)
    return stream.getvalue()


def write_trajectory(t: Trajectory, path) -> None:
    Path(path).write_text(trajectory_to_csv(t), encoding='utf-8')


def _read_section(lines: list[str], rows: int, cols: int, what: str) -> np.ndarray:
    if len(lines) != rows or rows == 0:
        raise ValueError(f'Expected {rows} {what} lines, got {len(lines)}.')
    df = pd.read_csv(
        io.StringIO('\n'.join(lines)),
        header=None,
        float_precision='round_trip',
        dtype=np.float64,
    )
    if df.shape != (rows, cols):
        raise ValueError(f'Expected {rows} {what} lines of {cols} numbers, got shape {df.shape}.')
    return df.to_numpy()


def read_trajectory(path) -> Trajectory:
    """Read a trajectory written by `write_trajectory`.

    Raises
    ------
    ValueError
        If the file does not follow the layout.
    """
    lines = Path(path).read_text(encoding='utf-8').splitlines()
    first = lines[0] if lines else ''
    key, _, value = first.strip().partition(',')
    if key != HEADER_KEY or not value.strip().isdigit():
        raise ValueError(f'The first line must read "{HEADER_KEY},<N>", got "{first.strip()}".')
    n_poses = int(value) + 1
    poses = _read_section(lines[1 : 1 + n_poses], n_poses, 12, 'pose')
    covs = _read_section(lines[1 + n_poses :], n_poses, 36, 'covariance')
    return Trajectory.from_variables(
        [lg.Pose.from_row(row) for row in poses],
        [row.reshape(6, 6) for row in covs],
    )
