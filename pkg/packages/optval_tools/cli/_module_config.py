import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from ..errors import OptvalError
from ..trajectory import MODES, AlignmentPair

__all__ = ['UsageError', 'RunConfig', 'parse_lengths', 'load_config_file', 'build_config']


class UsageError(ValueError):
    '''The command line or the configuration file asks for something impossible.'''


@dataclass(frozen=True)
class RunConfig:
    """Parameters of one CLI run.

    Attributes
    ----------
    n_poses : int
        Absolute poses per simulated trajectory, at least 2.
    trans_noise_std, rot_noise_std : float
        Simulation noise (meters, radians), non negative.
    seed : int
        Seed of the simulation.
    mode : str
        'predict', 'solve' or 'both'.
    out : str | None
        Output file (predict, solve, sweep, bench) or directory (simulate). None prints the table.
    pair : AlignmentPair | None
        Pair for predict and solve.
    jobs : int | None
        Worker processes of sweep and bench, None uses every available core.
    traj_a, traj_b : str | None
        Trajectory files to use instead of simulating.
    stride : int
        Sweep every `stride`-th pose index.
    lengths : tuple[int, ...]
        Trajectory lengths (absolute poses) of bench.
    trans_step : float
        Forward motion per simulated step, meters.
    max_heading : float
        Bound of the random headings, radians.
    """

    n_poses: int = 20
    trans_noise_std: float = 0.1
    rot_noise_std: float = 0.01
    seed: int = 0
    mode: str = 'both'
    out: str | None = None
    pair: AlignmentPair | None = None
    jobs: int | None = None
    traj_a: str | None = None
    traj_b: str | None = None
    stride: int = 1
    lengths: tuple[int, ...] = (20, 50)
    trans_step: float = 1.0
    max_heading: float = math.pi / 4

    def __post_init__(self) -> None:
        if isinstance(self.pair, (str, list, tuple)):
            object.__setattr__(self, 'pair', _as_pair(self.pair))
        object.__setattr__(self, 'lengths', tuple(int(n) for n in self.lengths))
        if self.n_poses < 2:
            raise UsageError('`n_poses` must be at least 2.')
        if self.trans_noise_std < 0 or self.rot_noise_std < 0:
            raise UsageError('Noise standard deviations must be non negative.')
        if self.mode not in MODES:
            raise UsageError(f'`mode` must be one of {MODES}, got "{self.mode}".')
        if self.stride < 1:
            raise UsageError('`stride` must be at least 1.')
        if self.jobs is not None and self.jobs < 1:
            raise UsageError('`jobs` must be at least 1.')
        if any(n < 2 for n in self.lengths):
            raise UsageError('Every bench length must be at least 2.')
        if (self.traj_a is None) != (self.traj_b is None):
            raise UsageError('`traj_a` and `traj_b` must be given together.')

    def as_dict(self) -> dict:
        values = asdict(self)
        values['pair'] = None if self.pair is None else f'{self.pair.l},{self.pair.r}'
        values['lengths'] = list(self.lengths)
        return values


_KEYS = {f.name for f in fields(RunConfig)}


def _as_pair(value) -> AlignmentPair:
    if isinstance(value, AlignmentPair):
        return value
    try:
        if isinstance(value, str):
            return AlignmentPair.parse(value)
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return AlignmentPair(l=value[0], r=value[1])
    except OptvalError:
        raise
    except ValueError as e:
        raise UsageError(str(e)) from e
    raise UsageError(f'`pair` must read "l,r" or be a list of two integers, got {value!r}.')


def parse_lengths(text: str) -> tuple[int, ...]:
    '''`"20,50,100"` -> `(20, 50, 100)`, an empty string gives `()`.'''
    parts = [part.strip() for part in str(text).split(',') if part.strip()]
    try:
        return tuple(int(part) for part in parts)
    except ValueError as e:
        raise UsageError(f'`lengths` must be comma separated integers, got "{text}".') from e


def load_config_file(path) -> dict:
    """Read a JSON object whose keys are RunConfig fields.

    Raises
    ------
    UsageError
        If the file is not a JSON object or has unknown keys.
    """
    try:
        values = json.loads(Path(path).read_text(encoding='utf-8'))
    except json.JSONDecodeError as e:
        raise UsageError(f'Configuration file {path} is not valid JSON: {e}') from e
    if not isinstance(values, dict):
        raise UsageError(f'Configuration file {path} must hold a JSON object.')
    unknown = sorted(set(values) - _KEYS)
    if unknown:
        raise UsageError(f'Unknown configuration keys: {unknown}.')
    if 'lengths' in values and isinstance(values['lengths'], str):
        values['lengths'] = parse_lengths(values['lengths'])
    return values


def build_config(flags: dict, config_path=None) -> RunConfig:
    """Merge defaults, a configuration file and explicit flags, in increasing priority.

    Parameters
    ----------
    flags : dict
        RunConfig fields given on the command line; None values count as not given.
    config_path : optional
        JSON configuration file, by default None.

    Returns
    -------
    RunConfig
        The merged configuration.
    """
    values = {}
    if config_path is not None:
        values.update(load_config_file(config_path))
    unknown = sorted(set(flags) - _KEYS)
    if unknown:
        raise UsageError(f'Unknown configuration keys: {unknown}.')
    values.update({k: v for k, v in flags.items() if v is not None})
    if values.get('pair') is not None:
        values['pair'] = _as_pair(values['pair'])
    return RunConfig(**values)
