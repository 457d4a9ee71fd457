__all__ = [
    'errors',
    'linalg',
    'leastnorm',
    'leastdist',
    'liegroup',
    'nlpredict',
    'trajectory',
    'cli',
]

from . import cli, errors, leastdist, leastnorm, liegroup, linalg, nlpredict, trajectory
