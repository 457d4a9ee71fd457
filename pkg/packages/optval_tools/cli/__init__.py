"""Command line front end: `optval {simulate,predict,solve,sweep,bench} [options]`.

Flags explicitly given win over the `--config` JSON file, which wins over the defaults of
RunConfig. Tables go to `--out` when given, to stdout otherwise. On failure a single line
`error,<ExceptionClass>,<message>` is printed on stderr and the exit code is 1 (2 for usage
errors). `sweep` also prints its summary on stderr as `summary,<name>=<value>,...`.
"""

import argparse
import sys

from ..errors import OptvalError
from ..trajectory import MODES
from ._module_bench import rel_error_distribution, summarize_grid, summary_line
from ._module_commands import (
    COMMANDS,
    cmd_bench,
    cmd_predict,
    cmd_simulate,
    cmd_solve,
    cmd_sweep,
    sweep_pairs,
    write_table,
)
from ._module_config import RunConfig, UsageError, build_config, load_config_file, parse_lengths

__all__ = [
    'main',
    'build_parser',
    'RunConfig',
    'UsageError',
    'build_config',
    'load_config_file',
    'parse_lengths',
    'cmd_simulate',
    'cmd_predict',
    'cmd_solve',
    'cmd_sweep',
    'cmd_bench',
    'sweep_pairs',
    'write_table',
    'summarize_grid',
    'summary_line',
    'rel_error_distribution',
]

_HELP = {
    'simulate': 'simulate a noisy trajectory pair and write it to the --out directory',
    'predict': 'predicted alignment cost of one --pair',
    'solve': 'solved and predicted alignment cost of one --pair',
    'sweep': 'evaluate every pose pair, one grid row per pair',
    'bench': 'timing table and relative error distribution per trajectory length',
}

# (flag, RunConfig field, argparse options)
_FLAGS = [
    ('--poses', 'n_poses', dict(type=int, help='absolute poses per trajectory')),
    ('--trans-noise', 'trans_noise_std', dict(type=float, help='translational noise, meters')),
    ('--rot-noise', 'rot_noise_std', dict(type=float, help='rotational noise, radians')),
    ('--seed', 'seed', dict(type=int, help='simulation seed')),
    ('--mode', 'mode', dict(choices=MODES, help='sweep mode')),
    ('--pair', 'pair', dict(help='pose pair "l,r", 1-based')),
    ('--out', 'out', dict(help='output file, or directory for simulate')),
    ('--jobs', 'jobs', dict(type=int, help='worker processes, default all cores')),
    ('--traj-a', 'traj_a', dict(help='trajectory A file instead of simulating')),
    ('--traj-b', 'traj_b', dict(help='trajectory B file instead of simulating')),
    ('--stride', 'stride', dict(type=int, help='sweep every k-th pose index')),
    ('--lengths', 'lengths', dict(help='bench lengths, comma separated')),
    ('--step', 'trans_step', dict(type=float, help='forward motion per step, meters')),
    ('--max-heading', 'max_heading', dict(type=float, help='bound of random headings, radians')),
]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    for flag, dest, options in _FLAGS:
        common.add_argument(flag, dest=dest, default=None, **options)
    common.add_argument('--config', default=None, help='JSON file with RunConfig fields')
    common.add_argument('--report', action='store_true', help='print the report on stdout')

    parser = argparse.ArgumentParser(
        prog='optval',
        description='Predict the cost of aligning two trajectories without re-solving.',
    )
    subparsers = parser.add_subparsers(dest='command', required=True)
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[common], help=_HELP[name])
    return parser


def _print_error(e: Exception) -> None:
    message = ' '.join(str(e).split())
    print(f'error,{type(e).__name__},{message}', file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    """Run the command line, returning the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        flags = {dest: getattr(args, dest) for _, dest, _ in _FLAGS}
        if flags['lengths'] is not None:
            flags['lengths'] = parse_lengths(flags['lengths'])
        cfg = build_config(flags, args.config)
        df, metadata = COMMANDS[args.command](cfg)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        _print_error(e)
        return 2
    except (OptvalError, ValueError, OSError) as e:
        _print_error(e)
        return 1
    if cfg.out is None:
        sys.stdout.write(write_table(df))
    if args.command == 'sweep':
        print(summary_line(metadata['variables']), file=sys.stderr)
    if args.report:
        sys.stdout.write(metadata['report'])
    return 0
