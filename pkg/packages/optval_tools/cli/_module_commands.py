import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import pandas as pd

from .. import _report_formatting as f
from ..linalg import CSV_FLOAT_FORMAT
from ..trajectory import (
    AlignmentPair,
    PredictionReport,
    evaluate_pair,
    make_report,
    predict_alignment_cost,
    read_trajectory,
    simulate_pair,
    solve_alignment,
    write_trajectory,
)
from ._module_bench import BENCH_COLUMNS, GRID_COLUMNS, TIMING_COLUMNS, bench_row, summarize_grid
from ._module_config import RunConfig, UsageError

__all__ = [
    'SIMULATION_FILES',
    'COMMANDS',
    'sweep_pairs',
    'write_table',
    'cmd_simulate',
    'cmd_predict',
    'cmd_solve',
    'cmd_sweep',
    'cmd_bench',
]

SIMULATION_FILES = ('traj_a.csv', 'traj_b.csv', 'traj_a_truth.csv', 'traj_b_truth.csv')

_FLOAT_GRID_COLUMNS = ['delta_f', 'f_real', 'rel_error', 't_predict', 't_solve']


def _report_to_row(report: PredictionReport) -> dict:
    return {col: getattr(report, col) for col in GRID_COLUMNS}


def _grid_frame(rows: list[dict]) -> pd.DataFrame:
    grid = pd.DataFrame(rows, columns=GRID_COLUMNS)
    for col in _FLOAT_GRID_COLUMNS:
        grid[col] = pd.to_numeric(grid[col]).astype('float64')
    grid['l'] = grid['l'].astype('int64')
    grid['r'] = grid['r'].astype('int64')
    grid['error'] = grid['error'].astype('object')
    return grid


def write_table(df: pd.DataFrame, path=None) -> str:
    """CSV text of a result table, written to `path` when given.

    Timing columns get microsecond resolution, every other float 17 significant digits.
    """
    out = df.copy()
    for col in TIMING_COLUMNS:
        if col in out.columns:
            out[col] = out[col].map(lambda v: '' if pd.isna(v) else f'{v:.6f}')
    text = out.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
    return text


_WORKER_STATE = {}


def _init_worker(tA, tB, mode: str) -> None:
    _WORKER_STATE.update(tA=tA, tB=tB, mode=mode)


def _evaluate_in_worker(lr: tuple[int, int]) -> dict:
    l, r = lr
    state = _WORKER_STATE
    report = evaluate_pair(state['tA'], state['tB'], AlignmentPair(l=l, r=r), mode=state['mode'])
    return _report_to_row(report)


def sweep_pairs(tA, tB, mode: str, stride: int = 1, jobs: int | None = None) -> pd.DataFrame:
    """Evaluate every pair `(l, r)` with `l`, `r` stepping by `stride` from 1.

    Rows are ordered by `(l, r)` whatever the number of worker processes.

    Parameters
    ----------
    tA, tB : Trajectory
        The trajectories.
    mode : str
        'predict', 'solve' or 'both'.
    stride : int, optional
        Pose index step, by default 1.
    jobs : int | None, optional
        Worker processes, by default every available core. 1 runs in this process.

    Returns
    -------
    pd.DataFrame
        One row per pair, columns `GRID_COLUMNS`.
    """
    pairs = [
        (l, r)
        for l in range(1, tA.n_poses + 1, stride)
        for r in range(1, tB.n_poses + 1, stride)
    ]
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs == 1 or len(pairs) == 1:
        _init_worker(tA, tB, mode)
        rows = [_evaluate_in_worker(lr) for lr in pairs]
    else:
        chunksize = max(1, len(pairs) // (4 * jobs))
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_init_worker, initargs=(tA, tB, mode)
        ) as executor:
            rows = list(executor.map(_evaluate_in_worker, pairs, chunksize=chunksize))
    return _grid_frame(rows)


def _simulate(cfg: RunConfig, n_poses: int = None):
    return simulate_pair(
        cfg.n_poses if n_poses is None else n_poses,
        trans_step=cfg.trans_step,
        rot_noise_std=cfg.rot_noise_std,
        trans_noise_std=cfg.trans_noise_std,
        seed=cfg.seed,
        max_heading=cfg.max_heading,
    )


def _trajectories(cfg: RunConfig):
    if cfg.traj_a is not None:
        return read_trajectory(cfg.traj_a), read_trajectory(cfg.traj_b), 'read from files'
    tA, tB, _ = _simulate(cfg)
    return tA, tB, f'simulated, seed {cfg.seed}'


def _finish(cfg: RunConfig, df, variables: dict, stream: io.StringIO, report_print, write=True):
    if write and cfg.out is not None:
        write_table(df, cfg.out)
        f.print_event(1, f'Written to {cfg.out}', ok=True, file=stream)
    if report_print is True:
        print(stream.getvalue(), end='')
    return df, {'params': cfg.as_dict(), 'variables': variables, 'report': stream.getvalue()}


def cmd_simulate(cfg: RunConfig, report_print: bool = False) -> tuple[pd.DataFrame, dict]:
    """Simulate a trajectory pair and write the noisy and noise free files in `cfg.out`.

    Files: traj_a.csv, traj_b.csv, traj_a_truth.csv, traj_b_truth.csv.

    Returns
    -------
    tuple[pd.DataFrame, dict]
        One row per written file (file, n_poses, path) and the metadata: 'params', 'variables'
        and 'report'.

    Raises
    ------
    UsageError
        If `cfg.out` is None.
    """
    if cfg.out is None:
        raise UsageError('simulate needs an output directory (--out).')
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    tA, tB, (truth_a, truth_b) = _simulate(cfg)

    stream = io.StringIO()
    f.print_title(
        1,
        'Simulating a trajectory pair',
        subtitle=f'{cfg.n_poses} poses each, seed {cfg.seed}',
        file=stream,
    )
    rows = []
    for name, t in zip(SIMULATION_FILES, (tA, tB, truth_a, truth_b)):
        write_trajectory(t, out / name)
        rows.append({'file': name, 'n_poses': t.n_poses, 'path': str(out / name)})
        f.print_event(1, f'{name} written', ok=True, file=stream)
    df = pd.DataFrame(rows, columns=['file', 'n_poses', 'path'])
    files = [r['path'] for r in rows]
    return _finish(cfg, df, {'files': files}, stream, report_print, write=False)


def _single_pair(cfg: RunConfig, solve: bool, title: str, report_print: bool):
    if cfg.pair is None:
        raise UsageError('A pair is required (--pair l,r).')
    tA, tB, source = _trajectories(cfg)
    cfg.pair.check(tA, tB)
    start = time.perf_counter()
    delta_f = predict_alignment_cost(tA, tB, cfg.pair)
    t_predict = time.perf_counter() - start
    f_real = t_solve = None
    if solve:
        start = time.perf_counter()
        f_real, _ = solve_alignment(tA, tB, cfg.pair)
        t_solve = time.perf_counter() - start
    report = make_report(cfg.pair, delta_f, f_real=f_real, t_predict=t_predict, t_solve=t_solve)
    df = _grid_frame([_report_to_row(report)])

    stream = io.StringIO()
    f.print_title(1, title, subtitle=f'pair ({cfg.pair.l},{cfg.pair.r}), {source}', file=stream)
    variables = {k: v for k, v in _report_to_row(report).items() if v is not None}
    f.print_values(1, variables, file=stream)
    return _finish(cfg, df, variables, stream, report_print)


def cmd_predict(cfg: RunConfig, report_print: bool = False) -> tuple[pd.DataFrame, dict]:
    '''Predicted alignment cost of `cfg.pair`, one grid row.'''
    return _single_pair(cfg, False, 'Predicting the alignment cost', report_print)


def cmd_solve(cfg: RunConfig, report_print: bool = False) -> tuple[pd.DataFrame, dict]:
    '''Solved (and predicted) alignment cost of `cfg.pair`, one grid row with its relative error.'''
    return _single_pair(cfg, True, 'Solving the alignment problem', report_print)


def cmd_sweep(cfg: RunConfig, report_print: bool = False) -> tuple[pd.DataFrame, dict]:
    """Evaluate all pose pairs (every `cfg.stride`-th index) in `cfg.mode`.

    Per pair failures are recorded in the 'error' column and the sweep continues.

    Returns
    -------
    tuple[pd.DataFrame, dict]
        The grid (columns l, r, delta_f, f_real, rel_error, t_predict, t_solve, error) and the
        metadata, 'variables' holding the summary: n_pairs, n_failed, rel_error_max,
        rel_error_median, predict_total_s, solve_total_s.
    """
    tA, tB, source = _trajectories(cfg)
    grid = sweep_pairs(tA, tB, cfg.mode, stride=cfg.stride, jobs=cfg.jobs)
    summary = summarize_grid(grid)

    stream = io.StringIO()
    f.print_title(
        1,
        'Sweeping alignment pairs',
        subtitle=f'{summary["n_pairs"]} pairs, mode {cfg.mode}, {source}',
        file=stream,
    )
    f.print_values(1, summary, file=stream)
    if summary['n_failed']:
        f.print_event(1, f'{summary["n_failed"]} pair(s) failed', ok=False, file=stream)
    else:
        f.print_event(1, 'Every pair evaluated', ok=True, file=stream)
    if grid['delta_f'].notna().any():
        best = grid.loc[grid['delta_f'].idxmin()]
        f.print_result(
            f'Smallest predicted cost {best["delta_f"]:.6g} at ({best["l"]},{best["r"]})',
            file=stream,
        )
    return _finish(cfg, grid, summary, stream, report_print)


def cmd_bench(cfg: RunConfig, report_print: bool = False) -> tuple[pd.DataFrame, dict]:
    """Timing table: for every length of `cfg.lengths`, a full sweep in both modes.

    Trajectories are simulated with `cfg`'s noise and seed, `cfg.traj_a`/`cfg.traj_b` are not
    used.

    Raises
    ------
    UsageError
        If `cfg.lengths` is empty.
    """
    if len(cfg.lengths) == 0:
        raise UsageError('bench needs at least one trajectory length (--lengths).')
    stream = io.StringIO()
    f.print_title(
        1,
        'Benchmarking prediction against solving',
        subtitle=f'lengths {list(cfg.lengths)}, stride {cfg.stride}, seed {cfg.seed}',
        file=stream,
    )
    rows = []
    for n_poses in cfg.lengths:
        tA, tB, _ = _simulate(cfg, n_poses)
        grid = sweep_pairs(tA, tB, 'both', stride=cfg.stride, jobs=cfg.jobs)
        rows.append(bench_row(n_poses, grid))
        f.print_event(1, f'{n_poses} poses: {len(grid)} pairs', ok=True, file=stream)
    table = pd.DataFrame(rows, columns=BENCH_COLUMNS)
    f.print_frame(1, table[['n_poses', 'speedup', 'rel_err_median', 'rel_err_max']], file=stream)
    speedups = table['speedup'].to_numpy(dtype=np.float64)
    return _finish(cfg, table, {'speedups': speedups.tolist()}, stream, report_print)


COMMANDS = {
    'simulate': cmd_simulate,
    'predict': cmd_predict,
    'solve': cmd_solve,
    'sweep': cmd_sweep,
    'bench': cmd_bench,
}
