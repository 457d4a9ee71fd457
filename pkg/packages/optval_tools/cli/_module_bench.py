import numpy as np
import pandas as pd

__all__ = [
    'GRID_COLUMNS',
    'BENCH_COLUMNS',
    'TIMING_COLUMNS',
    'rel_error_distribution',
    'summarize_grid',
    'summary_line',
    'bench_row',
]

GRID_COLUMNS = ['l', 'r', 'delta_f', 'f_real', 'rel_error', 't_predict', 't_solve', 'error']
BENCH_COLUMNS = [
    'n_poses',
    'n_pairs',
    'predict_total_s',
    'solve_total_s',
    'predict_avg_s',
    'solve_avg_s',
    'speedup',
    'rel_err_min',
    'rel_err_q1',
    'rel_err_median',
    'rel_err_q3',
    'rel_err_max',
    'n_outliers',
    'n_failed',
]
# Wall clock columns, written with microsecond resolution and not reproducible between runs.
TIMING_COLUMNS = [
    't_predict',
    't_solve',
    'predict_total_s',
    'solve_total_s',
    'predict_avg_s',
    'solve_avg_s',
    'speedup',
]


def rel_error_distribution(rel_error: pd.Series) -> dict:
    """Boxplot data of a relative error column.

    Outliers lie more than 1.5 interquartile ranges beyond the quartiles.

    Returns
    -------
    dict
        'rel_err_min', 'rel_err_q1', 'rel_err_median', 'rel_err_q3', 'rel_err_max' and
        'n_outliers'. NaN everywhere (and 0 outliers) for an empty column.
    """
    values = pd.to_numeric(rel_error, errors='coerce').dropna()
    keys = ['rel_err_min', 'rel_err_q1', 'rel_err_median', 'rel_err_q3', 'rel_err_max']
    if values.empty:
        return {**dict.fromkeys(keys, np.nan), 'n_outliers': 0}
    q1, median, q3 = values.quantile([0.25, 0.5, 0.75]).to_list()
    iqr = q3 - q1
    outliers = (values < q1 - 1.5 * iqr) | (values > q3 + 1.5 * iqr)
    return {
        'rel_err_min': float(values.min()),
        'rel_err_q1': float(q1),
        'rel_err_median': float(median),
        'rel_err_q3': float(q3),
        'rel_err_max': float(values.max()),
        'n_outliers': int(outliers.sum()),
    }


def summarize_grid(grid: pd.DataFrame) -> dict:
    '''Totals and relative error extremes of a sweep grid.'''
    rel_error = pd.to_numeric(grid['rel_error'], errors='coerce').dropna()
    return {
        'n_pairs': int(len(grid)),
        'n_failed': int(grid['error'].notna().sum()),
        'rel_error_max': float(rel_error.max()) if len(rel_error) else np.nan,
        'rel_error_median': float(rel_error.median()) if len(rel_error) else np.nan,
        'predict_total_s': float(grid['t_predict'].sum(min_count=1)),
        'solve_total_s': float(grid['t_solve'].sum(min_count=1)),
    }


def summary_line(summary: dict) -> str:
    '''`summary,n_pairs=400,n_failed=0,rel_error_max=0.0912,...`, floats with 6 significant digits.'''
    values = [f'{k}={v:.6g}' if isinstance(v, float) else f'{k}={v}' for k, v in summary.items()]
    return ','.join(['summary', *values])


def bench_row(n_poses: int, grid: pd.DataFrame) -> dict:
    '''One row of the timing table from the sweep grid of a trajectory length.'''
    summary = summarize_grid(grid)
    n_pairs = summary['n_pairs']
    predict_avg = summary['predict_total_s'] / n_pairs if n_pairs else np.nan
    solve_avg = summary['solve_total_s'] / n_pairs if n_pairs else np.nan
    speedup = solve_avg / predict_avg if predict_avg and predict_avg > 0 else np.nan
    return {
        'n_poses': n_poses,
        'n_pairs': n_pairs,
        'predict_total_s': summary['predict_total_s'],
        'solve_total_s': summary['solve_total_s'],
        'predict_avg_s': predict_avg,
        'solve_avg_s': solve_avg,
        'speedup': speedup,
        **rel_error_distribution(grid['rel_error']),
        'n_failed': summary['n_failed'],
    }
