import json

import pytest

from optval_tools import cli
from optval_tools.cli._module_bench import GRID_COLUMNS


def test_simulate_then_predict(tmp_path, capsys):
    out = tmp_path / 'sim'
    assert cli.main(['simulate', '--poses', '6', '--seed', '3', '--out', str(out)]) == 0
    assert capsys.readouterr().out == ''
    assert len(list(out.iterdir())) == 4

    argv = [
        'predict',
        '--traj-a',
        str(out / 'traj_a.csv'),
        '--traj-b',
        str(out / 'traj_b.csv'),
        '--pair',
        '2,5',
    ]
    assert cli.main(argv) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ','.join(GRID_COLUMNS)
    assert len(lines) == 2
    assert lines[1].startswith('2,5,')


def test_report_flag(capsys):
    assert cli.main(['predict', '--poses', '5', '--pair', '1,1', '--report']) == 0
    out = capsys.readouterr().out
    assert '# Predicting the alignment cost' in out
    assert '(pair (1,1), simulated, seed 0)' in out


def test_config_file(tmp_path, capsys):
    path = tmp_path / 'config.json'
    path.write_text(json.dumps({'n_poses': 4, 'mode': 'predict', 'jobs': 1}), encoding='utf-8')
    assert cli.main(['sweep', '--config', str(path), '--stride', '2']) == 0
    captured = capsys.readouterr()
    lines = captured.out.splitlines()
    # pose indices 1 and 3 on both sides
    assert len(lines) == 1 + 4
    summary = captured.err.splitlines()[-1]
    assert summary.startswith('summary,n_pairs=4,n_failed=0,rel_error_max=nan,')
    assert ',predict_total_s=' in summary

    out = tmp_path / 'grid.csv'
    assert cli.main(['sweep', '--config', str(path), '--out', str(out)]) == 0
    captured = capsys.readouterr()
    assert captured.out == ''
    assert captured.err.startswith('summary,n_pairs=16,')


def test_usage_errors(tmp_path, capsys):
    assert cli.main(['predict', '--poses', '5']) == 2
    err = capsys.readouterr().err
    assert err.startswith('usage: optval')
    assert err.splitlines()[-1] == 'error,UsageError,A pair is required (--pair l,r).'

    assert cli.main(['predict', '--poses', '5', '--pair', '3']) == 2
    assert capsys.readouterr().err.splitlines()[-1] == (
        'error,UsageError,A pair must read "l,r", got "3".'
    )

    path = tmp_path / 'config.json'
    path.write_text(json.dumps({'colour': 'red'}), encoding='utf-8')
    assert cli.main(['sweep', '--config', str(path)]) == 2
    assert capsys.readouterr().err.splitlines()[-1] == (
        "error,UsageError,Unknown configuration keys: ['colour']."
    )

    assert cli.main(['bench', '--lengths', '']) == 2
    capsys.readouterr()

    with pytest.raises(SystemExit) as e:
        cli.main(['guess'])
    assert e.value.code == 2


def test_errors(tmp_path, capsys):
    assert cli.main(['predict', '--poses', '5', '--pair', '9,1']) == 1
    assert capsys.readouterr().err == (
        'error,IndexOutOfRange,`l`=9 outside of trajectory A with 5 poses.\n'
    )

    missing = str(tmp_path / 'missing.csv')
    assert cli.main(['predict', '--pair', '1,1', '--traj-a', missing, '--traj-b', missing]) == 1
    assert capsys.readouterr().err.startswith('error,FileNotFoundError,')

    bad = tmp_path / 'bad.csv'
    bad.write_text('N_POSES,1\n', encoding='utf-8')
    assert cli.main(['predict', '--pair', '1,1', '--traj-a', str(bad), '--traj-b', str(bad)]) == 1
    assert capsys.readouterr().err.startswith('error,ValueError,The first line must read')
