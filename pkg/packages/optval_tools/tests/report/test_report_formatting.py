import io

import pandas as pd

from optval_tools import _report_formatting as f

from ..formatting import (
    _fn_ret_and_output,
    _return_print_event,
    _return_print_result,
    _return_print_title,
)


def test_print_title():
    _, out = _fn_ret_and_output(f.print_title, 1, 'Some title')
    assert out == _return_print_title(1, 'Some title')
    _, out = _fn_ret_and_output(f.print_title, 2, 'Some title', subtitle='a subtitle')
    assert out == _return_print_title(2, 'Some title', 'a subtitle')
    assert out.splitlines()[1:] == ['## Some title', '   (a subtitle)']


def test_print_event_and_result():
    for ok in (True, False, None):
        _, out = _fn_ret_and_output(f.print_event, 2, 'Something happened', ok=ok)
        assert out == _return_print_event(2, 'Something happened', ok)
    _, out = _fn_ret_and_output(f.print_event, 1, 'Done', ok=True)
    assert out == '> ✅ Done\n'

    _, out = _fn_ret_and_output(f.print_result, 'f* = 1')
    assert out == _return_print_result('f* = 1')
    assert f.return_result('x') == '<<< x >>>'


def test_long_event_wraps():
    event = ' '.join(['word'] * 40)
    _, out = _fn_ret_and_output(f.print_event, 1, event)
    lines = out.splitlines()
    assert len(lines) > 1
    assert all(len(line) <= f.WIDTH for line in lines)
    assert lines[1].startswith('  ')


def test_print_values():
    stream = io.StringIO()
    f.print_values(1, {'n_pairs': 4, 'rel_error_max': 0.0123456789, 'ok': None}, file=stream)
    assert stream.getvalue() == (
        '> n_pairs      : 4\n' '> rel_error_max: 0.0123457\n' '> ok           : None\n'
    )
    _, out = _fn_ret_and_output(f.print_values, 1, {})
    assert out == ''


def test_print_frame():
    df = pd.DataFrame({'n_poses': [20, 50], 'speedup': [12.345678, 40.0]})
    stream = io.StringIO()
    f.print_frame(1, df, file=stream)
    lines = stream.getvalue().splitlines()
    assert len(lines) == 3
    assert all(line.startswith('  ') for line in lines)
    assert lines[0].split() == ['n_poses', 'speedup']
    assert lines[1].split() == ['20', '12.3457']
    assert lines[2].split() == ['50', '40']
