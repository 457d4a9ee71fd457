import io
import re
import textwrap

import pandas as pd

WIDTH = 100
_STATUS = {True: '✅ ', False: '😓 ', None: ''}


def fill(txt: str, initial_indent: str, subsequent_indent: str, width: int = WIDTH) -> str:
    '''A wrapper for `textwrap.fill` that keeps the text's own whitespace.'''
    return textwrap.fill(
        txt,
        initial_indent=initial_indent,
        subsequent_indent=subsequent_indent,
        width=width,
        expand_tabs=False,
        replace_whitespace=False,
        drop_whitespace=False,
    )


def print_title(level: int, title: str, subtitle: str = None, file: io.StringIO = None) -> None:
    """Print a title for the report.

    Parameters
    ----------
    level : int
        Indentation level, 1 is the initial level.
    title : str
        The title.
    subtitle : str, optional
        A subtitle, by default None.
    file : io.StringIO, optional
        Same as in `print()`, by default None.
    """
    print('————————————————————', file=file)
    title_ii = f'{"#" * level} '
    title_si = f'{" " * level} '
    print(fill(title, initial_indent=title_ii, subsequent_indent=title_si), file=file)
    if subtitle is not None:
        indent = f'{" " * level} '
        print(fill(f'({subtitle})', initial_indent=indent, subsequent_indent=indent), file=file)


def return_result(result: str) -> str:
    '''Return the result string, so results always read the same way.'''
    return f'<<< {result} >>>'


def print_result(result: str, file: io.StringIO = None) -> None:
    print(fill(return_result(result), initial_indent='', subsequent_indent='    '), file=file)


def print_event(level: int, event: str, ok: bool | None = None, file: io.StringIO = None) -> None:
    """Print an event, optionally marked as a success (`ok=True`) or a problem (`ok=False`).

    Parameters
    ----------
    level : int
        Indentation level, 1 is the initial level.
    event : str
        The event.
    ok : bool | None, optional
        Status mark, by default None (no mark).
    file : io.StringIO, optional
        Same as in `print()`, by default None.
    """
    prefix = '  ' * (level - 1)
    print(
        fill(f'{_STATUS[ok]}{event}', initial_indent=f'{prefix}> ', subsequent_indent=f'{prefix}  '),
        file=file,
    )


def print_values(level: int, values: dict, file: io.StringIO = None) -> None:
    '''Print one `name: value` event per item, names aligned, floats with 6 significant digits.'''
    if not values:
        return
    width = max(len(str(k)) for k in values)
    for name, value in values.items():
        shown = f'{value:.6g}' if isinstance(value, float) else str(value)
        print_event(level, f'{str(name):<{width}}: {shown}', file=file)


def print_frame(level: int, df: pd.DataFrame, file: io.StringIO = None) -> None:
    '''Print a DataFrame indented at `level`, without its index.'''
    indent = '  ' * level
    txt = df.to_string(index=False, float_format=lambda v: f'{v:.6g}')
    print(re.sub('^', indent, txt, flags=re.MULTILINE), file=file)
