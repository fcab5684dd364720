import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Any, Iterable, Iterator

import numpy as np
from rich.console import Console
from rich.logging import RichHandler

from pypolya.errors import ValidationError

LOG_LEVELS = {0: logging.WARNING, 1: logging.INFO}

stderr_console = Console(stderr=True)


def setup_logging(verbosity: int = 0) -> None:
    """-v for INFO, -vv for DEBUG; everything goes to stderr."""
    level = LOG_LEVELS.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        level=level,
        format='%(message)s',
        datefmt='[%X]',
        handlers=[RichHandler(console=stderr_console, show_path=False)],
        force=True,
    )


def eprint(*args, **kwargs):
    print(*args, file=sys.stderr, **kwargs)


def existing_file(p: str) -> Path:
    p = Path(p)
    if not p.is_file():
        raise argparse.ArgumentTypeError(f'Path {p} must be an existing file')
    return p


def positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f'{value} must be a positive integer')
    return number


def nonnegative_int(value: str) -> int:
    number = int(value)
    if number < 0:
        raise argparse.ArgumentTypeError(f'{value} must be a nonnegative integer')
    return number


def read_values(path: Path) -> np.ndarray:
    """One real per line; blank lines and `#` comments are skipped."""
    values = []
    with open(path, encoding='utf-8') as f:
        for lineno, line in enumerate(f, 1):
            text = line.split('#', 1)[0].strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise ValidationError(
                    f'{path}:{lineno}: expected a number, got {text!r}'
                ) from None
    return np.asarray(values, dtype=float)


def _close_stdout():
    sys.stdout.flush()
    try:
        sys.stdout.close()
    except OSError:
        pass  # stdout already gone (e.g. piping into head)


def write_csv(
    rows: Iterable[dict], path: Path = None, fieldnames: list = None
) -> None:
    """Floats are written with 17 significant digits."""

    def formatted(row):
        return {
            k: format(v, '.17g') if isinstance(v, float) else v for k, v in row.items()
        }

    def dump(f):
        writer = csv.DictWriter(
            f, fieldnames=fieldnames, extrasaction='ignore', lineterminator='\n'
        )
        writer.writeheader()
        writer.writerows(formatted(row) for row in rows)

    if path is None or str(path) == '-':
        dump(sys.stdout)
        _close_stdout()
    else:
        with open(path, 'w', newline='') as f:
            dump(f)


def write_json(data: Any, path: Path = None, **json_kwargs) -> None:
    if path is None or str(path) == '-':
        json.dump(data, sys.stdout, **json_kwargs)
        sys.stdout.write('\n')
        _close_stdout()
    else:
        with open(path, 'w', newline='') as f:
            json.dump(data, f, **json_kwargs)
            f.write('\n')


def write_text(text: str, path: Path = None) -> None:
    if path is None or str(path) == '-':
        sys.stdout.write(text)
        _close_stdout()
    else:
        Path(path).write_text(text, encoding='utf-8')


def write_ndjson(records: Iterable[dict], path: Path = None) -> None:
    def dump(f):
        for record in records:
            f.write(json.dumps(record, allow_nan=False))
            f.write('\n')

    if path is None or str(path) == '-':
        dump(sys.stdout)
        _close_stdout()
    else:
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            dump(f)


def read_ndjson(path: Path) -> Iterator[dict]:
    with open(path, encoding='utf-8') as f:
        for line in f:
            if line.strip():
                yield json.loads(line)
