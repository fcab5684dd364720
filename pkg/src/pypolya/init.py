#!/usr/bin/env python3
"""
pypolya init: Initialize starter files.
"""

import argparse
import json
from pathlib import Path
from typing import Optional

from pypolya import config, util
from pypolya.errors import ValidationError

# ----------------------
# Init: Model config
# ----------------------


def _ini_value(value) -> str:
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    return str(value)


def model_config_text(fmt: str) -> str:
    """Starter config holding every model setting at its default."""
    defaults = config.default_model_dict()
    if fmt == 'json':
        return json.dumps({config.MODEL_SECTION_NAME: defaults}, indent=2) + '\n'
    if fmt == 'ini':
        lines = [f'[{config.MODEL_SECTION_NAME}]']
        lines += [f'{key} = {_ini_value(value)}' for key, value in defaults.items()]
        return '\n'.join(lines) + '\n'
    raise ValidationError(f'Config file type must be ini or json, got {fmt!r}')


def init_config(output: Path, fmt: Optional[str] = None) -> None:
    fmt = fmt or output.suffix[1:].lower() or 'ini'
    text = model_config_text(fmt)
    if str(output) == '-':
        util.write_text(text)
    else:
        output.write_text(text, encoding='utf-8')


# ----------------------
# Parser setup
# ----------------------


def setup_parser(parser: argparse.ArgumentParser) -> None:
    sub = parser.add_subparsers(dest='init_command', required=True)

    p_config = sub.add_parser('config', help='Initialize a model config file')
    p_config.add_argument(
        '-o', '--output', type=Path, required=True, help='Output path (or - for stdout)'
    )
    p_config.add_argument(
        '--format', choices=['ini', 'json'], help='Default: from the output suffix'
    )
    p_config.set_defaults(func=run)


def run(args: argparse.Namespace) -> None:
    if args.init_command == 'config':
        init_config(args.output, args.format)
