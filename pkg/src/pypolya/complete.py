#!/usr/bin/env python3
"""
complete.py - Turn a draws file into a file of completed mixture densities.

Usage:
    complete.py galaxies.draws.ndjson -o galaxies.mixtures.ndjson
    complete.py draws.ndjson --eps 0.05 --ups 0.05 --workers 4 > mixtures.ndjson
"""

import argparse
import signal
import sys
from typing import Optional, Sequence

from pypolya import records, util
from pypolya.completion import CompletionConfig, complete_all

signal.signal(signal.SIGPIPE, signal.SIG_DFL)


def setup_parser(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('draws', type=util.existing_file, help='Draws file from fit')
    parser.add_argument(
        '--eps', type=float, default=0.01, help='Unassigned stick mass bound'
    )
    parser.add_argument(
        '--ups',
        type=float,
        default=0.01,
        help='Probability the truncation misses the eps bound',
    )
    parser.add_argument('--seed', type=int, default=0, help='Random seed')
    parser.add_argument(
        '--workers', type=util.positive_int, default=1, help='Worker processes'
    )
    parser.add_argument('-o', '--out', help='Output mixtures file (default: stdout)')
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> None:
    run_file = records.read_run(args.draws, kind=records.DRAWS)
    completion = CompletionConfig(args.eps, args.ups, args.seed).validate()
    mixtures = complete_all(
        run_file.draws, run_file.model, completion, workers=args.workers
    )
    records.write_mixtures(
        args.out, run_file.model, completion, run_file.data, mixtures
    )


def main(argv: Optional[Sequence[str]] = None) -> None:
    if argv is None:
        argv = sys.argv[1:]
    parser = argparse.ArgumentParser(description='Polya completion of posterior draws')
    setup_parser(parser)
    args = parser.parse_args(argv)
    args.func(args)


if __name__ == '__main__':
    main()
