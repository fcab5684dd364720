#!/usr/bin/env python3
"""
simulate.py - Coverage study on mixtures drawn from the DP prior.

Usage:
    simulate.py --reps 50 --n 82 --iters 100 --burnin 500 --thin 10
    simulate.py --config model.ini --reps 10 --format txt
"""

import argparse
import signal
import sys
from typing import Optional, Sequence

from tabulate import tabulate

from pypolya import config, util
from pypolya.completion import CompletionConfig
from pypolya.simulation import MOMENT_METHODS, StudyResult, run_study

signal.signal(signal.SIGPIPE, signal.SIG_DFL)


def study_report(study: StudyResult) -> dict:
    return {
        'summary': study.summary(),
        'replications': [r.to_dict() for r in study.replications],
    }


def txt_report(study: StudyResult) -> str:
    summary = study.summary()
    rows = [
        ['marginal', summary['marginal_covers_truth'], summary['marginal_covers_truncated']],
        ['completed', summary['completed_covers_truth'], summary['completed_covers_truncated']],
    ]
    header = (
        f'Coverage of {summary["level"]:g} moment regions over '
        f'{summary["replications"]} replications (n={summary["n"]})\n\n'
    )
    table = tabulate(
        rows, headers=['Model', 'True moments', 'Truncated moments'], floatfmt='.3f'
    )
    return header + table + '\n'


def setup_parser(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        '--config', type=util.existing_file, help='Model config file (ini or json)'
    )
    parser.add_argument('--reps', type=util.nonnegative_int, default=50)
    parser.add_argument('--n', type=util.positive_int, default=82, help='Sample size')
    parser.add_argument('--level', type=float, default=0.95, help='Region level')
    parser.add_argument('--iters', type=util.nonnegative_int, help='Draws per chain')
    parser.add_argument('--burnin', type=util.nonnegative_int, help='Burn-in sweeps')
    parser.add_argument('--thin', type=util.positive_int, help='Sweeps per kept draw')
    parser.add_argument('--fix-alpha', type=float, help='Hold alpha at this value')
    parser.add_argument('--fix-mu', type=float, help='Hold mu at this value')
    parser.add_argument('--fix-tau', type=float, help='Hold tau at this value')
    parser.add_argument('--no-remix', action='store_true')
    parser.add_argument('--eps', type=float, default=0.01)
    parser.add_argument('--ups', type=float, default=0.01)
    parser.add_argument(
        '--moments',
        choices=MOMENT_METHODS,
        default='exact',
        help='How true and truncated population moments are computed (default: exact)',
    )
    parser.add_argument('--seed', type=int, default=0, help='Random seed')
    parser.add_argument('--workers', type=util.positive_int, default=1)
    parser.add_argument('--format', choices=['json', 'txt'], default='json')
    parser.add_argument('-o', '--out', help='Output path (default: stdout)')
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> None:
    model = config.resolve_model_config(args)
    completion = CompletionConfig(args.eps, args.ups, args.seed).validate()
    study = run_study(
        model,
        completion,
        reps=args.reps,
        n=args.n,
        level=args.level,
        seed=args.seed,
        workers=args.workers,
        moments=args.moments,
    )
    if args.format == 'txt':
        util.write_text(txt_report(study), args.out)
    else:
        util.write_json(study_report(study), args.out, indent=2)


def main(argv: Optional[Sequence[str]] = None) -> None:
    if argv is None:
        argv = sys.argv[1:]
    parser = argparse.ArgumentParser(description='Prior-truth coverage study')
    setup_parser(parser)
    args = parser.parse_args(argv)
    args.func(args)


if __name__ == '__main__':
    main()
