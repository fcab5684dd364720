#!/usr/bin/env python3
"""
analyze.py - Summaries of the sampled densities in a draws or mixtures file.

A draws file is summarised through each draw's marginal density (distinct
thetas weighted by their tie counts); a mixtures file through its completed
densities.

    density, cdf   long-format rows (sample, x, value) on a grid
    modes          mode counts within the data range, and their histogram
    components     atoms per sampled density
    moments        trapezoid mean / variance per sampled density
    bands          pointwise mean with pointwise and simultaneous bands

Usage:
    analyze.py mixtures.ndjson --what modes
    analyze.py mixtures.ndjson --what bands --of cdf --level 0.95 -o bands.csv
    analyze.py draws.ndjson --what density --grid-lo 5 --grid-hi 40 --grid-n 200
"""

import argparse
import signal
import sys
from collections import Counter
from typing import Optional, Sequence

import numpy as np
from tabulate import tabulate

from pypolya import analysis, records, util
from pypolya.completion import MixtureDensity, draw_mixture
from pypolya.errors import ValidationError

signal.signal(signal.SIGPIPE, signal.SIG_DFL)

WHAT = ('density', 'cdf', 'modes', 'components', 'moments', 'bands')
FORMATS = ('csv', 'json', 'txt')
SUMMARY_WHATS = ('modes', 'components')


def load_mixtures(run_file: records.RunFile) -> list[MixtureDensity]:
    if run_file.kind == records.MIXTURES:
        return run_file.mixtures
    return [draw_mixture(d) for d in run_file.draws]


def build_grid(args: argparse.Namespace, data: np.ndarray) -> np.ndarray:
    grid = analysis.default_grid(data, points=args.grid_n)
    lo = grid[0] if args.grid_lo is None else args.grid_lo
    hi = grid[-1] if args.grid_hi is None else args.grid_hi
    if not lo < hi:
        raise ValidationError(f'--grid-lo must be below --grid-hi, got {lo}, {hi}')
    return np.linspace(lo, hi, args.grid_n)


def _user_grid(args: argparse.Namespace) -> bool:
    return args.grid_lo is not None or args.grid_hi is not None


# ----------------------
# Summaries
# ----------------------


def summarize_curves(mixtures, grid, of: str) -> dict:
    evaluate = analysis.eval_cdf if of == 'cdf' else analysis.eval_density
    fns = [evaluate(m, grid) for m in mixtures]
    return {
        'of': of,
        'grid': grid.tolist(),
        'samples': [fn.values.tolist() for fn in fns],
    }


def summarize_modes(mixtures, data, resolution: int) -> dict:
    data_range = analysis.data_range(data)
    modes = [analysis.count_modes(m, data_range, resolution) for m in mixtures]
    return {
        'range': list(data_range),
        'resolution': resolution,
        'histogram': analysis.mode_count_histogram(modes),
        'modes': [len(m) for m in modes],
        'locations': [m.tolist() for m in modes],
    }


def summarize_components(mixtures) -> dict:
    counts = [len(m) for m in mixtures]
    return {
        'histogram': dict(sorted(Counter(counts).items())),
        'components': counts,
    }


def summarize_moments(mixtures, grid: Optional[np.ndarray], level: float) -> dict:
    rows = []
    for mix in mixtures:
        x = grid if grid is not None else analysis.moment_grid(mix)
        moments = analysis.moments_trapezoid(analysis.eval_density(mix, x))
        rows.append(
            {
                'mean': moments.mean,
                'variance': moments.variance,
                'mass': moments.mass,
                'low_mass': moments.low_mass,
            }
        )
    points = [(r['mean'], r['variance']) for r in rows]
    region = analysis.moment_region(points, level)
    return {
        'moments': rows,
        'region': {
            'level': level,
            'mean': [region.lower[0], region.upper[0]],
            'variance': [region.lower[1], region.upper[1]],
        },
    }


def summarize_bands(mixtures, grid, of: str, level: float) -> dict:
    evaluate = analysis.eval_cdf if of == 'cdf' else analysis.eval_density
    fns = [evaluate(m, grid) for m in mixtures]
    pointwise = analysis.bands(fns, level, analysis.BandKind.POINTWISE)
    simultaneous = analysis.bands(fns, level, analysis.BandKind.SIMULTANEOUS)
    return {
        'of': of,
        'level': level,
        'x': grid.tolist(),
        'mean': analysis.pointwise_mean(fns).values.tolist(),
        'pointwise_lower': pointwise.lower.tolist(),
        'pointwise_upper': pointwise.upper.tolist(),
        'simultaneous_lower': simultaneous.lower.tolist(),
        'simultaneous_upper': simultaneous.upper.tolist(),
    }


# ----------------------
# Writers
# ----------------------


def csv_rows(what: str, summary: dict) -> tuple[list[str], list[dict]]:
    if what in ('density', 'cdf'):
        rows = [
            {'sample': t, 'x': float(x), 'value': float(v)}
            for t, values in enumerate(summary['samples'])
            for x, v in zip(summary['grid'], values)
        ]
        return ['sample', 'x', 'value'], rows
    if what == 'modes':
        rows = [{'sample': t, 'modes': c} for t, c in enumerate(summary['modes'])]
        return ['sample', 'modes'], rows
    if what == 'components':
        rows = [
            {'sample': t, 'components': c}
            for t, c in enumerate(summary['components'])
        ]
        return ['sample', 'components'], rows
    if what == 'moments':
        rows = [{'sample': t, **r} for t, r in enumerate(summary['moments'])]
        return ['sample', 'mean', 'variance', 'mass', 'low_mass'], rows
    columns = [
        'x',
        'mean',
        'pointwise_lower',
        'pointwise_upper',
        'simultaneous_lower',
        'simultaneous_upper',
    ]
    rows = [dict(zip(columns, values)) for values in zip(*(summary[c] for c in columns))]
    return columns, rows


def txt_report(what: str, summary: dict) -> str:
    if what in SUMMARY_WHATS:
        label = 'Modes' if what == 'modes' else 'Components'
        rows = list(summary['histogram'].items())
        body = tabulate(rows, headers=[label, 'Samples'])
    elif what == 'moments':
        stats = np.array([[r['mean'], r['variance']] for r in summary['moments']])
        region = summary['region']
        rows = [
            ['mean', stats[:, 0].mean(), *region['mean']],
            ['variance', stats[:, 1].mean(), *region['variance']],
        ]
        level = f'{region["level"]:g}'
        body = tabulate(
            rows, headers=['Moment', 'Average', f'{level} lower', f'{level} upper'],
            floatfmt='.4f',
        )
    elif what == 'bands':
        columns, rows = csv_rows(what, summary)
        body = tabulate([list(r.values()) for r in rows], headers=columns, floatfmt='.4f')
    else:
        values = np.array(summary['samples'])
        rows = zip(summary['grid'], values.mean(axis=0), values.std(axis=0))
        body = tabulate(list(rows), headers=['x', 'mean', 'sd'], floatfmt='.4f')
    return f'{what.capitalize()} over sampled densities\n\n{body}\n'


def emit(what: str, summary: dict, fmt: str, out) -> None:
    if fmt == 'json':
        util.write_json(summary, out)
    elif fmt == 'csv':
        fieldnames, rows = csv_rows(what, summary)
        util.write_csv(rows, out, fieldnames=fieldnames)
    elif fmt == 'txt':
        util.write_text(txt_report(what, summary), out)
    else:
        raise ValidationError(f'Unsupported format: {fmt}')


def analyze(args: argparse.Namespace) -> dict:
    run_file = records.read_run(args.input)
    mixtures = load_mixtures(run_file)
    if not mixtures:
        raise ValidationError(f'{args.input} holds no sampled densities')
    data = run_file.data
    if args.what in ('density', 'cdf'):
        return summarize_curves(mixtures, build_grid(args, data), args.what)
    if args.what == 'modes':
        return summarize_modes(mixtures, data, args.resolution)
    if args.what == 'components':
        return summarize_components(mixtures)
    if args.what == 'moments':
        grid = build_grid(args, data) if _user_grid(args) else None
        return summarize_moments(mixtures, grid, args.level)
    return summarize_bands(mixtures, build_grid(args, data), args.of, args.level)


def setup_parser(parser: argparse.ArgumentParser) -> None:
    """Add analyze-specific arguments to a parser."""
    parser.add_argument(
        'input', type=util.existing_file, help='Draws or mixtures file'
    )
    parser.add_argument('--what', choices=WHAT, required=True, help='What to compute')
    parser.add_argument(
        '--of',
        choices=['cdf', 'density'],
        default='cdf',
        help='Function the bands are drawn around (default: cdf)',
    )
    parser.add_argument('--grid-lo', type=float, help='Grid start')
    parser.add_argument('--grid-hi', type=float, help='Grid end')
    parser.add_argument(
        '--grid-n',
        type=util.positive_int,
        default=analysis.DEFAULT_GRID_POINTS,
        help=f'Grid points (default: {analysis.DEFAULT_GRID_POINTS})',
    )
    parser.add_argument(
        '--level', type=float, default=0.95, help='Band / region level (default: 0.95)'
    )
    parser.add_argument(
        '--resolution',
        type=util.positive_int,
        default=analysis.DEFAULT_MODE_RESOLUTION,
        help='Grid points used for mode counting',
    )
    parser.add_argument(
        '--format',
        choices=FORMATS,
        help='Output format (default: json for modes and components, else csv)',
    )
    parser.add_argument('-o', '--out', help='Output path (default: stdout)')
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> None:
    if not 0.0 < args.level < 1.0:
        raise ValidationError(f'--level must lie in (0, 1), got {args.level}')
    fmt = args.format or ('json' if args.what in SUMMARY_WHATS else 'csv')
    emit(args.what, analyze(args), fmt, args.out)


def main(argv: Optional[Sequence[str]] = None) -> None:
    if argv is None:
        argv = sys.argv[1:]
    parser = argparse.ArgumentParser(description='Summarize sampled mixture densities')
    setup_parser(parser)
    args = parser.parse_args(argv)
    args.func(args)


if __name__ == '__main__':
    main()
