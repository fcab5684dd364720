#!/usr/bin/env python3
"""
bench.py - Wall-clock timings for Gibbs sweeps and Polya completion.

Fit timings resample the galaxies data to each requested size. Completion
timings complete a fixed set of galaxies draws serially for every (eps, ups)
pair in the grid.

Usage:
    bench.py --n 100 500 --iters 200 --reps 5
    bench.py --reps 3 --format txt
"""

import argparse
import logging
import signal
import sys
import time
from itertools import product
from typing import Optional, Sequence

import numpy as np
from tabulate import tabulate

from pypolya import datasets, util
from pypolya.completion import CompletionConfig, complete_all
from pypolya.gibbs import ModelConfig, run_chain

signal.signal(signal.SIGPIPE, signal.SIG_DFL)

log = logging.getLogger(__name__)

TRUNCATION_GRID = (0.01, 0.05)
COMPLETION_DRAWS = 100
COMPLETION_BURNIN = 200


def bench_data(n: int, rng: np.random.Generator) -> np.ndarray:
    """n values resampled from galaxies with a little jitter to break ties."""
    base = datasets.galaxies()
    return rng.choice(base, size=n) + rng.normal(0.0, 0.05, size=n)


def time_fit(n: int, sweeps: int, reps: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    seconds = []
    for rep in range(reps):
        data = bench_data(n, rng)
        model = ModelConfig(iterations=sweeps, burnin=0, thin=1, seed=seed + rep)
        start = time.perf_counter()
        run_chain(data, model)
        seconds.append(time.perf_counter() - start)
    per_sweep = np.asarray(seconds) / max(sweeps, 1)
    return {
        'n': n,
        'sweeps': sweeps,
        'reps': reps,
        'seconds': seconds,
        'per_sweep_ms_mean': float(per_sweep.mean() * 1e3),
        'per_sweep_ms_min': float(per_sweep.min() * 1e3),
    }


def time_completion(reps: int, seed: int) -> list[dict]:
    model = ModelConfig(
        iterations=COMPLETION_DRAWS, burnin=COMPLETION_BURNIN, thin=1, seed=seed
    )
    draws = run_chain(datasets.galaxies(), model)
    results = []
    for eps, ups in product(TRUNCATION_GRID, repeat=2):
        seconds = []
        for rep in range(reps):
            completion = CompletionConfig(eps, ups, seed + rep)
            start = time.perf_counter()
            complete_all(draws, model, completion)
            seconds.append(time.perf_counter() - start)
        per_draw = np.asarray(seconds) / len(draws)
        results.append(
            {
                'eps': eps,
                'ups': ups,
                'draws': len(draws),
                'reps': reps,
                'seconds': seconds,
                'total_ms_mean': float(np.mean(seconds) * 1e3),
                'per_draw_ms_mean': float(per_draw.mean() * 1e3),
            }
        )
    return results


def benchmark(sizes: Sequence[int], sweeps: int, reps: int, seed: int) -> dict:
    if reps == 0:
        return {'fit': [], 'completion': []}
    fit = []
    for n in sizes:
        log.info('Timing %d sweeps at n=%d', sweeps, n)
        fit.append(time_fit(n, sweeps, reps, seed))
    log.info('Timing completion of %d galaxies draws', COMPLETION_DRAWS)
    return {'fit': fit, 'completion': time_completion(reps, seed)}


def txt_report(report: dict) -> str:
    out = ['Gibbs sweeps:']
    rows = [
        [r['n'], r['sweeps'], r['reps'], r['per_sweep_ms_mean'], r['per_sweep_ms_min']]
        for r in report['fit']
    ]
    out.append(
        tabulate(rows, headers=['n', 'Sweeps', 'Reps', 'ms/sweep', 'min ms/sweep'],
                 floatfmt='.3f')
        if rows
        else '(none)'
    )
    out.append('')
    out.append('Completion (serial):')
    rows = [
        [r['eps'], r['ups'], r['draws'], r['total_ms_mean'], r['per_draw_ms_mean']]
        for r in report['completion']
    ]
    out.append(
        tabulate(rows, headers=['eps', 'ups', 'Draws', 'Total ms', 'ms/draw'],
                 floatfmt='.3f')
        if rows
        else '(none)'
    )
    return '\n'.join(out) + '\n'


def setup_parser(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        '--n',
        type=util.positive_int,
        nargs='+',
        default=[100],
        help='Sample sizes to time sweeps at (default: 100)',
    )
    parser.add_argument(
        '--iters', type=util.positive_int, default=100, help='Sweeps per timing'
    )
    parser.add_argument(
        '--reps', type=util.nonnegative_int, default=3, help='Repetitions'
    )
    parser.add_argument('--seed', type=int, default=0, help='Random seed')
    parser.add_argument('--format', choices=['json', 'txt'], default='json')
    parser.add_argument('-o', '--out', help='Output path (default: stdout)')
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> None:
    report = benchmark(args.n, args.iters, args.reps, args.seed)
    if args.format == 'txt':
        util.write_text(txt_report(report), args.out)
    else:
        util.write_json(report, args.out, indent=2)


def main(argv: Optional[Sequence[str]] = None) -> None:
    if argv is None:
        argv = sys.argv[1:]
    parser = argparse.ArgumentParser(description='Time the sampler and completion')
    setup_parser(parser)
    args = parser.parse_args(argv)
    args.func(args)


if __name__ == '__main__':
    main()
