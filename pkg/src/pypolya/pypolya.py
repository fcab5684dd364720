import argparse
import logging
import sys

from . import analyze, bench, complete, fit, init, simulate, util
from .errors import PolyaError

log = logging.getLogger(__name__)

EXIT_USAGE = 2
EXIT_FAILURE = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='pypolya', description='Dirichlet process mixtures with Polya completion'
    )
    parser.add_argument(
        '-v',
        '--verbose',
        action='count',
        default=0,
        help='More logging on stderr (-v info, -vv debug)',
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    init_parser = subparsers.add_parser(
        'init', help='Initialize starter files (e.g. a model config)'
    )
    init.setup_parser(init_parser)

    fit_parser = subparsers.add_parser(
        'fit', help='Sample the marginal model and write draws'
    )
    fit.setup_parser(fit_parser)

    complete_parser = subparsers.add_parser(
        'complete', help='Complete draws into mixture densities'
    )
    complete.setup_parser(complete_parser)

    analyze_parser = subparsers.add_parser(
        'analyze', help='Densities, CDFs, modes, moments and bands'
    )
    analyze.setup_parser(analyze_parser)

    bench_parser = subparsers.add_parser('bench', help='Time sweeps and completion')
    bench.setup_parser(bench_parser)

    simulate_parser = subparsers.add_parser(
        'simulate', help='Coverage study on prior-drawn truths'
    )
    simulate.setup_parser(simulate_parser)
    return parser


def main(argv=None) -> None:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    util.setup_logging(args.verbose)
    try:
        args.func(args)
    except (PolyaError, OSError) as e:
        util.eprint(f'ERROR: {e}')
        sys.exit(EXIT_USAGE)
    except Exception as e:
        log.debug('Unhandled failure', exc_info=True)
        util.eprint(f'ERROR: {type(e).__name__}: {e}')
        sys.exit(EXIT_FAILURE)


if __name__ == '__main__':
    main()
