"""
Command-line front end.

Every subcommand loads its JSON inputs, calls one library operation and prints
the result on stdout in the requested format. Errors are logged on stderr and
mapped to the exit code carried by the exception.
"""

import argparse
import math
from typing import Callable, Dict, List, Optional

from .config import Config
from .convergence import MeasureSequence, diagnose, is_cauchy
from .coupling import random_member, require_marginals, xi0
from .errors import IdemetricError, InvalidArgumentError, MetricValidationError, NormalizationError
from .exporters import ResultExporter
from .loaders import (load_function, load_map, load_measure, load_measure_dir, load_sequence,
                      load_space)
from .logger import logger
from .measure import AUTONORMALIZE, STRICT, integrate, pushforward
from .metric import gram, h_distance, optimal_coupling, verified_distance
from .semiring import oplus_h

FORMATS = ('json', 'csv', 'text')
COUPLING_MODES = ('xi0', 'random', 'optimal')


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=FORMATS, default='json', help='output format (default: json)')
    common.add_argument('--digits', type=int, default=Config.OUTPUT_DIGITS,
                        help='significant digits of printed floats')
    common.add_argument('--seed', type=int, default=Config.DEFAULT_SEED, help='random seed')
    common.add_argument('--autonormalize', action='store_true',
                        help='shift measure weights so the largest is 0 instead of rejecting them')
    common.add_argument('--tol', type=float, default=None,
                        help='normalization and metric-validation tolerance')
    common.add_argument('--save', metavar='FILENAME', default=None,
                        help='also write the output under the outputs directory')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='log progress on stderr')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='log errors only')
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='idemetric',
        description='Idempotent Kantorovich metric on finitely supported idempotent measures.')
    common = _common_flags()
    sub = parser.add_subparsers(dest='command', required=True)

    def command(name: str, help_text: str, handler: Callable) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(handler=handler)
        return p

    p = command('dist', 'H and rho_omega between two measures', cmd_dist)
    p.add_argument('space')
    p.add_argument('mu1')
    p.add_argument('mu2')
    p.add_argument('--oracle', action='store_true', help='confirm against exhaustive support search')

    p = command('couple', 'construct a coupling of two measures', cmd_couple)
    p.add_argument('space')
    p.add_argument('mu1')
    p.add_argument('mu2')
    p.add_argument('--mode', choices=COUPLING_MODES, default='xi0')

    p = command('integrate', 'Maslov integral of a test function', cmd_integrate)
    p.add_argument('space')
    p.add_argument('mu')
    p.add_argument('function')

    p = command('push', 'pushforward of a measure along a point map', cmd_push)
    p.add_argument('space')
    p.add_argument('mu')
    p.add_argument('map')
    p.add_argument('--target-space', default=None, help='space of the images (default: the source space)')

    p = command('gram', 'pairwise rho_omega of every measure in a directory', cmd_gram)
    p.add_argument('space')
    p.add_argument('measures_dir')
    p.add_argument('--workers', type=int, default=Config.GRAM_WORKERS)

    p = command('converge', 'metric, pointwise and star-condition convergence diagnostics', cmd_converge)
    p.add_argument('space')
    p.add_argument('sequence')
    p.add_argument('limit')
    p.add_argument('--eps', type=float, default=Config.STAR_EPS_X + Config.STAR_EPS_LAMBDA,
                   help='metric tolerance; the star condition uses eps/2 for distances and weights unless overridden')
    p.add_argument('--eps-x', type=float, default=None)
    p.add_argument('--eps-lambda', type=float, default=None)
    p.add_argument('--tail', type=int, default=None, help='number of trailing measures checked')
    p.add_argument('--radius', type=float, default=0.25, help='tent radius of the pointwise panel')
    p.add_argument('--height', type=float, default=1.0, help='tent height of the pointwise panel')

    p = command('dequantize', 'Maslov dequantization u (+)_h v against max(u, v)', cmd_dequantize)
    p.add_argument('u', type=float)
    p.add_argument('v', type=float)
    p.add_argument('hs', help='comma separated list of h values, e.g. 1,0.1,0.01')

    p = command('validate', 'check metric axioms and measure normalization', cmd_validate)
    p.add_argument('space')
    p.add_argument('measures', nargs='*')

    return parser


# ---------------------------------------------------------------------- output

def _mode(args) -> str:
    return AUTONORMALIZE if args.autonormalize else STRICT


def _emit(args, title: str, payload: Dict, csv_render: Optional[Callable[[Dict, int], str]] = None) -> None:
    if args.format == 'json':
        out = ResultExporter.to_json(payload, args.digits)
    elif args.format == 'text':
        out = ResultExporter.text_report(title, payload, args.digits)
    elif csv_render is not None:
        out = csv_render(payload, args.digits).rstrip("\n")
    else:
        raise InvalidArgumentError(f"'{args.command}' has no CSV output")

    print(out)
    if args.save:
        ResultExporter.save(out, args.save, extension=args.format)


def _load_pair(args):
    space = load_space(args.space)
    mode = _mode(args)
    return space, load_measure(args.mu1, space, mode, args.tol), load_measure(args.mu2, space, mode, args.tol)


# ---------------------------------------------------------------------- commands

def cmd_dist(args) -> int:
    _, mu1, mu2 = _load_pair(args)
    if args.oracle:
        report, oracle = verified_distance(mu1, mu2)
    else:
        report, oracle = h_distance(mu1, mu2), None

    payload = report.to_dict()
    if oracle is not None:
        payload['oracle'] = {'H': oracle.H, 'support': [[j, k] for j, k in oracle.optimal_support]}
    _emit(args, 'distance', payload)
    return 0


def cmd_couple(args) -> int:
    _, mu1, mu2 = _load_pair(args)
    if args.mode == 'xi0':
        xi = xi0(mu1, mu2)
    elif args.mode == 'random':
        xi = random_member(mu1, mu2, seed=args.seed)
    else:
        xi = optimal_coupling(mu1, mu2)
    require_marginals(xi, args.mode)

    payload = {'mode': args.mode}
    payload.update(xi.to_dict())
    _emit(args, 'coupling', payload, lambda p, d: ResultExporter.coupling_csv(p, d))
    return 0


def cmd_integrate(args) -> int:
    space = load_space(args.space)
    mu = load_measure(args.mu, space, _mode(args), args.tol)
    phi = load_function(args.function)
    _emit(args, 'integral', {'value': integrate(mu, phi)})
    return 0


def cmd_push(args) -> int:
    space = load_space(args.space)
    target = load_space(args.target_space) if args.target_space else space
    mu = load_measure(args.mu, space, _mode(args), args.tol)
    nu = pushforward(load_map(args.map), mu, target)
    _emit(args, 'pushforward', nu.to_dict(space_ref=target.name))
    return 0


def cmd_gram(args) -> int:
    space = load_space(args.space)
    labels, measures = load_measure_dir(args.measures_dir, space, _mode(args), args.tol)
    matrix = gram(measures, workers=args.workers)
    payload = {'labels': labels, 'matrix': matrix}
    _emit(args, 'gram matrix', payload, lambda p, d: ResultExporter.gram_csv(p['labels'], p['matrix'], d))
    return 0


def cmd_converge(args) -> int:
    space = load_space(args.space)
    mode = _mode(args)
    seq = MeasureSequence(load_sequence(args.sequence, space, mode, args.tol),
                          load_measure(args.limit, space, mode, args.tol))
    report = diagnose(seq, seq.limit, args.eps, args.tail, args.radius, args.height,
                      args.eps_x, args.eps_lambda)

    payload = report.to_dict()
    payload['cauchy'] = is_cauchy(seq, args.eps, args.tail)
    _emit(args, 'convergence', payload, ResultExporter.trajectory_csv)
    return 0


def _parse_hs(text: str) -> List[float]:
    try:
        hs = [float(h) for h in text.split(',') if h.strip()]
    except ValueError:
        raise InvalidArgumentError(f"Cannot read h values from '{text}'") from None
    if not hs:
        raise InvalidArgumentError("At least one h value is required")
    return hs


def cmd_dequantize(args) -> int:
    top = max(args.u, args.v)
    rows = []
    for h in _parse_hs(args.hs):
        value = oplus_h(args.u, args.v, h)
        rows.append({'h': h, 'oplus_h': value, 'max': top, 'gap': value - top, 'bound': h * math.log(2)})
    payload = {'u': args.u, 'v': args.v, 'rows': rows}
    _emit(args, 'dequantization', payload, lambda p, d: ResultExporter.dequantize_csv(p['rows'], d))
    return 0


def cmd_validate(args) -> int:
    space = load_space(args.space, validate=False)
    report = space.validate_metric(args.tol)

    measures = []
    for path in args.measures:
        try:
            load_measure(path, space, _mode(args), args.tol)
            measures.append({'file': path, 'ok': True})
        except NormalizationError as e:
            logger.warning(f"{path}: {e}")
            measures.append({'file': path, 'ok': False, 'error': str(e)})

    payload = {'metric': report.to_dict(), 'measures': measures}
    _emit(args, 'validation', payload)

    if not report.ok:
        logger.error(f"Metric validation failed with {len(report.violations)} violation(s)")
        return MetricValidationError.exit_code
    if not all(m['ok'] for m in measures):
        return NormalizationError.exit_code
    logger.success("Space and measures are valid")
    return 0


# ---------------------------------------------------------------------- entry point

def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and return its exit code."""
    args = build_parser().parse_args(argv)

    logger.set_level(Config.LOG_LEVEL)
    if args.verbose:
        logger.set_level('INFO')
    elif args.quiet:
        logger.set_level('ERROR')

    try:
        Config.validate_config()
        return args.handler(args)
    except IdemetricError as e:
        logger.error(str(e))
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected error: {str(e)}")
        return 1
