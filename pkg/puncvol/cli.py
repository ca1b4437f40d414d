"""
Command-line entry point.

    puncvol volume --field hopf --n 1
    puncvol euler-scan --field radial --n 1 --format csv
    puncvol index --field power --d 2 --n 1 --radius 0.1
    puncvol bounds --n 1 --indices 1,-1
    puncvol chain-table --n 1,2,3
    puncvol verify-lemma --n 2
    puncvol verify-lemma --n 2 --format text
    puncvol probe-lemma --n 1 --trials 1000000 --seed 7
    puncvol convergence --field hopf --n 1 --levels 4

Results are written as a JSON run record (default), CSV or a text report to --out or stdout.
Exit codes: 0 success, 2 configuration or usage error, 3 numeric failure.
"""
import argparse
import json
import logging
import sys
import time

import numpy as np

from . import bounds, functionals, pfaffian, probe, topology
from .base import (ConfigurationError, DomainError, NumericFailure, PuncvolError, ResourceError,
                   __version__)
from .fields import VectorFieldSpec
from .records import RunRecord, to_csv, write_atomic
from .spherekit import GridSpec, build_grid, draw_seed

log = logging.getLogger(__name__)

default_thetas = '-1.2,-0.8,-0.4,0,0.4,0.8,1.2'
csv_commands = ('euler-scan', 'chain-table', 'convergence')
text_commands = ('verify-lemma',)


def _floats(text):
    try:
        return [float(t) for t in text.split(',') if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def _ints(text):
    try:
        return [int(t) for t in text.split(',') if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _grid(text):
    try:
        return GridSpec.from_dict(json.loads(text))
    except json.JSONDecodeError as err:
        raise argparse.ArgumentTypeError(f"grid is not valid JSON: {err}")
    except PuncvolError as err:
        raise argparse.ArgumentTypeError(str(err))


def build_parser():
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument('--format', choices=('json', 'csv', 'text'), default='json')
    output.add_argument('--out', default=None, help='output path (default: stdout)')
    output.add_argument('-v', '--verbose', action='count', default=0)

    sphere = argparse.ArgumentParser(add_help=False)
    sphere.add_argument('--n', type=int, default=1, help='sphere parameter (the sphere is S^{2n+1})')

    field = argparse.ArgumentParser(add_help=False)
    field.add_argument('--field', default='hopf', help='hopf | radial | power | perturbed-hopf')
    field.add_argument('--pole', type=_floats, default=None, help='csv of 2n+2 coordinates')
    field.add_argument('--d', type=int, default=1, help='power field exponent')
    field.add_argument('--eps', type=float, default=0.2, help='perturbation amplitude')
    field.add_argument('--seed', type=int, default=None, help='perturbation / Monte Carlo seed')
    field.add_argument('--grid', type=_grid, default=None, help='grid spec as JSON')

    parser = argparse.ArgumentParser(prog='puncvol', description='Volume of unit vector fields on punctured odd spheres.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)
    with_field = [output, sphere, field]

    sub.add_parser('volume', parents=with_field, help='volume of a catalog field')

    p = sub.add_parser('euler-scan', parents=with_field, help='Euler-form flux through parallels')
    p.add_argument('--thetas', type=_floats, default=_floats(default_thetas))

    p = sub.add_parser('index', parents=with_field, help='Poincare index at a point')
    p.add_argument('--point', type=_floats, default=None)
    p.add_argument('--radius', type=float, default=0.1)

    p = sub.add_parser('bounds', parents=with_field, help='lower bounds for given indices')
    p.add_argument('--indices', type=_ints, default=[1, -1])
    p.add_argument('--with-volume', action='store_true', help='compare with the volume of --field')

    p = sub.add_parser('chain-table', parents=[output], help='closed-form normalized volumes')
    p.add_argument('--n', type=_ints, default=[1, 2, 3], help='csv of sphere parameters')

    p = sub.add_parser('verify-lemma', parents=[output, sphere], help='exact check of the Pfaffian expansion')
    p.add_argument('--self-test', action='store_true', help='also inject a fault and check it is localized')

    p = sub.add_parser('probe-lemma', parents=[output, sphere], help='search for violations of the pointwise lemma')
    p.add_argument('--trials', type=int, default=100000)
    p.add_argument('--seed', type=int, default=None)

    p = sub.add_parser('convergence', parents=with_field, help='volume under grid refinement')
    p.add_argument('--kind', choices=('product', 'sliced', 'monte-carlo'), default=None)
    p.add_argument('--levels', type=int, default=4)
    return parser


def _field(args):
    pole = None if args.pole is None else np.array(args.pole)
    return VectorFieldSpec(kind=args.field, n=args.n, pole=pole, d=args.d, eps=args.eps,
                           seed=0 if args.seed is None else args.seed)


# ═══════════════════════════════════════════════════════════════════
#  Commands
# ═══════════════════════════════════════════════════════════════════

def cmd_volume(args, ctx):
    f = _field(args)
    grid = None
    if args.grid is not None:
        spec = args.grid
        if spec.kind == 'monte-carlo' and spec.seed is None:
            spec = GridSpec('monte-carlo', count=spec.count, seed=args.seed if args.seed is not None else draw_seed())
        grid = build_grid(spec, 2 * f.n + 1, pole=f.pole)
    est = functionals.volume(f, grid)
    ctx['grids'].append(est.grid)
    if est.seed is not None:
        ctx['seeds'].append(est.seed)
    return est.to_dict()


def cmd_euler_scan(args, ctx):
    f = _field(args)
    grid = args.grid
    if grid is not None and grid.kind != 'parallel':
        raise ConfigurationError(f"euler-scan needs a parallel grid, got '{grid.kind}'")
    scan = functionals.stokes_scan(f, f.pole, args.thetas, grid)
    ctx['grids'].append(scan.grid)
    ctx['rows'] = scan.rows()
    return scan.to_dict()


def cmd_index(args, ctx):
    f = _field(args)
    point = f.pole if args.point is None else np.array(args.point)
    grid = None if args.grid is None else build_grid(args.grid, 2 * f.n)
    report = topology.field_index(f, point, args.radius, grid)
    return report.check().to_dict()


def cmd_bounds(args, ctx):
    volume = error = None
    if args.with_volume:
        est = functionals.volume(_field(args))
        volume, error = est.value, est.error
        ctx['grids'].append(est.grid)
    return bounds.bound_report(args.n, args.indices, volume, error).to_dict()


def cmd_chain_table(args, ctx):
    rows = bounds.chain_table(args.n)
    ctx['rows'] = rows
    return {'rows': rows}


def cmd_verify_lemma(args, ctx):
    report = pfaffian.verify_lemma(args.n)
    ctx['text'] = report.to_text()
    payload = report.to_dict()
    if args.self_test:
        target = tuple(range(1, 2 * args.n + 1))
        faulty = pfaffian.verify_lemma(args.n, perturb=(target, 1))
        payload['self_test'] = {'perturbed': list(target),
                                'localized': list(faulty.mismatches) == [target]}
    return payload


def cmd_probe_lemma(args, ctx):
    report = probe.probe_lemma(args.n, args.trials, args.seed)
    ctx['seeds'].append(report.seed)
    return report.to_dict()


def cmd_convergence(args, ctx):
    rows = functionals.convergence(_field(args), args.kind, args.levels)
    ctx['rows'] = [(r['nodes'], r['value']) for r in rows]
    ctx['header'] = ['nodes', 'value']
    ctx['grids'].extend(r['grid'] for r in rows)
    return {'levels': rows}


commands = {
    'volume': cmd_volume,
    'euler-scan': cmd_euler_scan,
    'index': cmd_index,
    'bounds': cmd_bounds,
    'chain-table': cmd_chain_table,
    'verify-lemma': cmd_verify_lemma,
    'probe-lemma': cmd_probe_lemma,
    'convergence': cmd_convergence,
}


def _config(args):
    out = {}
    for key, value in vars(args).items():
        if key in ('verbose', 'out', 'format'):
            continue
        out[key] = value.to_dict() if isinstance(value, GridSpec) else value
    return out


def run(argv=None):
    """
    Parse argv, run one command and write its output.

    Returns
    -------
    int
        Exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
                        format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)
    if args.format == 'csv' and args.command not in csv_commands:
        log.error("csv output is available for %s only", ', '.join(csv_commands))
        return 2
    if args.format == 'text' and args.command not in text_commands:
        log.error("text output is available for %s only", ', '.join(text_commands))
        return 2

    ctx = {'seeds': [], 'grids': []}
    start = time.perf_counter()
    try:
        payload = commands[args.command](args, ctx)
    except (ConfigurationError, DomainError, ResourceError) as err:
        log.error("%s", err)
        return 2
    except NumericFailure as err:
        log.error("%s", err)
        return 3

    if args.format == 'text':
        text = ctx['text'] + '\n'
    elif args.format == 'csv':
        header = ctx.get('header') or ('scan' if args.command == 'euler-scan' else 'table')
        text = to_csv(ctx['rows'], header)
    else:
        record = RunRecord(command=args.command, config=_config(args), payload=payload,
                           seeds=ctx['seeds'], grids=ctx['grids'],
                           duration=time.perf_counter() - start)
        text = record.to_json() + '\n'
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
