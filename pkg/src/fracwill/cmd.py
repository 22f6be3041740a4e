''' Command entry points.
'''
import argparse
import csv
import glob
from io import StringIO
import json
import logging
import os
import sys
import numpy

from fracwill.config import Config
from fracwill.curvature import nmc_curve, nmc_region_oracle
from fracwill.curve import load_curve, support_from_dict
from fracwill.energy import FracParams, refinement_study, willmore_energy
from fracwill.error import (
    CollisionError, ConstraintError, GeometryError, InsufficientDataError, ParameterError,
    PreconditionError, ProjectionError, UndefinedPointError, UnsupportedDomainError,
)
from fracwill.fracops import (
    gagliardo_seminorm, load_function, stein_ratio, t_operator, t_operator_oracle,
)
from fracwill.manifest import RunManifest
from fracwill.minimize import (
    concentration_scan, lsc_check, minimize_descent, random_convex, write_trace,
)
from fracwill.plotdata import emit_plotdata
from fracwill.region import CurveInterior
from fracwill.suite import base as suite_base

LOGGER = logging.getLogger(__name__)

#: Exceptions reported as a failed command rather than a crash
LIBRARY_ERRORS = (
    CollisionError, ConstraintError, GeometryError, InsufficientDataError, ParameterError,
    PreconditionError, ProjectionError, UndefinedPointError, UnsupportedDomainError,
)


def root_logging(log_level):
    ''' Initialize logging.
    '''
    logging.basicConfig(
        level=log_level,
        format="%(asctime)s PID:%(process)s TID:%(threadName)s <%(levelname)s> %(name)s: %(message)s"
    )


def interval(val):
    ''' Require an option value to be a pair ``lower,upper``.
    '''
    try:
        lower, upper = (float(part) for part in val.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError('Interval "lower,upper" expected')
    if upper < lower:
        raise argparse.ArgumentTypeError('Interval end before start')
    return (lower, upper)


def float_list(val):
    ''' Require an option value to be comma-separated numbers.
    '''
    try:
        return [float(part) for part in val.split(',') if part]
    except ValueError:
        raise argparse.ArgumentTypeError('Comma-separated numbers expected')


def int_list(val):
    try:
        return [int(part) for part in val.split(',') if part]
    except ValueError:
        raise argparse.ArgumentTypeError('Comma-separated integers expected')


def _write_json(path, data):
    with open(path, 'w') as outfile:
        json.dump(data, outfile, indent=2, default=lambda obj: obj.tolist())
    return path


def _load_curve(path, count, manifest):
    manifest.add_input(path)
    with open(path) as infile:
        return load_curve(infile, count)


def _load_function(path, manifest):
    manifest.add_input(path)
    with open(path) as infile:
        return load_function(infile)


def _build_parser():
    parser = argparse.ArgumentParser(prog='fracwill')
    parser.add_argument('--log-level', dest='log_level',
                        metavar='LEVEL',
                        help='Console logging lowest level displayed.')
    parser.add_argument('--config-file', type=str,
                        help='Configuration file to load from')
    subp = parser.add_subparsers(dest='action', help='action')

    parser_nmc = subp.add_parser('nmc',
                                 help='Fractional mean curvature along a curve')
    parser_nmc.add_argument('--curve', required=True, help='Curve file')
    parser_nmc.add_argument('--s', type=float, required=True)
    parser_nmc.add_argument('--count', type=int, help='Node count for resampled curves')
    parser_nmc.add_argument('--method', choices=['boundary', 'region'], default='boundary')
    parser_nmc.add_argument('--rows', type=int_list, help='Node indices, default all')
    parser_nmc.add_argument('--out', required=True, help='Output CSV file')

    parser_energy = subp.add_parser('energy',
                                    help='Nonlocal Willmore energy of a curve')
    parser_energy.add_argument('--curve', required=True, help='Curve file')
    parser_energy.add_argument('--s', type=float, required=True)
    parser_energy.add_argument('--p', type=float)
    parser_energy.add_argument('--critical', action='store_true', help='Use p = 1/s')
    parser_energy.add_argument('--count', type=int, help='Node count for resampled curves')
    parser_energy.add_argument('--outer', type=interval, help='Outer arc window "a,b"')
    parser_energy.add_argument('--inner', type=interval, help='Inner arc window "a,b"')
    parser_energy.add_argument('--absolute', action='store_true')
    parser_energy.add_argument('--refine', type=int_list,
                               help='Node counts of a refinement study, written as CSV')
    parser_energy.add_argument('--out', required=True, help='Output JSON file')

    parser_semi = subp.add_parser('seminorm',
                                  help='Fractional Sobolev seminorm of a function')
    parser_semi.add_argument('--func', required=True, help='Function file')
    parser_semi.add_argument('--t', type=float, required=True)
    parser_semi.add_argument('--p', type=float, default=2.0)
    parser_semi.add_argument('--out', required=True)

    parser_stein = subp.add_parser('stein',
                                   help='Seminorm to fractional Laplacian ratio')
    parser_stein.add_argument('--func', required=True, help='Function file')
    parser_stein.add_argument('--s', type=float, required=True)
    parser_stein.add_argument('--out', required=True)

    parser_toper = subp.add_parser('toper',
                                   help='Tangent-subtracted operator and its spectral prediction')
    parser_toper.add_argument('--func', required=True, help='Function file')
    parser_toper.add_argument('--s', type=float, required=True)
    parser_toper.add_argument('--out', required=True)

    parser_min = subp.add_parser('minimize',
                                 help='Convexity-constrained descent')
    parser_min.add_argument('--config', dest='sub_config', help='Configuration file')
    parser_min.add_argument('--init', help='Support curve file, default a random convex start')
    parser_min.add_argument('--out', required=True, help='Output directory')

    parser_diag = subp.add_parser('diagnose',
                                  help='Diagnostics of a curve sequence')
    parser_diag.add_argument('kind', choices=['lsc', 'concentration'])
    parser_diag.add_argument('--curves', required=True, help='Glob of curve files, sorted by name')
    parser_diag.add_argument('--limit', help='Limit curve file for lsc, default the last member')
    parser_diag.add_argument('--s', type=float, required=True)
    parser_diag.add_argument('--eps', type=float, default=0.5)
    parser_diag.add_argument('--radii', type=float_list, default=[0.1, 0.05, 0.025])
    parser_diag.add_argument('--count', type=int, help='Node count for resampled curves')
    parser_diag.add_argument('--out', help='Output JSON file')

    parser_suite = subp.add_parser('suite',
                                   help='Run an acceptance suite')
    parser_suite.add_argument('name')
    parser_suite.add_argument('--out', help='Output directory')

    parser_plot = subp.add_parser('plotdata',
                                  help='Convert result tables to gnuplot data')
    parser_plot.add_argument('inputs', nargs='+')
    parser_plot.add_argument('--out', default='.', help='Output directory')
    return parser


#: Columns of the curvature table
NMC_COLUMNS = ('node_index', 'arc_param', 'H_s', 'method', 'delta', 'N', 'grid_h', 'converged')


def do_nmc(args, config, manifest):
    curve = _load_curve(args.curve, args.count, manifest)
    rows = args.rows if args.rows is not None else list(range(curve.count))
    if args.method == 'boundary':
        res = nmc_curve(curve, args.s, config.band_nodes, rows=rows, threads=config.threads)
        values = res.values
        converged = [''] * len(rows)
        delta, grid_h = res.near_diag_cutoff, ''
    else:
        region = CurveInterior(curve)
        results = [nmc_region_oracle(region, curve.nodes[row], args.s, config=config.oracle,
                                     threads=config.threads) for row in rows]
        values = [res.value for res in results]
        converged = [int(res.converged) for res in results]
        delta, grid_h = '', config.oracle.grid_h

    with open(args.out, 'w', newline='') as outfile:
        writer = csv.writer(outfile)
        writer.writerow(NMC_COLUMNS)
        for row, value, conv in zip(rows, values, converged):
            writer.writerow([row, repr(float(curve.params[row])), repr(float(value)), args.method,
                             delta, curve.count, grid_h, conv])
    manifest.add_output(args.out)
    return 0


def do_energy(args, config, manifest):
    if args.critical:
        params = FracParams.critical_for(args.s)
    elif args.p is None:
        raise ParameterError('Either --p or --critical is required')
    else:
        params = FracParams(s=args.s, p=args.p)
    curve = _load_curve(args.curve, args.count, manifest)
    brk = willmore_energy(curve, params, args.outer, args.inner, args.absolute,
                          band=config.band_nodes, threads=config.threads)
    data = {
        'total': brk.total,
        'total_outer_s': brk.transform('outer_s'),
        'total_root_p': brk.transform('root_p'),
        'inner': [None if numpy.isnan(val) else float(val) for val in brk.inner],
        's': params.s,
        'p': params.p,
        'critical': params.critical,
        'absolute': args.absolute,
        'outer': args.outer,
        'inner_window': args.inner,
        'N': curve.count,
        'delta': brk.band_length,
    }
    manifest.add_output(_write_json(args.out, data))

    if args.refine:
        with open(args.curve) as infile:
            source = infile.read()

        def factory(count):
            return load_curve(StringIO(source), count)

        rows = refinement_study(factory, params, args.refine, args.absolute)
        path = os.path.splitext(args.out)[0] + '_refine.csv'
        with open(path, 'w') as outfile:
            outfile.write('N,total\n')
            for count, total in rows:
                outfile.write('{},{!r}\n'.format(count, total))
        manifest.add_output(path)
    return 0


def do_seminorm(args, config, manifest):
    func = _load_function(args.func, manifest)
    res = gagliardo_seminorm(func, args.t, args.p)
    data = {'value': res.value, 't': res.order, 'p': res.p, 'domain': res.domain,
            'smooth': res.smooth, 'refinement': res.refinement, 'M': func.count}
    manifest.add_output(_write_json(args.out, data))
    return 0


def do_stein(args, config, manifest):
    func = _load_function(args.func, manifest)
    data = {'ratio': stein_ratio(func, args.s), 's': args.s, 'M': func.count}
    manifest.add_output(_write_json(args.out, data))
    return 0


def do_toper(args, config, manifest):
    func = _load_function(args.func, manifest)
    data = {
        'points': func.points,
        'values': t_operator(func, args.s),
        'oracle': t_operator_oracle(func, args.s),
        's': args.s,
        'h': func.spacing,
    }
    manifest.add_output(_write_json(args.out, data))
    return 0


def do_minimize(args, config, manifest):
    if args.sub_config:
        manifest.add_input(args.sub_config)
        with open(args.sub_config, 'rb') as infile:
            config.from_file(infile)
        manifest.config = config.snapshot()
    desc = config.descent
    manifest.seeds = [desc.seed]
    if args.init:
        manifest.add_input(args.init)
        with open(args.init) as infile:
            init = support_from_dict(json.load(infile))
    else:
        init = random_convex(desc.K, desc.amplitude, desc.seed, desc.eps_kappa)
    trace = minimize_descent(desc, init, config.threads)
    for path in write_trace(trace, args.out, desc):
        manifest.add_output(path)
    manifest.record('descent_monotone',
                    all(b <= a for a, b in zip(trace.energies, trace.energies[1:])),
                    reason=trace.reason, final_energy=trace.final_energy)
    manifest.finish()
    manifest.write('manifest.json', args.out)
    return 0 if manifest.passed else 1


def do_diagnose(args, config, manifest):
    paths = sorted(glob.glob(args.curves))
    if not paths:
        raise PreconditionError('No curve files match {}'.format(args.curves))
    curves = [_load_curve(path, args.count, manifest) for path in paths]
    if args.kind == 'lsc':
        limit = _load_curve(args.limit, args.count, manifest) if args.limit else curves[-1]
        res = lsc_check(curves, limit, args.s, config.tol_lsc, config.threads)
        manifest.record('lsc', res.holds, limit=res.w_limit, proxy=res.liminf_proxy)
        data = {'w_limit': res.w_limit, 'liminf_proxy': res.liminf_proxy,
                'energies': res.energies, 'holds': res.holds}
    else:
        rep = concentration_scan(curves, args.s, args.eps, args.radii, threads=config.threads)
        manifest.record('concentration', rep.holds, points=rep.points, bound=rep.bound)
        data = {'points': rep.points, 'bound': rep.bound, 'lam': rep.lam, 'eps': rep.eps,
                'radii': rep.radii, 'holds': rep.holds}
    if args.out:
        manifest.add_output(_write_json(args.out, data))
    else:
        print(json.dumps(data, indent=2))
    return 0 if manifest.passed else 1


def do_suite(args, config, manifest):
    if args.name not in suite_base.SUITES:
        LOGGER.error('Unknown suite %s, choose from %s', args.name, ', '.join(sorted(suite_base.SUITES)))
        return 2
    result = suite_base.run_suite(args.name, config, args.out, manifest.command)
    for check in result.checks:
        print('{} {}'.format('PASS' if check.passed else 'FAIL', check.name))
    return 0 if result.passed else 1


def do_plotdata(args, config, manifest):
    for path in emit_plotdata(args.inputs, args.out):
        print(path)
    return 0


ACTIONS = {
    'nmc': do_nmc,
    'energy': do_energy,
    'seminorm': do_seminorm,
    'stein': do_stein,
    'toper': do_toper,
    'minimize': do_minimize,
    'diagnose': do_diagnose,
    'suite': do_suite,
    'plotdata': do_plotdata,
}


def main(argv=None):
    ''' Command entry point. '''
    parser = _build_parser()
    args = parser.parse_args(argv)

    root_logging(args.log_level.upper() if args.log_level else 'WARNING')
    logging.debug('command args: %s', args)

    config = Config()
    if args.config_file:
        with open(args.config_file, 'rb') as infile:
            config.from_file(infile)
    if config.log_level and not args.log_level:
        logging.getLogger().setLevel(config.log_level.upper())

    if not args.action:
        parser.print_usage()
        return 2
    manifest = RunManifest(command=list(sys.argv if argv is None else argv), config=config.snapshot(),
                           seeds=[config.seed])
    try:
        return ACTIONS[args.action](args, config, manifest)
    except LIBRARY_ERRORS as err:
        LOGGER.error('%s failed: %s', args.action, err)
        return 1
    except OSError as err:
        LOGGER.error('%s failed on a file: %s', args.action, err)
        return 1


if __name__ == '__main__':
    sys.exit(main())
