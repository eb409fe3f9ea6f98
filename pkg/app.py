"""
Command-line front end: simulate, hierarchy and verify
"""
import argparse
import logging
import os
import sys
import time

import numpy as np

from analysis import classification, lenard_hierarchy
from analysis.errors import BihamError, BlowUp, ConfigError, LadderBreak, SingularSymbol
from analysis.euler_flow import FlowState, evolve
from analysis.lie_ops import CocycleOperator, InertiaOperator, compatibility_residual
from analysis.verification import run_suite
from config.settings import BLOWUP_GUARD, REPORT_DIR, resolve_config
from data_fetchers.initial_data import get_initial_momentum
from utils.report_store import ReportStore, dumps, write_csv, write_json

# Configure logging with more detail
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_ABORTED = 3

ORACLE_TOL = 1e-9


def build_parser():
    parser = argparse.ArgumentParser(prog='biham', description="Euler equations on the circle diffeomorphism group")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--a', type=float, help="A = aI + bD^2: coefficient of I")
    common.add_argument('--b', type=float, help="A = aI + bD^2: coefficient of D^2")
    common.add_argument('--coeffs', help="even coefficients a0,a2,a4,... or a preset name")
    common.add_argument('--alpha', type=float, help="cocycle Q = alpha D + beta D^3")
    common.add_argument('--beta', type=float)
    common.add_argument('--m0', type=float, help="affine part (alpha = 2 m0)")
    common.add_argument('--n', type=int, help="grid size (power of two)")
    common.add_argument('--dt', type=float)
    common.add_argument('--steps', type=int)
    common.add_argument('--depth', type=int)
    common.add_argument('--seed', type=int)
    common.add_argument('--tol', type=float)
    common.add_argument('--init', help="zero | cosine:amp | random:seed | file:path (initial velocity)")
    common.add_argument('--out', help="output path (stdout for JSON when omitted)")
    common.add_argument('--config', help="key=value config file (default: $BIHAM_CONFIG)")
    common.add_argument('--save', action='store_true', help=f"also store the report under {REPORT_DIR}/")
    common.add_argument('-v', '--verbose', action='store_true')
    common.add_argument('--quiet', action='store_true')

    commands = parser.add_subparsers(dest='command', required=True)
    simulate = commands.add_parser('simulate', parents=[common], help="integrate the Euler equation and track drifts")
    simulate.add_argument('--record-interval', dest='record_interval', type=int)
    simulate.add_argument('--filter', dest='filter_strength', type=float, help="exponential filter strength (off by default)")
    commands.add_parser('hierarchy', parents=[common], help="generate the Lenard ladder at the initial state")
    verify = commands.add_parser('verify', parents=[common], help="run a property suite")
    verify.add_argument('--suite')
    return parser


def resolve_inertia(config):
    A = InertiaOperator(config.even_coeffs())
    A.check_invertible(config.n)
    return A


def resolve_cocycle(config, A):
    """Q from --alpha/--beta/--m0, Q = DA otherwise"""
    if config.alpha is None and config.beta is None and config.m0 is None:
        return CocycleOperator.from_inertia(A) if A.order <= 2 else None
    if config.m0 is not None:
        return CocycleOperator(config.m0, config.beta or 0.0)
    return CocycleOperator.from_alpha_beta(config.alpha or 0.0, config.beta or 0.0)


def _emit(data, out):
    if out:
        write_json(out, data)
    else:
        sys.stdout.write(dumps(data))


def _save(args, key, data):
    if args.save:
        ReportStore(REPORT_DIR).set(key, data)


def cmd_simulate(args, config):
    A = resolve_inertia(config)
    m = get_initial_momentum(config.init, A, config.n)
    state = FlowState(0.0, m, A)
    out = config.out or 'simulate.csv'
    summary_path = os.path.splitext(out)[0] + '.summary.json'
    logging.info(f"Simulating A = {A}, N = {m.n}, dt = {config.dt:g}, {config.steps} steps")

    started = time.perf_counter()
    status, code, series = 'ok', EXIT_OK, None
    try:
        series = evolve(state, config.dt, config.steps, hierarchy_depth=config.depth,
                        record_interval=config.record_interval, filter_strength=config.filter_strength,
                        quad_points=config.quad_points, guard=BLOWUP_GUARD)
    except (BlowUp, LadderBreak) as e:
        logging.error(f"Simulation aborted: {str(e)}")
        status, code, series = type(e).__name__, EXIT_ABORTED, e.partial

    summary = {
        'status': status,
        'A': A.to_dict(),
        'n': m.n,
        'dt': config.dt,
        'steps': config.steps,
        'depth': config.depth,
        'init': config.init,
        'filter_strength': config.filter_strength,
        'recorded': 0 if series is None else len(series.times),
        'max_drifts': {} if series is None else series.max_drifts(),
        'runtime_seconds': time.perf_counter() - started,
    }
    if series is not None:
        write_csv(out, series.to_frame())
    write_json(summary_path, summary)
    _save(args, f"simulate_seed{config.seed}", summary)
    return code


def _oracle(A, m, result):
    """Compare generated H_k with the closed forms when A is Burgers or Camassa-Holm"""
    if A.even_coeffs == (1.0,):
        name, levels = 'burgers', range(1, result.depth + 1)
        reference = {k: lenard_hierarchy.burgers_closed_form(k - 1, m) for k in levels}
    elif A.even_coeffs == (1.0, -1.0):
        name, levels = 'camassa_holm', range(1, min(result.depth, 3) + 1)
        reference = {k: lenard_hierarchy.ch_explicit(k, m) for k in levels}
    else:
        return None
    errors = {f"H_{k}": lenard_hierarchy.oracle_error(result.level(k).H_value, v) for k, v in reference.items()}
    return {
        'family': name,
        'reference': {f"H_{k}": v for k, v in reference.items()},
        'relative_errors': errors,
        'oracle_match': all(e <= ORACLE_TOL for e in errors.values()),
    }


def _hierarchy_report(config, A, m, result):
    report = result.to_json()
    report['oracle'] = _oracle(A, m, result)
    if result.depth >= 2:
        report['involution'] = {
            structure: lenard_hierarchy.involution_matrix(result, structure).values.tolist()
            for structure in ('lie_poisson', 'cocycle')
        }
    Q = resolve_cocycle(config, A)
    if Q is not None:
        report['cocycle'] = {
            'Q': Q.to_dict(),
            'compatibility_residual': compatibility_residual(Q, m.n, seed=config.seed),
            'symmetry_probe': classification.symmetry_probe(A, Q, m, seed=config.seed),
        }
        if Q.is_constant:
            report['cocycle']['mode_residuals'] = classification.mode_residuals(A, Q.alpha, Q.beta).tolist()
    if A.order <= 2:
        report['closed_form_h3'] = lenard_hierarchy.closed_form_h3(A, m)
        report['bihamiltonian_residual'] = lenard_hierarchy.bihamiltonian_residual(A, m)
    return report


def cmd_hierarchy(args, config):
    A = resolve_inertia(config)
    m = get_initial_momentum(config.init, A, config.n)
    code = EXIT_OK
    try:
        result = lenard_hierarchy.generate(A, m, config.depth, config.quad_points, config.tol_mean)
    except LadderBreak as e:
        logging.error(f"Ladder aborted: {str(e)}")
        result, code = e.partial, EXIT_ABORTED
    report = _hierarchy_report(config, A, m, result)
    _emit(report, config.out)
    _save(args, f"hierarchy_depth{config.depth}_seed{config.seed}", report)
    return code


def cmd_verify(args, config):
    report = run_suite(config.suite, n=config.n, seed=config.seed, tol=config.tol)
    data = report.to_dict()
    _emit(data, config.out)
    _save(args, f"verify_{config.suite}_seed{config.seed}", data)
    if not report.passed:
        logging.error(f"Failed checks: {', '.join(data['failed'])}")
        return EXIT_FAILED
    return EXIT_OK


COMMANDS = {
    'simulate': cmd_simulate,
    'hierarchy': cmd_hierarchy,
    'verify': cmd_verify,
}


def main(argv=None):
    """Parse arguments, run the command and return the exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    elif args.quiet:
        logging.getLogger().setLevel(logging.WARNING)
    np.seterr(over='ignore', invalid='ignore')

    cli_values = {k: v for k, v in vars(args).items() if k not in ('command', 'config', 'save', 'verbose', 'quiet')}
    try:
        config = resolve_config(cli_values, args.config)
        return COMMANDS[args.command](args, config)
    except (ConfigError, SingularSymbol, ValueError) as e:
        logging.error(f"Configuration error: {str(e)}")
        return EXIT_CONFIG
    except (BlowUp, LadderBreak) as e:
        logging.error(f"Run aborted: {str(e)}")
        return EXIT_ABORTED
    except BihamError as e:
        logging.error(f"Computation failed: {str(e)}")
        return EXIT_FAILED
