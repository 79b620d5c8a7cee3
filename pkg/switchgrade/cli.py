"""
Command-line harness: compute-lambda, verify-paper, ball and trajectory.

Reports go to stdout as JSON (or to --json PATH); logs go to stderr, so the
two never mix. Exit status is 0 on success, 1 when a check fails or the
library raises, 2 for usage errors (argparse's own convention).
"""

import argparse
import logging
import math
import sys
import time
from typing import List, Optional

import numpy as np
from dotenv import load_dotenv

from . import __version__
from .barabanov import (NORM_A, cgm_alpha, cgm_norm, flatness_check, flatness_points, norm_A,
                        norm_B_build, norm_X_finite_horizon_model, tensor_reachability, two_phase_witness)
from .catalog import (B0_PRIME, B1_PRIME, LOG4_OVER_PI, NAMED_MATRICES, named_matrix, named_system,
                      rotation_lambda, system_A, system_B, system_B0, system_B_prime, system_X)
from .config import get_config
from .errors import SwitchgradeError
from .lyapunov import (PolarField, default_grid, growth_envelope, lambda_lower_product_search,
                       lambda_planar_angular, lambda_singleton, lambda_upper_extremal)
from .matexp import expm, opnorm
from .models import Checklist, MeasurableLaw
from .spectral import algebra_closure_rank, hull_is_hurwitz
from .system import evolve
from .utils import ball_boundary, load_schedule, sphere_samples, write_ball, write_report

logger = logging.getLogger(__name__)

AGREEMENT_TOL = 2e-3
BOUND_SLACK = 1e-9
MARGINAL_TOL = 5e-3
ENVELOPE_MAX = 2.0
FLATNESS_TOL = 1e-2


def configure_logging(level: str = None):
    """Timestamped stderr logging in local time."""
    level = (level or get_config('Switchgrade', 'log_level', 'INFO')).upper()
    logging.Formatter.converter = time.localtime
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def _float_list(text: str) -> List[float]:
    """Comma-separated floats; empty lists and non-positive entries are usage errors."""
    parts = [p.strip() for p in text.split(',') if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("expected a non-empty comma-separated list of numbers")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}")
    return values


def _positive_grid(text: str) -> List[float]:
    values = _float_list(text)
    if any(not math.isfinite(v) or v <= 0 for v in values):
        raise argparse.ArgumentTypeError("grid durations must be positive")
    return values


# ===========================================
# compute-lambda
# ===========================================

def cmd_compute_lambda(args) -> int:
    """lambda of the rotating pair by the angular method and/or product search."""
    report = {'method': args.method, 'log4_over_pi': LOG4_OVER_PI, 'agreement_tol': AGREEMENT_TOL}

    if args.method == 'singleton':
        estimate = lambda_singleton(named_matrix(args.matrix))
        report.update(matrix=args.matrix, **estimate.to_dict())
        logger.info(f"📋 Spectral abscissa of {args.matrix}: {estimate.value!r}")
        write_report(report, args.json)
        return 0

    sys_b = system_B_prime()
    angular = product = None
    if args.method in ('both', 'angular'):
        angular = lambda_planar_angular(sys_b, tol=args.tol)
        field = PolarField.from_system(sys_b)
        report['angular'] = angular.to_dict()
        report['angular_function_at_bound'] = field.angular_function(LOG4_OVER_PI)
    if args.method in ('both', 'product'):
        grid = args.grid if args.grid is not None else default_grid(args.grid_steps)
        product = lambda_lower_product_search(sys_b, args.horizon, grid, args.beam)
        report['product'] = product.to_dict()

    ok = True
    if angular is not None:
        report['lambda'] = angular.value
        ok = ok and angular.value >= LOG4_OVER_PI - BOUND_SLACK
    if product is not None:
        report.setdefault('lambda', product.lower)
        if angular is not None:
            report['agreement'] = abs(angular.value - product.lower)
            ok = ok and report['agreement'] <= AGREEMENT_TOL
        else:
            ok = ok and product.lower >= LOG4_OVER_PI - AGREEMENT_TOL
    report['status'] = 'PASS' if ok else 'FAIL'
    marker = '✓' if ok else '✗'
    logger.info(f"{marker} lambda = {report['lambda']!r} (bound log 4/pi = {LOG4_OVER_PI!r})")
    write_report(report, args.json)
    return 0 if ok else 1


# ===========================================
# verify-paper
# ===========================================

def _run_item(checklist: Checklist, name: str, check):
    """Run one check; library errors become FAIL items instead of tracebacks."""
    try:
        passed, details = check()
    except SwitchgradeError as e:
        logger.error(f"✗ {name} raised {type(e).__name__}: {e}")
        passed, details = False, {'error': f"{type(e).__name__}: {e}"}
    checklist.add(name, passed, **details)


def _check_lambda(offset: float):
    lam = rotation_lambda()
    F = PolarField.from_system(system_B_prime()).angular_function(LOG4_OVER_PI)
    return lam >= LOG4_OVER_PI - BOUND_SLACK and F > 1e-4, {
        'lambda': lam, 'offset': offset, 'shift': lam + offset, 'angular_function_at_bound': F}


def _check_rank(offset: float):
    rank = algebra_closure_rank(system_X(offset))
    return rank == 16, {'rank': rank}


def _check_hurwitz(offset: float):
    ok, worst = hull_is_hurwitz(system_X(offset), samples=50, seed=0)
    return ok, {'worst_spectral_abscissa': worst, 'hull_samples': 50}


def _check_product_identity(offset: float):
    P = expm(B0_PRIME, np.pi / 2) @ expm(B1_PRIME, np.pi / 2)
    errors, M = [], np.eye(2)
    for n in range(1, 11):
        M = M @ P
        errors.append(abs(opnorm(M) / 4.0 ** n - 1.0))
    return max(errors) <= 1e-9, {'max_relative_error': max(errors), 'n_max': 10}


def _check_norm_A(offset: float):
    report = lambda_upper_extremal(system_A(), NORM_A, 0.0)
    drift = 0.0
    for v in sphere_samples(2, 50):
        traj = evolve(system_A(), two_phase_witness(v, 10.0), v, 1e-2)
        values = NORM_A(traj.states)
        drift = max(drift, float(np.max(np.abs(values - norm_A(v)))))
    return report.passed and drift <= 1e-8, {'certificate': report.to_dict(), 'witness_drift': drift}


def _check_norm_B(offset: float):
    table = norm_B_build(system_B(offset))
    traj = evolve(system_B(offset), table.generating_schedule(), [1.0, 0.0], 1e-2)
    return_gap = float(np.linalg.norm(traj.final - traj.states[0]))
    certs = {label: lambda_upper_extremal(system, table, 0.0)
             for label, system in (('B', system_B(offset)), ('B0', system_B0(offset)))}
    passed = return_gap <= 1e-6 and all(c.passed for c in certs.values())
    return passed, {'closure_residual': table.closure_residual, 'period': table.period,
                    'return_gap': return_gap, **{f'certificate_{k}': c.to_dict() for k, c in certs.items()}}


def _check_marginal_stability(offset: float):
    estimate = lambda_lower_product_search(system_X(offset), 40.0, default_grid(64), 32)
    envelope = growth_envelope(system_X(offset), schedules=500, duration=50.0, seed=0)
    bracketed = -MARGINAL_TOL <= estimate.lower <= MARGINAL_TOL
    bounded = envelope['C'] <= ENVELOPE_MAX
    return bracketed and bounded, {'lower': estimate.lower, 'tolerance': MARGINAL_TOL, 'bracketed': bracketed,
                                  'growth_envelope': envelope, 'envelope_max': ENVELOPE_MAX, 'bounded': bounded}


def _check_tensor_factorisation(offset: float):
    alpha = MeasurableLaw.from_alpha(lambda t: 1.0 / (1.0 + t) ** 2, label='alpha')

    def b0_weights(ts):
        a = 1.0 / (1.0 + np.asarray(ts)) ** 2
        return np.column_stack([a, 0.5 * (1 - a), 0.5 * (1 - a)])

    lawB0 = MeasurableLaw(b0_weights, 3, vectorized=True, label='b0')
    result = tensor_reachability(alpha, lawB0, [1.0, 0.5], [1.0, 0.0], T=20.0, offset=offset)
    return result['residual'] <= 1e-8, result


def _check_flatness(offset: float, horizon: float, beam: int):
    _, probes = flatness_points(1.0, (1.0, 0.0), 21)
    model = norm_X_finite_horizon_model(system_X(offset), horizon, probes, beam)
    report = flatness_check(model, 1.0, (1.0, 0.0), 21, FLATNESS_TOL)
    return report.max_relative_deviation <= FLATNESS_TOL, {
        'report': report.to_dict(), 'model': model.params()}


def cmd_verify_paper(args) -> int:
    """Run the whole checklist in order and report PASS/FAIL per item."""
    offset = args.lambda_offset
    checklist = Checklist(constants={
        'log4_over_pi': LOG4_OVER_PI, 'lambda_offset': offset, 'agreement_tol': AGREEMENT_TOL,
        'marginal_tol': MARGINAL_TOL, 'envelope_max': ENVELOPE_MAX, 'flatness_tol': FLATNESS_TOL,
        'flatness_horizon': args.flatness_horizon, 'flatness_beam': args.flatness_beam,
    })
    logger.info("=" * 60)
    logger.info(f"🚀 Verifying the construction (lambda offset {offset:+g})")
    logger.info("=" * 60)
    _run_item(checklist, 'lambda', lambda: _check_lambda(offset))
    checklist.constants['lambda'] = rotation_lambda()
    _run_item(checklist, 'algebra_rank', lambda: _check_rank(offset))
    _run_item(checklist, 'hurwitz', lambda: _check_hurwitz(offset))
    _run_item(checklist, 'product_identity', lambda: _check_product_identity(offset))
    _run_item(checklist, 'norm_A_extremal', lambda: _check_norm_A(offset))
    _run_item(checklist, 'norm_B', lambda: _check_norm_B(offset))
    _run_item(checklist, 'marginal_stability', lambda: _check_marginal_stability(offset))
    _run_item(checklist, 'tensor_factorisation', lambda: _check_tensor_factorisation(offset))
    if not args.skip_flatness:
        _run_item(checklist, 'flatness',
                  lambda: _check_flatness(offset, args.flatness_horizon, args.flatness_beam))

    write_report(checklist.to_dict(), args.json)
    if checklist.passed:
        logger.info("✓ All checks passed")
        return 0
    logger.error(f"✗ Failed: {', '.join(checklist.failures)}")
    return 1


# ===========================================
# ball / trajectory
# ===========================================

def cmd_ball(args) -> int:
    """Unit-ball boundary of a planar extremal norm."""
    if args.system == 'A':
        norm = NORM_A
    elif args.system == 'B':
        norm = norm_B_build(system_B())
    else:
        norm = cgm_norm(cgm_alpha())
    theta, points = ball_boundary(norm, args.samples)
    write_ball(args.output, theta, points, args.format)
    return 0


def _vector(text: str) -> np.ndarray:
    return np.array(_float_list(text))


def cmd_trajectory(args) -> int:
    """Evolve a system under a schedule file and write the trajectory CSV."""
    sys_ = named_system(args.system)
    sched = load_schedule(args.schedule, sys_.size)
    if args.horizon is not None:
        sched = sched.fit_horizon(args.horizon)
    x0 = args.x0 if args.x0 is not None else np.eye(sys_.dim)[0]
    traj = evolve(sys_, sched, x0, args.sample_step)
    traj.to_csv(args.output)
    logger.info(f"📋 {sys_.label}: {traj.times.size} samples up to t = {traj.times[-1]:.6g} written to {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='switchgrade',
                                     description='Growth rates and extremal norms of linear switching systems')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--log-level', default=None, help='Log level (default SWITCHGRADE_LOG_LEVEL or INFO)')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('compute-lambda', help='Growth rate of the rotating pair')
    p.add_argument('--method', choices=['both', 'angular', 'product', 'singleton'], default='both')
    p.add_argument('--grid', type=_positive_grid, default=None, help='Comma-separated duration grid')
    p.add_argument('--grid-steps', type=int, default=64, help='n in the default grid pi/n * j')
    p.add_argument('--beam', type=int, default=64)
    p.add_argument('--horizon', type=float, default=16 * np.pi)
    p.add_argument('--tol', type=float, default=1e-10, help='Bisection tolerance of the angular method')
    p.add_argument('--matrix', choices=NAMED_MATRICES, default='A1', help='Matrix for --method singleton')
    p.add_argument('--json', default=None, help='Write the report here instead of stdout')
    p.set_defaults(func=cmd_compute_lambda)

    p = sub.add_parser('verify-paper', help='Run every structural and numerical check')
    p.add_argument('--lambda-offset', type=float, default=0.0, help='Perturb the shift lambda by this much')
    p.add_argument('--flatness-horizon', type=float, default=40.0)
    p.add_argument('--flatness-beam', type=int, default=64)
    p.add_argument('--skip-flatness', action='store_true', help='Skip the slow 4D flatness item')
    p.add_argument('--json', default=None)
    p.set_defaults(func=cmd_verify_paper)

    p = sub.add_parser('ball', help='Unit-ball boundary of a planar extremal norm')
    p.add_argument('--system', choices=['A', 'B', 'cgm'], default='A')
    p.add_argument('--samples', type=int, default=3600)
    p.add_argument('--output', required=True)
    p.add_argument('--format', choices=['csv', 'json'], default='csv')
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser('trajectory', help='Evolve a system under a schedule file')
    p.add_argument('--system', choices=['A', 'B', 'B0', 'X'], default='A')
    p.add_argument('--schedule', required=True, help='JSON array of {duration, weights}')
    p.add_argument('--x0', type=_vector, default=None, help='Initial state, e.g. "1,0"')
    p.add_argument('--horizon', type=float, default=None, help='Repeat/truncate the schedule to this length')
    p.add_argument('--output', required=True)
    p.add_argument('--sample-step', type=float, default=None)
    p.set_defaults(func=cmd_trajectory)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.func(args)
    except SwitchgradeError as e:
        logger.error(f"✗ {args.command}: {e}")
        return 1
