"""
Bounds on the top Lyapunov exponent.

Lower bounds come from products of exponentials: the spectral radius of any
product P of total duration t satisfies rho(P)^(1/t) <= e^Lambda, so the best
(1/t) log rho(P) among the products the beam search keeps is a rigorous lower
bound. The operator-norm rate at the horizon is reported alongside; it tends
to Lambda too, but from whichever side it pleases.

Upper bounds come from extremal-norm certificates: if e^(-mu t) f(e^(tA_i) v)
never increases for any vertex A_i and direction v, then Lambda <= mu.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Optional

import numpy as np

from ..config import get_int_config, get_threads
from ..errors import MethodInapplicableError
from ..matexp import expm_batch, expm_stack, opnorm_batch, spectral_radius_batch
from ..models import (CalculusReport, CertificateReport, CheckStatus, EstimateMethod, LyapunovEstimate,
                      NormModel, SwitchingSystem)
from ..spectral import spectral_abscissa
from ..utils.sampling import sphere_samples
from .beam import beam_search, default_grid

logger = logging.getLogger(__name__)

EXTREMAL_SLACK = 1e-9
COMMUTE_TOL = 1e-12
CALCULUS_SLACK = 5e-3
DEFAULT_SAMPLES = 200


def lambda_singleton(A) -> LyapunovEstimate:
    """A single matrix grows exactly at its spectral abscissa."""
    value = spectral_abscissa(A)
    return LyapunovEstimate(value, value, EstimateMethod.SINGLETON)


def lambda_lower_product_search(sys: SwitchingSystem, T: float, durations=None, beam: int = None,
                                workers: int = None) -> LyapunovEstimate:
    """
    Lower bound on Lambda from the best products of exponentials.

    Beam search ranks vertex products of total duration up to T by operator
    norm. `lower` is the largest (1/t) log spectral radius among everything
    kept; details carry the operator-norm rate at T and the schedule of the
    product achieving `lower`.

    Args:
        sys: Switching system
        T: Horizon
        durations: Duration grid (default pi/64 * j, j = 1..64)
        beam: Products kept per time bucket (default 64)

    Returns:
        LyapunovEstimate with upper = +inf
    """
    result = beam_search(sys, T, durations, beam, workers=workers)
    best_rate, best_at = -math.inf, (0, 0)
    for b, bucket in sorted(result.buckets.items()):
        if b == 0 or not bucket.size:
            continue
        with np.errstate(divide='ignore'):
            rates = np.log(spectral_radius_batch(bucket.products)) / result.time_of(b)
        k = int(np.argmax(rates))
        if rates[k] > best_rate:
            best_rate, best_at = float(rates[k]), (b, k)

    final = result.buckets.get(result.final_bucket)
    opnorm_rate = float(np.log(final.scores[0]) / result.horizon) if final is not None else -math.inf
    witness = result.schedule(*best_at) if best_rate > -math.inf else None
    logger.info(f"🔍 {sys.label}: product search lower bound {best_rate:.9f} "
                f"(operator-norm rate at T={result.horizon:.6g}: {opnorm_rate:.9f})")
    details = {
        'opnorm_rate': opnorm_rate,
        'witness_duration': witness.total if witness is not None else 0.0,
        'witness_pieces': witness.to_records() if witness is not None else [],
        'budget_exhausted': result.pruned,
    }
    return LyapunovEstimate(best_rate, math.inf, EstimateMethod.PRODUCT_SEARCH, result.budget, details)


def lambda_upper_extremal(sys: SwitchingSystem, norm: NormModel, mu: float = 0.0, samples: int = None,
                          t_max: float = 5.0, dt: float = 1e-2, slack: float = EXTREMAL_SLACK) -> CertificateReport:
    """
    Certify Lambda(sys) <= mu by checking a candidate norm along every vertex flow.

    For `samples` low-discrepancy unit vectors v and every generator A_i,
    t -> e^(-mu t) norm(e^(t A_i) v) must be non-increasing on the grid
    0, dt, ..., t_max, up to slack * max(1, value).

    Returns:
        CertificateReport; on FAIL the witness names the generator, the start
        vector, the offending time pair and the increase
    """
    samples = samples or get_int_config('Extremal', 'samples', DEFAULT_SAMPLES)
    vs = sphere_samples(sys.dim, samples)
    ts = dt * np.arange(int(round(t_max / dt)) + 1)
    decay = np.exp(-mu * ts)[:, None]

    worst, witness = -math.inf, None
    for i, G in enumerate(sys.generators):
        states = np.einsum('tij,sj->tsi', expm_batch(G, ts), vs)
        values = norm(states) * decay
        excess = np.diff(values, axis=0) - slack * np.maximum(1.0, values[:-1])
        k, s = np.unravel_index(np.argmax(excess), excess.shape)
        increase = float(values[k + 1, s] - values[k, s])
        if excess[k, s] > 0 and (witness is None or increase > witness['increase']):
            witness = {'generator': i, 'v': vs[s].tolist(), 't_pair': [float(ts[k]), float(ts[k + 1])],
                       'increase': increase}
        worst = max(worst, increase)

    status = CheckStatus.FAIL if witness else CheckStatus.PASS
    estimate = None
    if status is CheckStatus.PASS:
        estimate = LyapunovEstimate(-math.inf, mu, EstimateMethod.EXTREMAL_CERTIFICATE,
                                    {'samples': samples, 't_max': t_max, 'dt': dt})
        logger.info(f"✓ {norm.name} is extremal for {sys.label} at mu={mu:g}")
    else:
        logger.info(f"✗ {norm.name} increases along generator {witness['generator']} of {sys.label} "
                    f"by {witness['increase']:.3g}")
    return CertificateReport(status, sys.label, norm.name, mu, samples, t_max, dt, slack, worst, witness, estimate)


def commute(sysA: SwitchingSystem, sysB: SwitchingSystem, tol: float = COMMUTE_TOL) -> bool:
    """Every generator of sysA commutes with every generator of sysB."""
    return all(np.abs(A @ B - B @ A).max() <= tol for A in sysA.generators for B in sysB.generators)


def union_system(sysA: SwitchingSystem, sysB: SwitchingSystem) -> SwitchingSystem:
    return SwitchingSystem(sysA.generators + sysB.generators, f"{sysA.label}u{sysB.label}")


def sum_system(sysA: SwitchingSystem, sysB: SwitchingSystem) -> SwitchingSystem:
    return SwitchingSystem(tuple(A + B for A in sysA.generators for B in sysB.generators),
                           f"{sysA.label}+{sysB.label}")


def lambda_calculus_checks(sysA: SwitchingSystem, sysB: SwitchingSystem, upper_a: Optional[float] = None,
                           upper_b: Optional[float] = None, T: float = 4 * np.pi, durations=None,
                           beam: int = 16, slack: float = CALCULUS_SLACK) -> CalculusReport:
    """
    Monotonicity, union and sum rules for two commuting systems.

    Estimates A, B, their union C and their sum D by product search and checks:
    lower(A), lower(B) <= lower(C) + slack; lower(C) matches
    max(lower(A), lower(B)) within slack; lower(D) <= upper(A) + upper(B) + slack.
    Certified uppers can be passed in; otherwise the search value stands in
    and the report says so.

    Raises:
        MethodInapplicableError: Some pair of generators does not commute
    """
    if not commute(sysA, sysB):
        raise MethodInapplicableError(f"{sysA.label} and {sysB.label} do not commute")
    durations = default_grid(16) if durations is None else durations
    systems = {'A': sysA, 'B': sysB, 'C': union_system(sysA, sysB), 'D': sum_system(sysA, sysB)}

    def estimate(item):
        key, sys = item
        return key, lambda_lower_product_search(sys, T, durations, beam, workers=1)

    with ThreadPoolExecutor(max_workers=min(len(systems), get_threads())) as executor:
        estimates: Dict[str, LyapunovEstimate] = dict(executor.map(estimate, systems.items()))

    lower = {k: e.lower for k, e in estimates.items()}
    ua = upper_a if upper_a is not None else lower['A']
    ub = upper_b if upper_b is not None else lower['B']
    clauses = {
        'monotone': lower['A'] <= lower['C'] + slack and lower['B'] <= lower['C'] + slack,
        'union_is_max': abs(lower['C'] - max(lower['A'], lower['B'])) <= slack,
        'sum_is_subadditive': lower['D'] <= ua + ub + slack,
        'certified_uppers': upper_a is not None and upper_b is not None,
    }
    passed = clauses['monotone'] and clauses['union_is_max'] and clauses['sum_is_subadditive']
    logger.info(f"{'✓' if passed else '✗'} Lambda calculus on {sysA.label}, {sysB.label}: {clauses}")
    return CalculusReport(CheckStatus.PASS if passed else CheckStatus.FAIL, estimates, clauses, slack,
                          {'A': upper_a, 'B': upper_b})


def growth_envelope(sys: SwitchingSystem, schedules: int = 500, duration: float = 50.0, mean_piece: float = 1.0,
                    seed: int = 0) -> dict:
    """
    Largest transition-matrix norm over random vertex schedules.

    Pieces have exponential lengths and uniform random vertices; the norm of
    every prefix product is recorded at piece boundaries. A marginally stable
    system keeps this bounded no matter how long the schedules get.
    """
    rng = np.random.default_rng(seed)
    worst, worst_schedule = 0.0, -1
    for s in range(schedules):
        lengths = rng.exponential(mean_piece, size=int(3 * duration / mean_piece) + 16)
        ends = np.cumsum(lengths)
        count = int(np.searchsorted(ends, duration)) + 1
        lengths = lengths[:count]
        lengths[-1] -= ends[count - 1] - duration
        gens = rng.integers(0, sys.size, size=count)
        E = expm_stack(sys.stack[gens], lengths)
        prefix = np.empty_like(E)
        M = np.eye(sys.dim)
        for k in range(count):
            M = E[k] @ M
            prefix[k] = M
        peak = float(opnorm_batch(prefix).max())
        if peak > worst:
            worst, worst_schedule = peak, s
    logger.info(f"📋 {sys.label}: growth envelope C = {worst:.6g} over {schedules} schedules of length {duration:g}")
    return {'C': worst, 'schedules': schedules, 'duration': duration, 'mean_piece': mean_piece,
            'seed': seed, 'worst_schedule': worst_schedule}
