"""
Long-run behaviour of trajectories of the A-system and of the tensor lift X.

Every A-trajectory converges to a point on the horizontal axis, and a nonzero
limit forces the A1-weight alpha to be integrable. For X the state started at
u (x) v stays a tensor product x(t) (x) y(t) of an A-trajectory and a
B0-trajectory driven by the factored law. The same lifts carry the growth-rate
calculus, with the planar extremal norms as upper-bound certificates.
"""

import logging
from typing import Optional

import numpy as np
from scipy.integrate import quad

from ..catalog import system_A, system_B, system_B0, system_X, tensor_families
from ..errors import DimensionError
from ..lyapunov import lambda_calculus_checks, lambda_upper_extremal
from ..matexp import as_vec, kron
from ..models import CalculusReport, LimitReport, MeasurableLaw
from ..system import chatter_discretize, evolve, split_tensor_schedule, tensor_lift
from .closed_form import NORM_A
from .polar_table import norm_B_build

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 100.0
PIECE_LENGTH = 2e-3
ZERO_LIMIT = 1e-6
TAIL_TOL = 5e-2


def _alpha_integral(law: MeasurableLaw, a: float, b: float) -> float:
    value, _ = quad(lambda t: float(law(t)[1]), a, b, limit=500, epsabs=1e-12, epsrel=1e-12)
    return float(value)


def x_limit_behavior(law: MeasurableLaw, x0, horizon: float = DEFAULT_HORIZON,
                     pieces: Optional[int] = None) -> LimitReport:
    """
    Integrate the A-system under `law` and compare with the limit dichotomy.

    The law is chattered into vertex pieces on windows of length 2e-3. The
    Euclidean norm can only shrink along A-trajectories (A0 and A1 have
    negative semidefinite symmetric parts), which is checked as the decay
    bound. A limit counts as nonzero above 1e-6 |x0|; then the integral of
    alpha over the second half of the horizon must be below 5e-2.
    """
    if law.size != 2:
        raise DimensionError("x_limit_behavior needs a 2-generator law")
    sysA = system_A()
    x0 = as_vec(x0, 2, 'x0')
    pieces = pieces or max(1, int(round(horizon / PIECE_LENGTH)))
    traj = evolve(sysA, chatter_discretize(law, horizon, pieces), x0, step=horizon / 100)
    limit = traj.final
    radii = np.linalg.norm(traj.states, axis=1)
    decay_ok = bool(np.all(np.diff(radii) <= 1e-12 * max(1.0, radii[0])))

    total = _alpha_integral(law, 0.0, horizon)
    tail = _alpha_integral(law, 0.5 * horizon, horizon)
    zero_limit = np.linalg.norm(limit) <= ZERO_LIMIT * max(np.linalg.norm(x0), 1e-300)
    consistent = bool(zero_limit or tail <= TAIL_TOL)
    marker = '✓' if consistent else '✗'
    logger.info(f"{marker} {law.label}: x({horizon:g}) = {limit.tolist()}, integral of alpha {total:.6g}")
    return LimitReport(limit.tolist(), float(limit[1]), total, tail, horizon, decay_ok, consistent)


def tensor_reachability(lawA: MeasurableLaw, lawB0: MeasurableLaw, u, v, T: float = 20.0,
                        pieces: Optional[int] = None, offset: float = 0.0) -> dict:
    """
    Run X from u (x) v and the two factors separately under the same pieces.

    Returns:
        dict with the worst relative residual |z - x (x) y| / max(1, |z|) over
        all samples, the final factor states, and the second coordinate of x
        (which drains towards the horizontal axis)
    """
    u, v = as_vec(u, 2, 'u'), as_vec(v, 2, 'v')
    pieces = pieces or max(1, int(round(T / 1e-2)))
    sched_X = chatter_discretize(tensor_lift(lawA, lawB0), T, pieces)
    sched_A, sched_B0 = split_tensor_schedule(sched_X)
    step = T / 200
    z = evolve(system_X(offset), sched_X, kron(u, v), step)
    x = evolve(system_A(), sched_A, u, step)
    y = evolve(system_B0(offset), sched_B0, v, step)
    products = np.einsum('ni,nj->nij', x.states, y.states).reshape(z.states.shape)
    residual = float(np.max(np.linalg.norm(z.states - products, axis=1)
                            / np.maximum(1.0, np.linalg.norm(z.states, axis=1))))
    marker = '✓' if residual <= 1e-8 else '✗'
    logger.info(f"{marker} Tensor factorisation residual {residual:.2e} over {z.times.size} samples")
    return {'residual': residual, 'x_final': x.final.tolist(), 'y_final': y.final.tolist(),
            'z_final': z.final.tolist(), 'x_second_coordinate': float(x.final[1]), 'horizon': T}


def tensor_calculus_checks(offset: float = 0.0, **kwargs) -> CalculusReport:
    """
    Lambda calculus on the commuting lifts A (x) I and I (x) B0 with certified uppers.

    Lambda(A) <= 0 comes from the closed-form norm and Lambda(B0) <= 0 from the
    polar table, both as extremal certificates at mu = 0. Lifting by (x) I
    leaves the growth rate unchanged, so these bound the lifted families and
    the sum rule reads Lambda(X) <= 0. A failed certificate leaves that upper
    to the search value.

    Raises:
        LambdaInconsistencyError: The polar table does not close at this offset
    """
    certificates = {
        'A': lambda_upper_extremal(system_A(), NORM_A, 0.0),
        'B': lambda_upper_extremal(system_B0(offset), norm_B_build(system_B(offset)), 0.0),
    }
    uppers = {k: c.estimate.upper if c.passed else None for k, c in certificates.items()}
    for key, cert in certificates.items():
        if not cert.passed:
            logger.warning(f"⚠ {cert.norm} is not extremal for {cert.system}; using the search value for {key}")
    lifted_A, lifted_B = tensor_families(offset)
    return lambda_calculus_checks(lifted_A, lifted_B, uppers['A'], uppers['B'], **kwargs)
