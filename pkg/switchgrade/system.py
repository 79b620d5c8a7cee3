"""
Switching-system evolution and the chattering discretization.

Schedules are the only runtime representation of switching laws. Measurable
laws come in through chatter_discretize (vertex schedules whose occupation
times match the law window by window) and are never integrated directly,
except by the RK4 reference solver that exists to check the discretization.
"""

import logging
import math
from typing import List, NamedTuple, Tuple

import numpy as np
from scipy.integrate import quad_vec

from .config import get_float_config
from .errors import AccuracyError, DimensionError, InvalidInputError, MatrixOverflowError, RangeError
from .matexp import as_vec, expm_batch, expm_stack
from .models import MeasurableLaw, Schedule, SwitchingSystem, Trajectory

logger = logging.getLogger(__name__)

DEFAULT_SAMPLE_STEP = 1e-2
WINDOW_TOL = 1e-10
CHUNK = 1 << 16
INT64_MAX = 2 ** 63 - 1

_GL_LOW = np.polynomial.legendre.leggauss(8)
_GL_HIGH = np.polynomial.legendre.leggauss(12)


def sample_step() -> float:
    """Intra-piece sampling step, SYSTEM_SAMPLE_STEP or 1e-2."""
    step = get_float_config('System', 'sample_step', DEFAULT_SAMPLE_STEP)
    if not step > 0:
        logger.warning(f"⚠ SYSTEM_SAMPLE_STEP={step} is not positive, using {DEFAULT_SAMPLE_STEP}")
        return DEFAULT_SAMPLE_STEP
    return step


def _check_pair(sys: SwitchingSystem, sched: Schedule):
    if sched.size != sys.size:
        raise DimensionError(f"schedule has {sched.size} weights per piece, {sys.label} has {sys.size} generators")


def piece_exponentials(sys: SwitchingSystem, sched: Schedule, start: int = 0, stop: int = None) -> np.ndarray:
    """
    e^{d_j G_j} for pieces start..stop, G_j = sum_i w_ji A_i.

    Every evolution routine goes through here, so vertex schedules give the
    same matrices whether they are evolved, propagated or multiplied out.
    """
    _check_pair(sys, sched)
    stop = sched.pieces if stop is None else stop
    G = np.tensordot(sched.weights[start:stop], sys.stack, axes=1)
    return expm_stack(G, sched.durations[start:stop])


def _chained_product(E: np.ndarray) -> np.ndarray:
    """E[n-1] @ ... @ E[0] by pairwise reduction."""
    d = E.shape[1]
    while E.shape[0] > 1:
        if E.shape[0] % 2:
            E = np.concatenate([E, np.eye(d)[None]])
        E = np.matmul(E[1::2], E[0::2])
    return E[0]


def product_of_exponentials(sys: SwitchingSystem, sched: Schedule) -> np.ndarray:
    """
    The transition matrix e^{t_k A_k} ... e^{t_1 A_1} of a schedule.

    Raises:
        MatrixOverflowError: The product left double range
    """
    _check_pair(sys, sched)
    M = np.eye(sys.dim)
    for start in range(0, sched.pieces, CHUNK):
        M = _chained_product(piece_exponentials(sys, sched, start, start + CHUNK)) @ M
        if not np.all(np.isfinite(M)):
            raise MatrixOverflowError(f"{sys.label}: transition matrix overflowed")
    return M


def propagate(sys: SwitchingSystem, sched: Schedule, x0) -> np.ndarray:
    """Endpoint x(T) only; cheap even for millions of pieces."""
    x0 = as_vec(x0, sys.dim, 'x0')
    return product_of_exponentials(sys, sched) @ x0


def evolve(sys: SwitchingSystem, sched: Schedule, x0, step: float = None) -> Trajectory:
    """
    Solve x' = G(t) x under a piecewise-constant schedule.

    Within piece j the right-hand side is the fixed hull element
    G_j = sum_i w_ji A_i, so the state advances by e^{t G_j}. Samples are
    taken at every piece boundary and every `step` time units inside pieces.

    Args:
        sys: The switching system
        sched: Schedule with one weight per generator
        x0: Initial state
        step: Intra-piece sampling step (default: sample_step())

    Returns:
        Trajectory starting at exactly x0

    Raises:
        DimensionError: x0 or schedule do not match the system
        MatrixOverflowError: The state left double range
    """
    x0 = as_vec(x0, sys.dim, 'x0')
    step = sample_step() if step is None else float(step)
    if not step > 0:
        raise InvalidInputError("sampling step must be positive")

    E_end = piece_exponentials(sys, sched)
    G = np.tensordot(sched.weights, sys.stack, axes=1)
    times: List[np.ndarray] = [np.zeros(1)]
    states: List[np.ndarray] = [x0[None, :]]
    t0, x = 0.0, x0
    for j, duration in enumerate(sched.durations):
        inner = np.arange(step, duration - 0.5 * step, step)
        if inner.size:
            times.append(t0 + inner)
            states.append(np.einsum('nij,j->ni', expm_batch(G[j], inner), x))
        x = E_end[j] @ x
        if not np.all(np.isfinite(x)):
            raise MatrixOverflowError(f"{sys.label}: state overflowed in piece {j}")
        t0 += duration
        times.append(np.array([t0]))
        states.append(x[None, :])
    return Trajectory(np.concatenate(times), np.vstack(states), sched)


def _window_integrals(law: MeasurableLaw, edges: np.ndarray) -> np.ndarray:
    """Integral of every weight over each window [edges[j], edges[j+1]]."""
    a, b = edges[:-1], edges[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    results = []
    for rule in (_GL_LOW, _GL_HIGH):
        nodes, weights = rule
        ts = (mid[:, None] + half[:, None] * nodes[None, :]).reshape(-1)
        W = law.evaluate(ts).reshape(a.size, nodes.size, law.size)
        results.append(half[:, None] * np.einsum('k,nkj->nj', weights, W))
    low, high = results
    bad = np.flatnonzero(np.max(np.abs(high - low), axis=1) > WINDOW_TOL)
    for j in bad:
        value, err = quad_vec(law, a[j], b[j], epsabs=WINDOW_TOL, epsrel=0.0)
        if not np.isfinite(err) or err > WINDOW_TOL:
            raise AccuracyError(f"{law.label}: quadrature on [{a[j]:.6g}, {b[j]:.6g}] stalled at error {err:.3g}")
        high[j] = value
    if bad.size:
        logger.debug(f"{law.label}: {bad.size} windows needed adaptive quadrature")
    return high


def window_integrals(law: MeasurableLaw, T: float, k: int) -> np.ndarray:
    """Occupation integrals, shape (k, size), over the windows [jT/k, (j+1)T/k)."""
    if not T > 0 or k < 1:
        raise InvalidInputError("need T > 0 and k >= 1")
    out = np.empty((k, law.size))
    for start in range(0, k, CHUNK):
        stop = min(k, start + CHUNK)
        edges = T * np.arange(start, stop + 1) / k
        out[start:stop] = _window_integrals(law, edges)
    return out


def chatter_discretize(law: MeasurableLaw, T: float, k: int) -> Schedule:
    """
    Vertex schedule with the same occupation times as the law on every window.

    Each window [jT/k, (j+1)T/k) is split into consecutive pieces, one per
    generator in index order, lasting the integral of that generator's weight
    over the window. Zero-length pieces are dropped; the longest piece of each
    window absorbs the rounding so windows sum to exactly T/k.

    Raises:
        AccuracyError: Window quadrature failed to reach 1e-10
    """
    integrals = np.clip(window_integrals(law, T, k), 0.0, None)
    h = T / k
    widths = integrals.sum(axis=1, keepdims=True)
    D = integrals * (h / widths)
    rows = np.arange(k)
    longest = np.argmax(D, axis=1)
    D[rows, longest] = 0.0
    D[rows, longest] = h - D.sum(axis=1)

    flat = D.reshape(-1)
    indices = np.tile(np.arange(law.size), k)
    keep = flat > 0
    logger.debug(f"Chattering {law.label} over {k} windows into {int(keep.sum())} pieces")
    return Schedule.vertex(flat[keep], indices[keep], law.size)


class DiscretizationConstants(NamedTuple):
    C: float
    K: float
    bound: float
    k: int


def discretization_constants(eps: float, T: float, x0norm: float, sys: SwitchingSystem) -> DiscretizationConstants:
    """
    C = 1/T + max ||A_i||, K = C e^{CT} ||x0|| and the window count k.

    k is the least integer with 1/k <= eps / (4 C K T e^{CT}).

    Raises:
        InvalidInputError: Non-positive argument
        RangeError: k does not fit in a signed 64-bit integer
    """
    if not (eps > 0 and T > 0 and x0norm > 0):
        raise InvalidInputError("eps, T and ||x0|| must all be positive")
    C = 1.0 / T + sys.max_norm
    with np.errstate(over='ignore'):
        growth = math.exp(C * T) if C * T < 709 else math.inf
    K = C * growth * x0norm
    bound = 4.0 * C * K * T * growth / eps
    if not math.isfinite(bound) or bound >= INT64_MAX:
        raise RangeError(f"required window count {bound:.3g} does not fit in 64 bits")
    k = max(1, math.ceil(bound))
    while k * eps < 4.0 * C * K * T * growth:
        k += 1
    while k > 1 and (k - 1) * eps >= 4.0 * C * K * T * growth:
        k -= 1
    return DiscretizationConstants(C, K, bound, k)


def required_k(eps: float, T: float, x0norm: float, sys: SwitchingSystem) -> int:
    """Window count that makes chatter_discretize eps-accurate at time T."""
    return discretization_constants(eps, T, x0norm, sys).k


def shift(sys: SwitchingSystem, mu: float) -> SwitchingSystem:
    """Replace every generator A by A - mu I."""
    if mu == 0:
        return sys
    shifted = tuple(G - mu * np.eye(sys.dim) for G in sys.generators)
    return SwitchingSystem(shifted, f"{sys.label}-({mu:.12g})I")


def reference_solve(sys: SwitchingSystem, law: MeasurableLaw, x0, T: float, step: float = 1e-5) -> np.ndarray:
    """
    Fixed-step classical RK4 for x' = (sum_i alpha_i(t) A_i) x.

    Only used as an oracle for the discretization; the step is shrunk so
    that it divides T exactly.
    """
    x = as_vec(x0, sys.dim, 'x0')
    if law.size != sys.size:
        raise DimensionError(f"law has {law.size} weights, {sys.label} has {sys.size} generators")
    n = max(1, math.ceil(T / step - 1e-9))
    h = T / n
    W = law.evaluate(0.5 * h * np.arange(2 * n + 1))
    G = np.tensordot(W, sys.stack, axes=1)
    for i in range(n):
        g0, gm, g1 = G[2 * i], G[2 * i + 1], G[2 * i + 2]
        k1 = g0 @ x
        k2 = gm @ (x + 0.5 * h * k1)
        k3 = gm @ (x + 0.5 * h * k2)
        k4 = g1 @ (x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def sample_hull(sys: SwitchingSystem, count: int, seed: int = 0) -> List[np.ndarray]:
    """Deterministic Dirichlet(1, ..., 1) samples of the convex hull."""
    rng = np.random.default_rng(seed)
    return [sys.combination(w) for w in rng.dirichlet(np.ones(sys.size), count)]


def tensor_lift(lawA: MeasurableLaw, lawB0: MeasurableLaw) -> MeasurableLaw:
    """
    X-law (1 - alpha - beta, beta, alpha) from an A-law (1 - alpha, alpha) and a B0-law (alpha, 1 - alpha - beta, beta).

    The weight on X2 = A1 (x) I must equal the weight the B0-law puts on its
    zero vertex, otherwise the lifted hull element does not factor.

    Raises:
        DimensionError: Laws of the wrong sizes
        InvalidInputError: The two laws disagree on alpha
    """
    if lawA.size != 2 or lawB0.size != 3:
        raise DimensionError("tensor_lift needs a 2-generator A-law and a 3-generator B0-law")

    def weights(ts):
        WA, WB = lawA.evaluate(ts), lawB0.evaluate(ts)
        if np.max(np.abs(WA[:, 1] - WB[:, 0])) > lawA.tolerance:
            raise InvalidInputError(f"{lawA.label} and {lawB0.label} disagree on the weight of the pause vertex")
        return np.column_stack([WB[:, 1], WB[:, 2], WA[:, 1]])

    return MeasurableLaw(weights, 3, vectorized=True, label=f"{lawA.label}(x){lawB0.label}")


def split_tensor_schedule(sched: Schedule) -> Tuple[Schedule, Schedule]:
    """Inverse of tensor_lift on schedules: the A- and B0-schedules with the same pieces."""
    if sched.size != 3:
        raise DimensionError("only 3-vertex X-schedules factor")
    w0, w1, w2 = sched.weights.T
    sched_A = Schedule(sched.durations, np.column_stack([w0 + w1, w2]))
    sched_B0 = Schedule(sched.durations, np.column_stack([w2, w0, w1]))
    return sched_A, sched_B0
