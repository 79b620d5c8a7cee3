"""
Finite-horizon stand-in for the Barabanov norm of a system with zero growth rate.

N(z) = max over a fixed finite set S of transition matrices of ||M z||. Each
matrix in S is a vertex product e^{t_k A_k} ... e^{t_1 A_1} whose total time
lies in the terminal window [T - W, T]; S is filled by probe-driven beam
searches, one per probe and ladder width, keeping the products that push
that probe furthest.
Because S is fixed once built, N is a genuine norm (max of norms of invertible
maps), homogeneous exactly, and cheap to evaluate anywhere.

The absolute values mean little. What carries over from the true norm is its
shape: flat pieces of the unit sphere show up as flat pieces of N.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, NamedTuple, Optional

import numpy as np

from ..config import get_int_config, get_threads
from ..errors import InvalidInputError
from ..lyapunov import beam_search
from ..lyapunov.beam import DEFAULT_BEAM
from ..matexp import as_vec
from ..models import NormKind, NormModel, SwitchingSystem

logger = logging.getLogger(__name__)

MAX_HORIZON = 200.0
DEFAULT_KEEP = 8


class HorizonValue(NamedTuple):
    value: float
    low_confidence: bool


class FiniteHorizonNorm(NormModel):
    """max_{M in S} ||M z|| for a fixed stack S of transition matrices."""

    kind = NormKind.FINITE_HORIZON

    def __init__(self, system: SwitchingSystem, matrices: np.ndarray, horizon: float, window: float,
                 budget: dict, low_confidence: bool):
        super().__init__(system.dim, f'finite_horizon_{system.label}_T{horizon:g}')
        if matrices.shape[0] == 0:
            raise InvalidInputError("finite-horizon norm needs at least one matrix")
        self.system = system
        self.matrices = matrices
        self.horizon = horizon
        self.window = window
        self.budget = budget
        self.low_confidence = low_confidence

    def evaluate(self, vs: np.ndarray) -> np.ndarray:
        images = np.einsum('mij,nj->nmi', self.matrices, vs)
        return np.linalg.norm(images, axis=2).max(axis=1)

    def params(self) -> dict:
        return dict(super().params(), horizon=self.horizon, window=self.window, matrices=int(self.matrices.shape[0]),
                    low_confidence=self.low_confidence, **self.budget)


def beam_ladder(beam: int) -> List[int]:
    """Widths 1, 2, 4, ... up to the largest power of two not above beam."""
    if beam < 1:
        raise InvalidInputError("beam width must be at least 1")
    return [1 << j for j in range(int(beam).bit_length())]


def _probe_products(sys: SwitchingSystem, T: float, probe: np.ndarray, window: float, durations, beam: int,
                    keep: int):
    result = beam_search(sys, T, durations, beam, probe=probe, workers=1)
    start_bucket = int(np.ceil((result.horizon - window) / result.grid.step - 1e-9))
    products = result.kept(min(max(1, start_bucket), result.final_bucket))
    if products.shape[0] == 0:
        products = result.kept(1)
    scores = np.linalg.norm(products @ probe, axis=1)
    order = np.argsort(-scores, kind='stable')[:keep]
    return products[order], result.pruned, result.budget


def norm_X_finite_horizon_model(sys: SwitchingSystem, T: float, probes, beam: int = None, durations=None,
                                window: Optional[float] = None, keep: int = DEFAULT_KEEP,
                                workers: int = None) -> FiniteHorizonNorm:
    """
    Build the matrix set S from beam searches per probe.

    Every probe is searched at each width of beam_ladder(beam) and S is the
    union of what those searches keep, so a larger beam never shrinks S and
    N_T never decreases.

    Args:
        sys: System with zero growth rate (certified elsewhere)
        T: Horizon, at most 200
        probes: Vectors whose reachable growth the set must capture, shape (n, dim)
        beam: Widest beam (default LYAPUNOV_BEAM or 64)
        durations: Duration grid
        window: Terminal window length W (default T/2); W = 0 keeps only
            products of total duration T
        keep: Products kept per probe and width
        workers: Parallel probe searches (default SWITCHGRADE_THREADS)

    Returns:
        FiniteHorizonNorm; low_confidence is set when the widest search had to prune
    """
    if not 0 < T <= MAX_HORIZON:
        raise InvalidInputError(f"horizon must lie in (0, {MAX_HORIZON:g}], got {T}")
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    if probes.shape[1] != sys.dim or probes.shape[0] == 0:
        raise InvalidInputError(f"probes must have shape (n, {sys.dim})")
    norms = np.linalg.norm(probes, axis=1)
    probes = probes[norms > 0] / norms[norms > 0, None]
    if probes.shape[0] == 0:
        raise InvalidInputError("all probes are zero")
    window = 0.5 * T if window is None else float(window)
    if not 0 <= window <= T:
        raise InvalidInputError("window must lie in [0, T]")
    beam = beam or get_int_config('Lyapunov', 'beam', DEFAULT_BEAM)
    ladder = beam_ladder(beam)
    if ladder[-1] != beam:
        logger.debug(f"Beam {beam} searched as {ladder[-1]} (widths {ladder})")
    workers = workers or get_threads()
    jobs = [(z, width) for z in probes for width in ladder]

    def search(job):
        z, width = job
        return _probe_products(sys, T, z, window, durations, width, keep)

    logger.info(f"🔍 Finite-horizon norm of {sys.label}: T={T:g}, window={window:g}, "
                f"{probes.shape[0]} probes, widths {ladder}")
    with ThreadPoolExecutor(max_workers=max(1, min(workers, len(jobs)))) as executor:
        results = list(executor.map(search, jobs))

    matrices = np.concatenate([r[0] for r in results])
    low_confidence = any(r[1] for r, (_, width) in zip(results, jobs) if width == ladder[-1])
    if low_confidence:
        logger.warning(f"⚠ {sys.label}: beam budget exhausted, finite-horizon norm is low confidence")
    horizon = results[0][2]['horizon']
    budget = {'beam': beam, 'beam_ladder': ladder, 'keep': keep, 'probes': int(probes.shape[0]),
              'searched_horizon': horizon}
    return FiniteHorizonNorm(sys, matrices, T, window, budget, low_confidence)


def norm_X_finite_horizon(z, T: float, sys: SwitchingSystem = None, beam: int = None, durations=None,
                          window: Optional[float] = None) -> HorizonValue:
    """
    N_T(z) with z as its own probe.

    Defaults to the 4-dimensional X system of the catalog.
    """
    if sys is None:
        from ..catalog import system_X
        sys = system_X()
    z = as_vec(z, sys.dim, 'z')
    if not np.any(z):
        return HorizonValue(0.0, False)
    model = norm_X_finite_horizon_model(sys, T, z[None], beam, durations, window, workers=1)
    return HorizonValue(model(z), model.low_confidence)
