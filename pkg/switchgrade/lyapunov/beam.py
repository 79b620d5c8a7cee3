"""
Beam search over products of matrix exponentials.

Partial products are grouped by accumulated time, measured in units of the
duration grid's common step (a "bucket"). Every bucket keeps its `beam` best
products; expanding a product by generator g for grid duration j lands it in
a later bucket. Ranking is by operator norm (growth search) or by ||P z|| for a
fixed probe z (reachability search). Both the Lyapunov lower bound and the
finite-horizon norm run on this engine.

Ties are broken by arrival order (source bucket, generator, duration, parent
rank), so results do not depend on the worker count.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np

from ..config import get_int_config, get_threads
from ..errors import InvalidInputError
from ..matexp import expm_batch, opnorm_batch
from ..models import Schedule, SwitchingSystem

logger = logging.getLogger(__name__)

DEFAULT_BEAM = 64
DEFAULT_GRID_STEPS = 64
PRUNE_FACTOR = 4


@dataclass(frozen=True)
class DurationGrid:
    """Sorted positive durations, all integer multiples of `step`."""
    values: np.ndarray
    step: float
    multiples: np.ndarray

    @property
    def count(self) -> int:
        return self.values.size

    def describe(self) -> dict:
        return {'durations': [float(v) for v in self.values], 'step': float(self.step)}


def default_grid(steps: int = None) -> np.ndarray:
    """{pi/n * j : j = 1..n}, n from LYAPUNOV_GRID_STEPS (default 64)."""
    n = steps or get_int_config('Lyapunov', 'grid_steps', DEFAULT_GRID_STEPS)
    return np.pi / n * np.arange(1, n + 1)


def make_grid(durations=None) -> DurationGrid:
    """
    Validate a duration grid and find its common step.

    The step is the float gcd: durations are expressed as rational multiples
    of the smallest one (denominators up to 1000) and the smallest duration is
    divided by the lcm of those denominators.

    Raises:
        InvalidInputError: Empty grid or non-positive durations
    """
    values = default_grid() if durations is None else np.asarray(durations, dtype=float).reshape(-1)
    if values.size == 0:
        raise InvalidInputError("duration grid is empty")
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise InvalidInputError("grid durations must be finite and positive")
    values = np.unique(values)
    base = values[0]
    denominators = [Fraction(float(v / base)).limit_denominator(1000).denominator for v in values]
    lcm = 1
    for den in denominators:
        lcm = lcm * den // math.gcd(lcm, den)
    step = base / lcm
    multiples = np.rint(values / step).astype(int)
    return DurationGrid(values, float(step), multiples)


@dataclass
class Bucket:
    """Products kept at one accumulated time, best first."""
    products: np.ndarray
    scores: np.ndarray
    parent_bucket: np.ndarray
    parent_index: np.ndarray
    generator: np.ndarray
    duration: np.ndarray

    @property
    def size(self) -> int:
        return self.scores.size


@dataclass
class BeamResult:
    """Everything a beam search kept, plus enough bookkeeping to rebuild schedules."""
    system: SwitchingSystem
    grid: DurationGrid
    horizon: float
    beam: int
    buckets: Dict[int, Bucket]
    pruned: bool
    probe: Optional[np.ndarray] = None
    budget: dict = field(default_factory=dict)

    def time_of(self, bucket: int) -> float:
        return bucket * self.grid.step

    @property
    def final_bucket(self) -> int:
        return int(round(self.horizon / self.grid.step))

    def schedule(self, bucket: int, index: int = 0) -> Schedule:
        """Vertex schedule (in time order) that produced buckets[bucket].products[index]."""
        durations, gens = [], []
        while bucket > 0:
            entry = self.buckets[bucket]
            durations.append(self.grid.values[entry.duration[index]])
            gens.append(entry.generator[index])
            bucket, index = int(entry.parent_bucket[index]), int(entry.parent_index[index])
        return Schedule.vertex(durations[::-1], gens[::-1], self.system.size)

    def kept(self, start_bucket: int = 1) -> np.ndarray:
        """All kept products from start_bucket on, stacked."""
        mats = [b.products for k, b in sorted(self.buckets.items()) if k >= start_bucket and b.size]
        return np.concatenate(mats) if mats else np.zeros((0, self.system.dim, self.system.dim))


def _score(products: np.ndarray, probe: Optional[np.ndarray]) -> np.ndarray:
    if probe is None:
        return opnorm_batch(products)
    return np.linalg.norm(products @ probe, axis=1)


def _select(chunks: List[tuple], beam: int) -> tuple:
    """Concatenate candidate chunks and keep the best `beam`, stable on arrival order."""
    parts = [np.concatenate(col) for col in zip(*chunks)]
    products, scores = parts[0], parts[1]
    order = np.argsort(-scores, kind='stable')[:beam]
    return tuple(p[order] for p in parts), scores.size > beam


def beam_search(sys: SwitchingSystem, T: float, durations=None, beam: int = None,
                probe=None, workers: int = None) -> BeamResult:
    """
    Run the bucketed beam search up to total duration T.

    Args:
        sys: Switching system whose vertices are multiplied
        T: Target total duration; rounded to a multiple of the grid step
        durations: Duration grid (default: pi/64 * j, j = 1..64)
        beam: Products kept per bucket (default: LYAPUNOV_BEAM or 64)
        probe: If given, rank by ||P probe|| instead of ||P||
        workers: Threads for expanding generators (default: SWITCHGRADE_THREADS)

    Returns:
        BeamResult with every bucket that received at least one product
    """
    grid = make_grid(durations)
    beam = beam or get_int_config('Lyapunov', 'beam', DEFAULT_BEAM)
    if beam < 1:
        raise InvalidInputError("beam width must be at least 1")
    if not T > 0:
        raise InvalidInputError("horizon T must be positive")
    n = int(round(T / grid.step))
    if n < 1:
        raise InvalidInputError(f"horizon {T} is shorter than the grid step {grid.step}")
    snapped = abs(n * grid.step - T) > 1e-9 * max(1.0, T)
    if snapped:
        logger.warning(f"⚠ Horizon {T} is not a multiple of the grid step; using {n * grid.step}")
    if probe is not None:
        probe = np.asarray(probe, dtype=float).reshape(sys.dim)
    workers = workers or get_threads()

    d = sys.dim
    exps = np.stack([expm_batch(G, grid.values) for G in sys.generators])  # (gens, durations, d, d)
    identity = np.eye(d)[None]
    buckets: Dict[int, Bucket] = {0: Bucket(identity, _score(identity, probe), np.array([-1]), np.array([-1]),
                                            np.array([-1]), np.array([-1]))}
    pending: Dict[int, List[tuple]] = {}
    pruned = False

    def expand(g: int, source: int, entry: Bucket) -> List[tuple]:
        cands = np.einsum('jik,bkl->jbil', exps[g], entry.products)
        out = []
        for j, mult in enumerate(grid.multiples):
            target = source + int(mult)
            if target > n:
                continue
            prods = cands[j]
            out.append((target, (prods, _score(prods, probe), np.full(entry.size, source),
                                 np.arange(entry.size), np.full(entry.size, g), np.full(entry.size, j))))
        return out

    logger.debug(f"🔍 Beam search on {sys.label}: {n} buckets, beam {beam}, {grid.count} durations")
    with ThreadPoolExecutor(max_workers=max(1, min(workers, sys.size))) as executor:
        for b in range(n + 1):
            if b > 0:
                chunks = pending.pop(b, None)
                if not chunks:
                    continue
                parts, dropped = _select(chunks, beam)
                pruned = pruned or dropped
                buckets[b] = Bucket(*parts)
            if b == n:
                break
            entry = buckets[b]
            if sys.size > 1 and workers > 1:
                expansions = list(executor.map(lambda g: expand(g, b, entry), range(sys.size)))
            else:
                expansions = [expand(g, b, entry) for g in range(sys.size)]
            for batch in expansions:
                for target, chunk in batch:
                    queue = pending.setdefault(target, [])
                    queue.append(chunk)
                    if sum(c[1].size for c in queue) > PRUNE_FACTOR * beam:
                        parts, dropped = _select(queue, beam)
                        pruned = pruned or dropped
                        pending[target] = [parts]

    return BeamResult(sys, grid, n * grid.step, beam, buckets, pruned, probe,
                      {'beam': beam, 'horizon': n * grid.step, 'requested_horizon': float(T),
                       'horizon_snapped': snapped, **grid.describe()})
