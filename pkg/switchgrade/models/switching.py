"""Switching systems, schedules, trajectories and measurable switching laws."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from ..errors import DimensionError, InvalidInputError
from ..matexp import as_mat, as_vec, opnorm

logger = logging.getLogger(__name__)

SIMPLEX_TOL = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = arr.view()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SwitchingSystem:
    """
    Convex hull of finitely many generator matrices.

    The generators are the vertices; any convex combination of them is an
    admissible right-hand side at any time.
    """
    generators: Tuple[np.ndarray, ...]
    label: str = 'sys'

    def __post_init__(self):
        if len(self.generators) == 0:
            raise InvalidInputError("a switching system needs at least one generator")
        mats = tuple(_frozen(as_mat(G, f"{self.label} generator {i}")) for i, G in enumerate(self.generators))
        dims = {G.shape[0] for G in mats}
        if len(dims) != 1:
            raise DimensionError(f"{self.label}: generators have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, 'generators', mats)

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]

    @property
    def size(self) -> int:
        """Number of generators (N+1)."""
        return len(self.generators)

    @property
    def stack(self) -> np.ndarray:
        """Generators as one (size, dim, dim) array."""
        return np.stack(self.generators)

    @property
    def max_norm(self) -> float:
        return max(opnorm(G) for G in self.generators)

    def combination(self, weights) -> np.ndarray:
        """The hull element sum_i w_i A_i."""
        w = np.asarray(weights, dtype=float)
        if w.shape != (self.size,):
            raise DimensionError(f"{self.label}: weights of length {w.size}, expected {self.size}")
        return np.tensordot(w, self.stack, axes=1)

    def __repr__(self):
        return f"SwitchingSystem(label={self.label!r}, size={self.size}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class Schedule:
    """
    Piecewise-constant switching law.

    Piece j lasts durations[j] and uses the hull element with simplex weights
    weights[j]. Vertex schedules have 0/1 indicator rows.
    """
    durations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        durations = np.asarray(self.durations, dtype=float).reshape(-1)
        weights = np.asarray(self.weights, dtype=float)
        if weights.ndim != 2 or weights.shape[0] != durations.size:
            raise DimensionError(f"schedule has {durations.size} durations but weights of shape {weights.shape}")
        if not np.all(np.isfinite(durations)) or np.any(durations <= 0):
            raise InvalidInputError("schedule durations must be finite and positive")
        if not np.all(np.isfinite(weights)) or np.any(weights < -SIMPLEX_TOL):
            raise InvalidInputError("schedule weights must be finite and nonnegative")
        if durations.size and np.max(np.abs(weights.sum(axis=1) - 1.0)) > SIMPLEX_TOL:
            raise InvalidInputError("schedule weights must sum to 1 within 1e-12")
        object.__setattr__(self, 'durations', _frozen(durations))
        if np.any(weights < 0):
            weights = np.clip(weights, 0.0, None)
        object.__setattr__(self, 'weights', _frozen(weights))

    @classmethod
    def vertex(cls, durations: Sequence[float], indices: Sequence[int], size: int) -> 'Schedule':
        """Schedule that sits on generator indices[j] for durations[j]."""
        indices = np.asarray(indices, dtype=int)
        if np.any(indices < 0) or np.any(indices >= size):
            raise InvalidInputError(f"vertex indices must lie in [0, {size})")
        return cls(np.asarray(durations, dtype=float), np.eye(size)[indices])

    @classmethod
    def constant(cls, weights: Sequence[float], T: float) -> 'Schedule':
        return cls(np.array([T], dtype=float), np.array([weights], dtype=float))

    @property
    def total(self) -> float:
        return float(self.durations.sum())

    @property
    def size(self) -> int:
        return self.weights.shape[1]

    @property
    def pieces(self) -> int:
        return self.durations.size

    @property
    def boundaries(self) -> np.ndarray:
        """Piece boundary times, starting at 0 and ending at total."""
        return np.concatenate([[0.0], np.cumsum(self.durations)])

    @property
    def is_vertex(self) -> bool:
        return bool(np.all((self.weights == 0.0) | (self.weights == 1.0)))

    @property
    def vertex_indices(self) -> np.ndarray:
        if not self.is_vertex:
            raise InvalidInputError("schedule is not vertex-valued")
        return np.argmax(self.weights, axis=1)

    def concat(self, other: 'Schedule') -> 'Schedule':
        if other.size != self.size:
            raise DimensionError("cannot concatenate schedules over different generator counts")
        return Schedule(np.concatenate([self.durations, other.durations]),
                        np.vstack([self.weights, other.weights]))

    def fit_horizon(self, horizon: float) -> 'Schedule':
        """Repeat cyclically and truncate so the total is exactly horizon."""
        if horizon <= 0:
            raise InvalidInputError("horizon must be positive")
        reps = int(np.ceil(horizon / self.total - 1e-12))
        durations = np.tile(self.durations, max(reps, 1))
        weights = np.tile(self.weights, (max(reps, 1), 1))
        ends = np.cumsum(durations)
        keep = min(int(np.searchsorted(ends, horizon - 1e-12)) + 1, ends.size)
        durations = durations[:keep].copy()
        durations[-1] -= ends[keep - 1] - horizon
        mask = durations > 0
        return Schedule(durations[mask], weights[:keep][mask])

    def to_records(self) -> list:
        return [{'duration': float(d), 'weights': [float(x) for x in w]}
                for d, w in zip(self.durations, self.weights)]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution of a switching system under a schedule."""
    times: np.ndarray
    states: np.ndarray
    schedule: Optional[Schedule] = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if times.ndim != 1 or states.ndim != 2 or states.shape[0] != times.size:
            raise DimensionError("trajectory times/states shapes do not match")
        if times.size and (times[0] != 0.0 or np.any(np.diff(times) <= 0)):
            raise InvalidInputError("trajectory times must start at 0 and increase strictly")
        if not np.all(np.isfinite(states)):
            raise InvalidInputError("trajectory has non-finite states")
        object.__setattr__(self, 'times', _frozen(times))
        object.__setattr__(self, 'states', _frozen(states))

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def to_csv(self, path) -> Path:
        """Write columns t, x1..xd with full round-trip precision."""
        path = Path(path)
        header = ','.join(['t'] + [f'x{i + 1}' for i in range(self.dim)])
        data = np.column_stack([self.times, self.states])
        np.savetxt(path, data, delimiter=',', header=header, comments='', fmt='%.17g', newline='\n')
        logger.debug(f"Wrote {self.times.size} trajectory samples to {path}")
        return path


@dataclass(frozen=True)
class MeasurableLaw:
    """
    Switching law given as weights over time.

    weight_functions(t) returns a simplex vector of length `size`. With
    vectorized=True it is called with an array of times and must return an
    array of shape (len(t), size).
    """
    weight_functions: Callable
    size: int
    vectorized: bool = False
    label: str = 'law'
    tolerance: float = field(default=1e-9, repr=False)

    def evaluate(self, ts) -> np.ndarray:
        """Weights at every time in ts, shape (len(ts), size), checked against the simplex."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if self.vectorized:
            W = np.asarray(self.weight_functions(ts), dtype=float).reshape(ts.size, self.size)
        else:
            W = np.array([np.asarray(self.weight_functions(float(t)), dtype=float).reshape(-1) for t in ts])
            if W.shape != (ts.size, self.size):
                raise DimensionError(f"{self.label}: weight vectors must have length {self.size}")
        if not np.all(np.isfinite(W)) or np.any(W < -self.tolerance) \
                or np.any(np.abs(W.sum(axis=1) - 1.0) > self.tolerance):
            raise InvalidInputError(f"{self.label}: weights left the simplex")
        return W

    def __call__(self, t: float) -> np.ndarray:
        return self.evaluate([t])[0]

    @classmethod
    def constant(cls, weights: Sequence[float], label: str = 'constant') -> 'MeasurableLaw':
        w = as_vec(weights, name='weights')
        return cls(lambda ts: np.tile(w, (np.size(ts), 1)), w.size, vectorized=True, label=label)

    @classmethod
    def from_alpha(cls, alpha: Callable, label: str = 'alpha') -> 'MeasurableLaw':
        """
        Two-generator law (1 - alpha(t), alpha(t)).

        alpha must accept numpy arrays (np.sin, lambdas over arrays, ...).
        """
        def weights(ts):
            a = np.broadcast_to(np.asarray(alpha(ts), dtype=float), np.shape(ts))
            return np.column_stack([1.0 - a, a])
        return cls(weights, 2, vectorized=True, label=label)
