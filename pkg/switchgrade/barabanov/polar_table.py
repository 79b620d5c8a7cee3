"""
Barabanov norm of a planar rotating system with zero growth rate.

Along the extremal trajectory the log-radius gains L'(t) = max_u rho_u / omega_u
per radian, so the unit sphere of the norm is the curve t -> e^{-L(t)} (cos t, sin t)
and ||v|| = |v| e^{-L(arg v)}. The profile L is tabulated on [0, pi] (rho and omega
are pi-periodic, so L(t + pi) = L(t) + L(pi)), with every switching angle inserted
as a node so the integrand is smooth between nodes. Evaluation adds a Gauss-Legendre
integral from the nearest node to the requested angle.

L(pi) is zero exactly when the growth rate is zero; the leftover is the closure
residual, which the table removes by a linear correction once it has checked it
is small.
"""

import json
import logging
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import quad

from ..config import get_int_config
from ..errors import InvalidInputError, LambdaInconsistencyError
from ..lyapunov import PolarField
from ..models import NormKind, NormModel, Schedule, SwitchingSystem

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 4096
CLOSURE_TOL = 1e-6
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def _is_zero(G: np.ndarray) -> bool:
    return not np.any(G)


def _gain_integrals(field: PolarField, controls: np.ndarray, start: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Integral of rho_u / omega_u from start to theta, u = controls, one entry per pair."""
    half = 0.5 * (theta - start)
    pts = (start + half)[:, None] + half[:, None] * _GL_NODES[None, :]
    rho, omega = field.rates(pts.reshape(-1))
    u = np.repeat(controls, _GL_NODES.size)
    cols = np.arange(u.size)
    gains = (rho[u, cols] / omega[u, cols]).reshape(pts.shape)
    return half * (gains @ _GL_WEIGHTS)


class PolarTableNorm(NormModel):
    """Tabulated Barabanov norm of a planar system, normalised by R(0) = 1."""

    kind = NormKind.POLAR_TABLE

    def __init__(self, sys: SwitchingSystem, field: PolarField, active: List[int], nodes: np.ndarray,
                 profile: np.ndarray, controls: np.ndarray, resolution: int):
        super().__init__(2, f'norm_{sys.label}')
        self.system = sys
        self.field = field
        self.active = active
        self.nodes = nodes
        self.profile = profile
        self.controls = controls
        self.resolution = resolution
        self.half_turn = float(profile[-1])
        self.closure_residual = abs(2.0 * self.half_turn)
        self._schedule: Optional[Schedule] = None

    def log_radius(self, theta) -> np.ndarray:
        """Closure-corrected log R(theta) for any angles."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        reduced = np.mod(theta, np.pi)
        k = np.clip(np.searchsorted(self.nodes, reduced, side='right') - 1, 0, self.controls.size - 1)
        raw = self.profile[k] + _gain_integrals(self.field, self.controls[k], self.nodes[k], reduced)
        return raw - reduced * (self.half_turn / np.pi)

    def radius(self, theta) -> np.ndarray:
        return np.exp(self.log_radius(theta))

    def evaluate(self, vs: np.ndarray) -> np.ndarray:
        r = np.hypot(vs[:, 0], vs[:, 1])
        theta = np.arctan2(vs[:, 1], vs[:, 0])
        return r * np.exp(-self.log_radius(theta))

    def generating_schedule(self) -> Schedule:
        """
        One full turn of the extremal trajectory from angle 0, as a vertex schedule.

        Each run of the optimal policy on an angular interval [a, b] lasts the
        time the chosen generator takes to sweep it, the integral of 1/omega.
        """
        if self._schedule is None:
            durations, indices = [], []
            for a, b, u in self.field.optimal_policy(0.0):
                def inverse_rate(t, u=u):
                    return 1.0 / float(self.field.rates([t])[1][u, 0])
                elapsed, _ = quad(inverse_rate, a, b, epsabs=1e-13, epsrel=1e-13, limit=200)
                durations.append(elapsed)
                indices.append(self.active[u])
            self._schedule = Schedule.vertex(durations, indices, self.system.size)
        return self._schedule

    @property
    def period(self) -> float:
        return self.generating_schedule().total

    def table(self, count: int = None) -> Tuple[np.ndarray, np.ndarray]:
        """(theta, R(theta)) on `count` equally spaced angles of [0, 2 pi)."""
        count = count or self.resolution
        theta = 2 * np.pi * np.arange(count) / count
        return theta, self.radius(theta)

    def to_json(self, path=None) -> dict:
        """The (theta, R) table plus provenance; written to path if given."""
        theta, R = self.table()
        data = {
            'system': self.system.label,
            'resolution': self.resolution,
            'closure_residual': self.closure_residual,
            'generators': [G.tolist() for G in self.system.generators],
            'table': [[float(t), float(r)] for t, r in zip(theta, R)],
        }
        if path is not None:
            Path(path).write_text(json.dumps(data, indent=2) + '\n', encoding='utf-8')
            logger.info(f"📋 Wrote polar table of {self.name} to {path}")
        return data

    def params(self) -> dict:
        return dict(super().params(), resolution=self.resolution, closure_residual=self.closure_residual,
                    nodes=int(self.nodes.size))


def norm_B_build(sysB: SwitchingSystem, resolution: int = None) -> PolarTableNorm:
    """
    Tabulate the Barabanov norm of a planar rotating system whose growth rate is zero.

    Zero generators are ignored (they neither turn nor grow). The remaining
    ones must all rotate counter-clockwise.

    Args:
        sysB: Planar system, already shifted so its growth rate is zero
        resolution: Nodes over a full turn (default BARABANOV_RESOLUTION or 4096)

    Raises:
        MethodInapplicableError: Some generator does not rotate counter-clockwise
        LambdaInconsistencyError: |log R(2 pi) - log R(0)| > 1e-6, so the growth rate is not zero
    """
    resolution = resolution or get_int_config('Barabanov', 'resolution', DEFAULT_RESOLUTION)
    if resolution < 8:
        raise InvalidInputError("polar table resolution must be at least 8")
    active = [i for i, G in enumerate(sysB.generators) if not _is_zero(G)]
    if not active:
        raise InvalidInputError(f"{sysB.label} has only zero generators")
    moving = SwitchingSystem(tuple(sysB.generators[i] for i in active), sysB.label)
    field = PolarField.from_system(moving)
    field.validate()

    half = max(4, resolution // 2)
    nodes = np.unique(np.concatenate([np.pi * np.arange(half + 1) / half, field.switching_angles(0.0)]))
    nodes = nodes[np.concatenate([[True], np.diff(nodes) > 1e-14])]
    nodes[-1] = np.pi
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    controls = field.best_control(mids, 0.0)

    profile = np.concatenate([[0.0], np.cumsum(_gain_integrals(field, controls, nodes[:-1], nodes[1:]))])
    table = PolarTableNorm(sysB, field, active, nodes, profile, controls, resolution)

    if table.closure_residual > CLOSURE_TOL:
        logger.error(f"✗ {sysB.label}: polar table does not close, |log R(2pi)| = {table.closure_residual:.3g}")
        raise LambdaInconsistencyError(
            f"{sysB.label}: log-radius gains {table.closure_residual:.3g} per turn; the shift is not the growth rate",
            table.closure_residual)
    logger.info(f"✓ {sysB.label}: polar table closes to {table.closure_residual:.2e} over {nodes.size} nodes")
    return table
