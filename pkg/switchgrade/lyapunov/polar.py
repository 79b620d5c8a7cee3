"""
Polar reduction of planar switching systems.

Writing y = n(cos t, sin t), a planar generator A moves the angle at rate
omega_A(t) = <A r(t), r(t + pi/2)> and the log-radius at rate
rho_A(t) = <A r(t), r(t)>. When every generator turns the same way
(omega > 0), time can be traded for angle: the log-radius gained per radian
under control u is (rho_u - lambda) / omega_u, and the best growth rate
lambda* is where the pointwise-best gain integrates to zero over a turn.

rho and omega are quadratic forms in (cos t, sin t); they are stored as
coefficients on {1, cos^2, sin^2, sin cos}, which makes them pi-periodic and
turns "where do two controls tie" into roots of a quartic in tan t.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.integrate import simpson
from scipy.optimize import bisect

from ..config import get_float_config
from ..errors import DimensionError, MethodInapplicableError
from ..models import EstimateMethod, LyapunovEstimate, Schedule, SwitchingSystem

logger = logging.getLogger(__name__)

VALIDATION_GRID = 10_000
MIN_NODES = 1 << 14
QUAD_NODES = 1 << 15
DEFAULT_BISECTION_TOL = 1e-10
ROOT_IMAG_TOL = 1e-9


def _basis(theta) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.ones_like(c), c * c, s * s, s * c], axis=-1)


@dataclass(frozen=True, eq=False)
class PolarField:
    """Radial and angular rates of every generator of a planar system."""
    rho: np.ndarray      # (generators, 4)
    omega: np.ndarray    # (generators, 4)
    label: str = 'field'

    @classmethod
    def from_system(cls, sys: SwitchingSystem) -> 'PolarField':
        if sys.dim != 2:
            raise DimensionError(f"{sys.label}: polar reduction needs a planar system, got dim {sys.dim}")
        rho, omega = [], []
        for G in sys.generators:
            (p, q), (r, w) = G
            rho.append([0.0, p, w, q + r])
            omega.append([0.0, r, -q, w - p])
        return cls(np.array(rho), np.array(omega), sys.label)

    @property
    def size(self) -> int:
        return self.rho.shape[0]

    def rates(self, theta) -> Tuple[np.ndarray, np.ndarray]:
        """rho and omega at the given angles, each of shape (generators, len(theta))."""
        B = _basis(np.atleast_1d(np.asarray(theta, dtype=float)))
        return self.rho @ B.T, self.omega @ B.T

    def validate(self, grid: int = VALIDATION_GRID) -> float:
        """
        Check every control rotates counter-clockwise.

        Returns:
            The smallest angular rate on the grid

        Raises:
            MethodInapplicableError: Some omega_u <= 0 on the grid
        """
        theta = np.pi * np.arange(grid) / grid
        _, omega = self.rates(theta)
        worst = float(omega.min())
        if worst <= 0:
            u, k = np.unravel_index(np.argmin(omega), omega.shape)
            raise MethodInapplicableError(
                f"{self.label}: generator {u} has angular rate {worst:.3g} <= 0 at angle {theta[k]:.6f}")
        return worst

    def gains(self, theta, lam: float) -> np.ndarray:
        """(rho_u - lambda) / omega_u for every generator, shape (generators, len(theta))."""
        rho, omega = self.rates(theta)
        return (rho - lam) / omega

    def best_gain(self, theta, lam: float) -> np.ndarray:
        return self.gains(theta, lam).max(axis=0)

    def best_control(self, theta, lam: float) -> np.ndarray:
        """Index of the pointwise best generator; ties go to the lower index."""
        return np.argmax(self.gains(theta, lam), axis=0)

    def _quadratic(self, coeffs: np.ndarray, shift: float = 0.0) -> np.ndarray:
        """Ascending coefficients in tan t of (form - shift) / cos^2 t."""
        k0, cc, ss, sc = coeffs
        return np.array([k0 - shift + cc, sc, k0 - shift + ss])

    def switching_angles(self, lam: float) -> np.ndarray:
        """
        Angles in [0, pi) where two controls have equal gain.

        (rho_u - lambda) omega_v - (rho_v - lambda) omega_u vanishes exactly at
        ties; dividing by cos^4 leaves a quartic in tan t, and t = pi/2 is a
        tie whenever the quartic's leading coefficient vanishes.
        """
        angles = []
        for u in range(self.size):
            for v in range(u + 1, self.size):
                quartic = P.polysub(P.polymul(self._quadratic(self.rho[u], lam), self._quadratic(self.omega[v])),
                                    P.polymul(self._quadratic(self.rho[v], lam), self._quadratic(self.omega[u])))
                scale = np.abs(quartic).max()
                if scale == 0:
                    continue
                quartic = np.where(np.abs(quartic) <= 1e-14 * scale, 0.0, quartic)
                if quartic[-1] == 0 or quartic.size < 5:
                    angles.append(0.5 * np.pi)
                trimmed = np.trim_zeros(quartic, 'b')
                if trimmed.size > 1:
                    for root in P.polyroots(trimmed):
                        if abs(root.imag) <= ROOT_IMAG_TOL * max(1.0, abs(root)):
                            angles.append(np.mod(np.arctan(root.real), np.pi))
        if not angles:
            return np.zeros(0)
        angles = np.sort(np.asarray(angles))
        return angles[np.concatenate([[True], np.diff(angles) > 1e-13])]

    def segments(self, lam: float, nodes: int = QUAD_NODES) -> List[np.ndarray]:
        """Split [0, pi] at the switching angles; each piece gets an odd node count proportional to its length."""
        cuts = np.concatenate([[0.0], self.switching_angles(lam), [np.pi]])
        cuts = np.unique(cuts)
        pieces = []
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b - a <= 1e-15:
                continue
            count = max(5, int(np.ceil(nodes * (b - a) / np.pi)) | 1)
            pieces.append(np.linspace(a, b, count))
        return pieces

    def angular_function(self, lam: float, nodes: int = QUAD_NODES) -> float:
        """F(lambda): the pointwise-best log-radius gain over a full turn."""
        total = 0.0
        for theta in self.segments(lam, nodes):
            total += simpson(self.best_gain(theta, lam), x=theta)
        return 2.0 * total

    def optimal_policy(self, lam: float) -> List[Tuple[float, float, int]]:
        """
        Pointwise-best control on [0, 2 pi) as (start, end, generator) runs.

        Adjacent runs with the same generator are merged.
        """
        cuts = np.unique(np.concatenate([[0.0], self.switching_angles(lam), [np.pi]]))
        runs: List[Tuple[float, float, int]] = []
        for offset in (0.0, np.pi):
            for a, b in zip(cuts[:-1], cuts[1:]):
                if b - a <= 1e-15:
                    continue
                u = int(self.best_control([0.5 * (a + b)], lam)[0])
                if runs and runs[-1][2] == u and abs(runs[-1][1] - (a + offset)) < 1e-15:
                    runs[-1] = (runs[-1][0], b + offset, u)
                else:
                    runs.append((a + offset, b + offset, u))
        return runs


def lambda_planar_angular(sys: SwitchingSystem, tol: float = None, nodes: int = QUAD_NODES) -> LyapunovEstimate:
    """
    Top Lyapunov exponent of a planar system whose controls all rotate the same way.

    Finds the root of the strictly decreasing F(lambda) by bisection. The
    pointwise maximum over vertices is optimal because the gain is a ratio of
    functions affine in the control weight, hence monotone in it.

    Raises:
        MethodInapplicableError: Some control does not rotate counter-clockwise
    """
    tol = tol or get_float_config('Lyapunov', 'bisection_tol', DEFAULT_BISECTION_TOL)
    nodes = max(nodes, MIN_NODES)
    field = PolarField.from_system(sys)
    min_rate = field.validate()

    theta = np.pi * np.arange(VALIDATION_GRID) / VALIDATION_GRID
    rho, _ = field.rates(theta)
    lo, hi = float(rho.min()) - 1.0, float(rho.max()) + 1.0
    lam = bisect(lambda x: field.angular_function(x, nodes), lo, hi, xtol=tol, maxiter=200)
    logger.info(f"✓ {sys.label}: angular method gives lambda* = {lam:.12f}")
    return LyapunovEstimate(lam, lam, EstimateMethod.PLANAR_ANGULAR,
                            {'nodes': nodes, 'bisection_tol': tol},
                            {'min_angular_rate': min_rate,
                             'switching_angles': field.switching_angles(lam).tolist()})


def winding_check(sys: SwitchingSystem, sched: Schedule, x0, step: float = 1e-2) -> dict:
    """
    Polar angle along a trajectory: is it non-decreasing, and how fast does it turn?

    For systems whose nonzero generators all rotate counter-clockwise the
    angle can only grow, at a rate of at least the occupation-weighted minimum
    angular rate.
    """
    from ..system import evolve

    traj = evolve(sys, sched, x0, step)
    angle = np.unwrap(np.arctan2(traj.states[:, 1], traj.states[:, 0]))
    field = PolarField.from_system(sys)
    theta = np.pi * np.arange(VALIDATION_GRID) / VALIDATION_GRID
    _, omega = field.rates(theta)
    min_rates = omega.min(axis=1)
    steps = np.diff(angle)
    total = float(angle[-1] - angle[0])
    guaranteed = float(sched.durations @ (sched.weights @ min_rates))
    return {
        'monotone': bool(np.all(steps >= -1e-12)),
        'total_winding': total,
        'guaranteed_winding': guaranteed,
        'rate_bound_holds': total >= guaranteed - 1e-9 * max(1.0, guaranteed),
        'min_angular_rates': min_rates.tolist(),
        'largest_backstep': float(max(0.0, -steps.min())) if steps.size else 0.0,
    }
