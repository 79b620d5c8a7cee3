"""
Closed-form extremal norms of the type sup_t |<e1, e^{tM} v>|.

For a 2x2 matrix M with eigenvalues mu +- i nu (mu < 0) the first coordinate
of e^{tM} v is g(t) = e^{mu t} (p cos nu t + q sin nu t), with p = v1 and
q = ((M - mu I) v)_1 / nu. Since g(t + pi/nu) = -e^{mu pi/nu} g(t), the
supremum of |g| over t >= 0 is attained on [0, pi/nu), where g has exactly
one critical point. No tail truncation is involved.
"""

import logging
from typing import Tuple

import numpy as np

from ..catalog import A1, M1
from ..errors import MethodInapplicableError
from ..matexp import as_mat, as_vec, eigenvalues
from ..models import NormKind, NormModel, Schedule

logger = logging.getLogger(__name__)


class ProjectedSupNorm(NormModel):
    """v -> sup_{t >= 0} |<e1, e^{tM} v>| for a stable rotating 2x2 matrix M."""

    kind = NormKind.CLOSED_FORM_A

    def __init__(self, M, name: str = 'projected_sup', kind: NormKind = None):
        super().__init__(2, name)
        self.M = as_mat(M, name)
        if self.M.shape != (2, 2):
            raise MethodInapplicableError(f"{name}: closed form needs a 2x2 matrix")
        top = eigenvalues(self.M)[0]
        if top.imag <= 0 or top.real >= 0:
            raise MethodInapplicableError(f"{name}: needs complex eigenvalues with negative real part, got {top}")
        self.mu, self.nu = float(top.real), float(top.imag)
        if kind is not None:
            self.kind = kind

    def coefficients(self, vs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(p, q) with <e1, e^{tM} v> = e^{mu t} (p cos nu t + q sin nu t)."""
        p = vs[:, 0]
        q = ((self.M[0, 0] - self.mu) * vs[:, 0] + self.M[0, 1] * vs[:, 1]) / self.nu
        return p, q

    def projection(self, v, ts) -> np.ndarray:
        """<e1, e^{tM} v> at every t."""
        p, q = self.coefficients(as_vec(v, 2)[None])
        ts = np.asarray(ts, dtype=float)
        return np.exp(self.mu * ts) * (p[0] * np.cos(self.nu * ts) + q[0] * np.sin(self.nu * ts))

    def critical_times(self, vs: np.ndarray) -> np.ndarray:
        """The critical point of g in [0, pi/nu) for every row."""
        p, q = self.coefficients(vs)
        phase = np.arctan2(self.mu * p + self.nu * q, self.nu * p - self.mu * q)
        return np.mod(phase, np.pi) / self.nu

    def _values(self, vs: np.ndarray):
        p, q = self.coefficients(vs)
        tau = self.critical_times(vs)
        inner = np.abs(np.exp(self.mu * tau) * (p * np.cos(self.nu * tau) + q * np.sin(self.nu * tau)))
        return np.abs(p), inner, tau

    def evaluate(self, vs: np.ndarray) -> np.ndarray:
        start, inner, _ = self._values(vs)
        return np.maximum(start, inner)

    def argmax(self, v) -> float:
        """The time in [0, pi/nu) where |g| peaks (0 when the start wins)."""
        start, inner, tau = self._values(as_vec(v, 2)[None])
        return float(tau[0]) if inner[0] > start[0] else 0.0

    def params(self) -> dict:
        return dict(super().params(), M=self.M.tolist(), mu=self.mu, nu=self.nu)


NORM_A = ProjectedSupNorm(A1, 'norm_A', NormKind.CLOSED_FORM_A)


def norm_A(v) -> float:
    """sup_{t >= 0} |e^{-t} (v1 cos t + v2 sin t)|."""
    return NORM_A(as_vec(v, 2, 'v'))


def norm_A_argmax(v) -> float:
    """tau_0 in [0, pi) where the supremum defining norm_A(v) is attained."""
    return NORM_A.argmax(v)


def two_phase_witness(v, T: float) -> Schedule:
    """
    Schedule that keeps norm_A constant from v: A1 until tau_0, then A0 up to T.

    Riding A1 until the supremum is reached lines the state up with
    |x2| <= |x1|; from there A0 only shrinks x2, and norm_A is |x1| on that
    cone.
    """
    tau = norm_A_argmax(v)
    if T <= tau:
        return Schedule.vertex([T], [1], 2)
    durations, indices = [T - tau], [0]
    if tau > 0:
        durations, indices = [tau] + durations, [1] + indices
    return Schedule.vertex(durations, indices, 2)


def cgm_norm(alpha: float) -> ProjectedSupNorm:
    """The closed-form extremal norm of (M0, M1(alpha)), same construction with M1 in place of A1."""
    return ProjectedSupNorm(M1(alpha), f'norm_cgm({alpha:.6f})', NormKind.CLOSED_FORM_CGM)
