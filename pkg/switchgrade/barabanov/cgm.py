"""
The tangency constant of the (M0, M1(alpha)) example.

alpha is tuned so that t -> e^{t M1(alpha)} (-1, 0) just touches the line
x = 1: the largest first coordinate over positive times equals 1.
"""

import logging

import numpy as np
from scipy.optimize import bisect, brentq

from ..catalog import M1
from ..errors import ConfigurationError
from ..matexp import expm_batch

logger = logging.getLogger(__name__)

T_MAX = 20.0
T_STEP = 1e-3
BRACKET = (-2.0, 0.0)
BRACKET_STEP = 0.05
ALPHA_TOL = 1e-12
START = np.array([-1.0, 0.0])


def _first_coordinate(M: np.ndarray, ts) -> np.ndarray:
    return expm_batch(M, ts)[:, 0, :] @ START


def cgm_g(alpha: float, t_max: float = T_MAX, step: float = T_STEP) -> float:
    """
    max_{0 < t <= t_max} of the first coordinate of e^{t M1(alpha)} (-1, 0).

    A grid pass finds the best sample; if the derivative changes sign around
    it, brentq pins the critical point down.
    """
    M = M1(alpha)
    ts = np.linspace(step, t_max, int(round(t_max / step)))
    values = _first_coordinate(M, ts)
    k = int(np.argmax(values))
    best = float(values[k])

    def slope(t):
        return float((M @ expm_batch(M, [t])[0] @ START)[0])

    lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, ts.size - 1)]
    if lo < hi and slope(lo) > 0 > slope(hi):
        t_star = brentq(slope, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        best = max(best, float(_first_coordinate(M, [t_star])[0]))
    return best


def cgm_alpha(bracket=BRACKET, tol: float = ALPHA_TOL) -> float:
    """
    The alpha in the bracket with cgm_g(alpha) = 1.

    Scans the bracket in steps of 0.05 for a sign change of cgm_g - 1, then
    bisects.

    Raises:
        ConfigurationError: No sign change in the bracket
    """
    grid = np.arange(bracket[0], bracket[1] + 0.5 * BRACKET_STEP, BRACKET_STEP)
    residuals = np.array([cgm_g(a) - 1.0 for a in grid])
    changes = np.flatnonzero(np.sign(residuals[:-1]) * np.sign(residuals[1:]) <= 0)
    if changes.size == 0:
        raise ConfigurationError(f"cgm_g - 1 does not change sign on {bracket}")
    lo, hi = grid[changes[0]], grid[changes[0] + 1]
    alpha = bisect(lambda a: cgm_g(a) - 1.0, lo, hi, xtol=tol, maxiter=200)
    logger.info(f"✓ CGM tangency constant alpha = {alpha:.12f}, residual {cgm_g(alpha) - 1.0:.2e}")
    return float(alpha)
