"""Flat pieces of a unit sphere along (u1, u2) (x) v as u2 sweeps [-|u1|, |u1|]."""

import logging

import numpy as np

from ..errors import DimensionError, InvalidInputError
from ..models import FlatnessReport, NormModel

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 21
DEFAULT_TOLERANCE = 1e-2


def flatness_points(u1: float, v=None, samples: int = DEFAULT_SAMPLES, dim: int = 4):
    """
    The u2 grid and the points (u1, u2) (x) v.

    In dimension 2 the tensor factor is dropped and the points are (u1, u2).

    Returns:
        (u2 grid, points of shape (samples, dim))
    """
    if samples < 2:
        raise InvalidInputError("flatness needs at least two samples")
    u2 = np.linspace(-abs(u1), abs(u1), samples)
    left = np.column_stack([np.full(samples, float(u1)), u2])
    if dim == 2:
        return u2, left
    if dim != 4:
        raise DimensionError(f"flatness is defined for dimension 2 or 4, got {dim}")
    v = np.asarray((1.0, 0.0) if v is None else v, dtype=float).reshape(2)
    return u2, np.einsum('ni,j->nij', left, v).reshape(samples, 4)


def flatness_check(norm: NormModel, u1: float, v=None, samples: int = DEFAULT_SAMPLES,
                   tolerance: float = DEFAULT_TOLERANCE) -> FlatnessReport:
    """
    How far the norm strays from its u2 = 0 value along the segment.

    Also checks the segment really lies on a sphere: the two endpoints are
    scaled onto the unit sphere and the norm of their midpoint is compared
    with 1. A strictly convex norm would put the midpoint strictly inside.

    Args:
        norm: Norm on R^2 or R^4
        u1: First coordinate of the left factor
        v: Right factor (ignored in dimension 2)
        samples: Grid size for u2
        tolerance: Allowed |midpoint norm - 1|

    Returns:
        FlatnessReport
    """
    u2, points = flatness_points(u1, v, samples, norm.dim)
    values = np.asarray(norm(points), dtype=float).reshape(-1)
    reference = float(norm(flatness_points(u1, v, 3, norm.dim)[1][1]))
    v_list = [] if norm.dim == 2 else [float(x) for x in np.asarray((1.0, 0.0) if v is None else v).reshape(2)]

    if reference == 0.0:
        logger.info(f"📋 {norm.name}: degenerate segment at u1 = 0, every point is the origin")
        return FlatnessReport(float(u1), v_list, u2.tolist(), values.tolist(), 0.0, 0.0, False, tolerance)

    deviation = float(np.max(np.abs(values - reference)) / reference)
    a, b = points[0] / values[0], points[-1] / values[-1]
    midpoint = float(norm(0.5 * (a + b)))
    on_sphere = abs(midpoint - 1.0) <= tolerance
    marker = '✓' if deviation <= tolerance else '✗'
    logger.info(f"{marker} {norm.name}: flatness deviation {deviation:.3e}, midpoint norm {midpoint:.9f}")
    return FlatnessReport(float(u1), v_list, u2.tolist(), values.tolist(), deviation, midpoint, on_sphere, tolerance)
