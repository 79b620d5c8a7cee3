"""Deterministic low-discrepancy samples of spheres and simplices."""

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc


def sphere_samples(dim: int, count: int) -> np.ndarray:
    """
    `count` unit vectors in R^dim from an unscrambled Halton sequence.

    The circle gets van der Corput angles; higher dimensions push Halton points
    through the normal quantile and normalise. The first Halton point (the
    origin) is skipped.

    Returns:
        Array of shape (count, dim)
    """
    if dim == 1:
        return np.where(np.arange(count) % 2 == 0, 1.0, -1.0)[:, None]
    sampler = qmc.Halton(d=1 if dim == 2 else dim, scramble=False)
    points = sampler.random(count + 1)[1:]
    if dim == 2:
        angles = 2 * np.pi * points[:, 0]
        return np.column_stack([np.cos(angles), np.sin(angles)])
    gauss = ndtri(points)
    return gauss / np.linalg.norm(gauss, axis=1, keepdims=True)


def circle_points(count: int) -> np.ndarray:
    """Evenly spaced angles on [0, 2 pi) and their unit vectors."""
    angles = 2 * np.pi * np.arange(count) / count
    return angles, np.column_stack([np.cos(angles), np.sin(angles)])
