"""Base class for evaluable norms."""

import logging
from enum import Enum

import numpy as np

from ..errors import DimensionError

logger = logging.getLogger(__name__)


class NormKind(Enum):
    CLOSED_FORM_A = "closed_form_A"
    CLOSED_FORM_CGM = "closed_form_cgm"
    POLAR_TABLE = "polar_table"
    FINITE_HORIZON = "finite_horizon"
    EUCLIDEAN = "euclidean"


class NormModel:
    """
    Base class for candidate norms on R^dim.

    Subclasses implement `evaluate` on an (n, dim) array and return n values;
    calling the model works on a single vector or any (..., dim) stack.
    """

    kind: NormKind = None

    def __init__(self, dim: int, name: str):
        self.dim = dim
        self.name = name

    def evaluate(self, vs: np.ndarray) -> np.ndarray:
        """
        Norm of every row of vs.

        Args:
            vs: Array of shape (n, dim)

        Returns:
            Array of shape (n,)
        """
        raise NotImplementedError

    def __call__(self, v):
        arr = np.asarray(v, dtype=float)
        if arr.shape[-1] != self.dim:
            raise DimensionError(f"{self.name} expects vectors of length {self.dim}, got {arr.shape}")
        flat = arr.reshape(-1, self.dim)
        values = self.evaluate(flat).reshape(arr.shape[:-1])
        return float(values) if values.ndim == 0 else values

    def params(self) -> dict:
        """Parameters worth echoing into reports."""
        return {'kind': self.kind.value, 'dim': self.dim, 'name': self.name}

    def __repr__(self):
        return f"{type(self).__name__}(name={self.name!r}, dim={self.dim})"


class EuclideanNorm(NormModel):
    """Plain Euclidean norm, the default comparison point."""

    kind = NormKind.EUCLIDEAN

    def __init__(self, dim: int):
        super().__init__(dim, 'euclidean')

    def evaluate(self, vs: np.ndarray) -> np.ndarray:
        return np.linalg.norm(vs, axis=1)
