"""Top Lyapunov exponent: beam search, the planar angular method and extremal certificates."""

from .beam import DurationGrid, BeamResult, beam_search, default_grid, make_grid
from .polar import PolarField, lambda_planar_angular, winding_check
from .estimates import (
    lambda_singleton, lambda_lower_product_search, lambda_upper_extremal, lambda_calculus_checks,
    growth_envelope, commute, union_system, sum_system,
)

__all__ = [
    'DurationGrid',
    'BeamResult',
    'beam_search',
    'default_grid',
    'make_grid',
    'PolarField',
    'lambda_planar_angular',
    'winding_check',
    'lambda_singleton',
    'lambda_lower_product_search',
    'lambda_upper_extremal',
    'lambda_calculus_checks',
    'growth_envelope',
    'commute',
    'union_system',
    'sum_system',
]
