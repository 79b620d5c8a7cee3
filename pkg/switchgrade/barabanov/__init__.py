"""Extremal and Barabanov norms: closed forms, polar tables, finite-horizon models and flatness."""

from .closed_form import ProjectedSupNorm, NORM_A, norm_A, norm_A_argmax, two_phase_witness, cgm_norm
from .polar_table import PolarTableNorm, norm_B_build
from .finite_horizon import FiniteHorizonNorm, HorizonValue, norm_X_finite_horizon_model, norm_X_finite_horizon
from .flatness import flatness_points, flatness_check
from .cgm import cgm_g, cgm_alpha
from .limits import x_limit_behavior, tensor_reachability, tensor_calculus_checks

__all__ = [
    'ProjectedSupNorm',
    'NORM_A',
    'norm_A',
    'norm_A_argmax',
    'two_phase_witness',
    'cgm_norm',
    'PolarTableNorm',
    'norm_B_build',
    'FiniteHorizonNorm',
    'HorizonValue',
    'norm_X_finite_horizon_model',
    'norm_X_finite_horizon',
    'flatness_points',
    'flatness_check',
    'cgm_g',
    'cgm_alpha',
    'x_limit_behavior',
    'tensor_reachability',
    'tensor_calculus_checks',
]
