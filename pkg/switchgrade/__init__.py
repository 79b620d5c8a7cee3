"""
switchgrade - growth rates and extremal norms of linear switching systems.

Builds and checks the pieces of a marginally stable, irreducible 4-dimensional
switching system all of whose hull elements are Hurwitz, and whose Barabanov
norm is not strictly convex: planar growth rates (angular method and product
search), closed-form and tabulated extremal norms, a finite-horizon model of
the 4-dimensional norm, and the flatness of its unit sphere.

Or in plain English: we multiply a lot of 2x2 matrices together and then
argue with ourselves about whether a circle has a flat bit.
"""

__version__ = '1.0.0'
__author__ = 'switchgrade contributors'

# Core modules
from . import config
from . import models
from . import matexp
from . import system
from . import spectral
from . import lyapunov
from . import catalog
from . import barabanov
from . import utils

# Commonly used exports
from .config import get_config, get_bool_config, get_int_config, get_float_config
from .errors import SwitchgradeError
from .models import SwitchingSystem, Schedule, Trajectory, MeasurableLaw, LyapunovEstimate
from .lyapunov import lambda_planar_angular, lambda_lower_product_search, lambda_upper_extremal
from .barabanov import norm_A, norm_B_build, flatness_check, cgm_alpha
from .catalog import rotation_lambda

__all__ = [
    # Modules
    'config',
    'models',
    'matexp',
    'system',
    'spectral',
    'lyapunov',
    'catalog',
    'barabanov',
    'utils',
    # Functions
    'get_config',
    'get_bool_config',
    'get_int_config',
    'get_float_config',
    'lambda_planar_angular',
    'lambda_lower_product_search',
    'lambda_upper_extremal',
    'norm_A',
    'norm_B_build',
    'flatness_check',
    'cgm_alpha',
    'rotation_lambda',
    # Classes
    'SwitchgradeError',
    'SwitchingSystem',
    'Schedule',
    'Trajectory',
    'MeasurableLaw',
    'LyapunovEstimate',
]
