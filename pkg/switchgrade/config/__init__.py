"""Environment-driven configuration."""

from .config import get_config, get_bool_config, get_int_config, get_float_config, get_threads

__all__ = [
    'get_config',
    'get_bool_config',
    'get_int_config',
    'get_float_config',
    'get_threads',
]
