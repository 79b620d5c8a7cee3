"""Utility functions."""

from .sampling import sphere_samples, circle_points
from .export import parse_schedule, load_schedule, dump_schedule, ball_boundary, write_ball, write_report

__all__ = [
    'sphere_samples',
    'circle_points',
    'parse_schedule',
    'load_schedule',
    'dump_schedule',
    'ball_boundary',
    'write_ball',
    'write_report',
]
