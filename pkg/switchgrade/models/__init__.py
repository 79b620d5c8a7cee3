"""Data models: systems, schedules, trajectories, estimates and norms."""

from .switching import SwitchingSystem, Schedule, Trajectory, MeasurableLaw
from .estimates import (
    EstimateMethod, CheckStatus, LyapunovEstimate, CertificateReport, CalculusReport,
    FlatnessReport, LimitReport, CheckItem, Checklist,
)
from .norm_model import NormKind, NormModel, EuclideanNorm

__all__ = [
    'SwitchingSystem',
    'Schedule',
    'Trajectory',
    'MeasurableLaw',
    'EstimateMethod',
    'CheckStatus',
    'LyapunovEstimate',
    'CertificateReport',
    'CalculusReport',
    'FlatnessReport',
    'LimitReport',
    'CheckItem',
    'Checklist',
    'NormKind',
    'NormModel',
    'EuclideanNorm',
]
