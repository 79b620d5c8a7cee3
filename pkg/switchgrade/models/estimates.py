"""Lyapunov estimates and the reports the checks produce."""

import logging
import math
from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Any, Dict, List, Optional

from ..errors import InvalidInputError

logger = logging.getLogger(__name__)

ORDER_SLACK = 1e-9


class EstimateMethod(Enum):
    """How a bound on the top Lyapunov exponent was obtained."""
    PRODUCT_SEARCH = "product_search"
    PLANAR_ANGULAR = "planar_angular"
    EXTREMAL_CERTIFICATE = "extremal_certificate"
    SINGLETON = "singleton"


class CheckStatus(Enum):
    PASS = "PASS"
    FAIL = "FAIL"


def _jsonable(value):
    """Floats stay floats (inf becomes a string), enums become their value."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, 'tolist'):
        return _jsonable(value.tolist())
    return value


@dataclass(frozen=True)
class LyapunovEstimate:
    """Lower/upper bounds on the top Lyapunov exponent plus where they came from."""
    lower: float
    upper: float = math.inf
    method: EstimateMethod = EstimateMethod.PRODUCT_SEARCH
    budget: Dict[str, Any] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.lower > self.upper + ORDER_SLACK:
            raise InvalidInputError(f"lower bound {self.lower!r} exceeds upper bound {self.upper!r}")
        if self.method is EstimateMethod.SINGLETON and self.lower != self.upper:
            raise InvalidInputError("singleton estimates must have lower == upper")

    @property
    def value(self) -> float:
        """Best point estimate: the midpoint if both bounds are finite, else the lower bound."""
        if math.isfinite(self.upper):
            return 0.5 * (self.lower + self.upper)
        return self.lower

    def shifted(self, mu: float) -> 'LyapunovEstimate':
        """Estimate for the system with every generator shifted by -mu."""
        return LyapunovEstimate(self.lower - mu, self.upper - mu, self.method,
                                dict(self.budget), dict(self.details, shift=mu))

    def to_dict(self) -> dict:
        return _jsonable({'lower': self.lower, 'upper': self.upper, 'method': self.method,
                          'budget': self.budget, 'details': self.details})


@dataclass
class CertificateReport:
    """Outcome of the extremal-norm monotonicity test."""
    status: CheckStatus
    system: str
    norm: str
    mu: float
    samples: int
    t_max: float
    dt: float
    slack: float
    max_increase: float
    witness: Optional[Dict[str, Any]] = None
    estimate: Optional[LyapunovEstimate] = None

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS

    def to_dict(self) -> dict:
        data = asdict(self)
        data['estimate'] = self.estimate.to_dict() if self.estimate else None
        return _jsonable(data)


@dataclass
class CalculusReport:
    """Monotonicity, union and sum clauses for two commuting systems."""
    status: CheckStatus
    estimates: Dict[str, LyapunovEstimate]
    clauses: Dict[str, bool]
    slack: float
    uppers: Dict[str, Optional[float]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS

    def to_dict(self) -> dict:
        return _jsonable({'status': self.status, 'slack': self.slack, 'clauses': self.clauses, 'uppers': self.uppers,
                          'estimates': {k: v.to_dict() for k, v in self.estimates.items()}})


@dataclass
class FlatnessReport:
    """Deviation of a norm along (u1, u2) (x) v as u2 sweeps [-|u1|, |u1|]."""
    u1: float
    v: List[float]
    u2_grid: List[float]
    values: List[float]
    max_relative_deviation: float
    midpoint_norm: float
    segment_on_sphere: bool
    tolerance: float

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


@dataclass
class LimitReport:
    """Long-horizon behaviour of an A-system trajectory."""
    limit: List[float]
    second_coordinate: float
    alpha_integral: float
    tail_alpha_integral: float
    horizon: float
    decay_bound_holds: bool
    consistent: bool

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


@dataclass
class CheckItem:
    """One PASS/FAIL line of a checklist."""
    name: str
    status: CheckStatus
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status is CheckStatus.PASS

    def to_dict(self) -> dict:
        return _jsonable({'name': self.name, 'status': self.status, 'details': self.details})


@dataclass
class Checklist:
    """Ordered PASS/FAIL items plus the constants they were run with."""
    items: List[CheckItem] = field(default_factory=list)
    constants: Dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, passed: bool, **details) -> CheckItem:
        item = CheckItem(name, CheckStatus.PASS if passed else CheckStatus.FAIL, details)
        self.items.append(item)
        marker = '✓' if passed else '✗'
        logger.info(f"   {marker} {name}: {item.status.value}")
        return item

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    @property
    def failures(self) -> List[str]:
        return [item.name for item in self.items if not item.passed]

    def to_dict(self) -> dict:
        return _jsonable({'status': CheckStatus.PASS if self.passed else CheckStatus.FAIL,
                          'constants': self.constants,
                          'items': [item.to_dict() for item in self.items]})
