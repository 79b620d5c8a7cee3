"""Schedule files, unit-ball exports and JSON reports."""

import csv
import json
import logging
import sys
from pathlib import Path
from typing import List, Tuple

import numpy as np

from ..errors import ScheduleParseError, SwitchgradeError
from ..models import NormModel, Schedule
from .sampling import circle_points

logger = logging.getLogger(__name__)

WEIGHT_TOL = 1e-9


def _item_lines(text: str) -> List[int]:
    """Line number of every top-level object opening brace inside the outer array."""
    lines, depth, line, in_string, escaped = [], 0, 1, False, False
    for ch in text:
        if ch == '\n':
            line += 1
        if in_string:
            if escaped:
                escaped = False
            elif ch == '\\':
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch in '[{':
            if ch == '{' and depth == 1:
                lines.append(line)
            depth += 1
        elif ch in ']}':
            depth -= 1
    return lines


def parse_schedule(text: str, size: int, source: str = '<schedule>') -> Schedule:
    """
    Parse a schedule file: a JSON array of {"duration": d, "weights": [w_0, ...]}.

    Weights must lie on the simplex within 1e-9 and are renormalised to sum
    to exactly 1.

    Raises:
        ScheduleParseError: Bad JSON or a bad entry, with the line it starts on
    """
    try:
        items = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScheduleParseError(e.msg, e.lineno, source)
    if not isinstance(items, list) or not items:
        raise ScheduleParseError("expected a non-empty JSON array of pieces", 1, source)

    lines = _item_lines(text)
    durations, weights = [], []
    for i, item in enumerate(items):
        line = lines[i] if i < len(lines) else 1
        if not isinstance(item, dict) or 'duration' not in item or 'weights' not in item:
            raise ScheduleParseError(f"piece {i} needs 'duration' and 'weights'", line, source)
        try:
            d = float(item['duration'])
            w = np.asarray(item['weights'], dtype=float).reshape(-1)
        except (TypeError, ValueError):
            raise ScheduleParseError(f"piece {i} has non-numeric fields", line, source)
        if not np.isfinite(d) or d <= 0:
            raise ScheduleParseError(f"piece {i}: duration must be positive", line, source)
        if w.size != size:
            raise ScheduleParseError(f"piece {i}: {w.size} weights, the system has {size} generators", line, source)
        if not np.all(np.isfinite(w)) or np.any(w < -WEIGHT_TOL) or abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise ScheduleParseError(f"piece {i}: weights are not on the simplex", line, source)
        w = np.clip(w, 0.0, None)
        durations.append(d)
        weights.append(w / w.sum())
    logger.debug(f"Parsed {len(durations)} schedule pieces from {source}")
    return Schedule(np.array(durations), np.array(weights))


def load_schedule(path, size: int) -> Schedule:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ScheduleParseError(f"cannot read schedule: {e.strerror}", 0, str(path))
    return parse_schedule(text, size, str(path))


def dump_schedule(sched: Schedule, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(sched.to_records(), indent=2) + '\n', encoding='utf-8')
    return path


def ball_boundary(norm: NormModel, samples: int) -> Tuple[np.ndarray, np.ndarray]:
    """Angles and boundary points v / norm(v) of a planar unit ball."""
    if samples < 3:
        raise SwitchgradeError("need at least 3 boundary samples")
    theta, directions = circle_points(samples)
    return theta, directions / norm(directions)[:, None]


def write_ball(path, theta: np.ndarray, points: np.ndarray, fmt: str = 'csv') -> Path:
    """
    CSV with columns theta, x, y, or a JSON array of [x, y].

    Raises:
        SwitchgradeError: The file could not be written
    """
    path = Path(path)
    try:
        if fmt == 'csv':
            with path.open('w', newline='', encoding='utf-8') as f:
                writer = csv.writer(f, lineterminator='\n')
                writer.writerow(['theta', 'x', 'y'])
                writer.writerows([repr(float(t)), repr(float(x)), repr(float(y))]
                                 for t, (x, y) in zip(theta, points))
        else:
            path.write_text(json.dumps(points.tolist()) + '\n', encoding='utf-8')
    except OSError as e:
        raise SwitchgradeError(f"{path}: {e.strerror}")
    logger.info(f"📋 Wrote {len(theta)} boundary points to {path}")
    return path


def write_report(data: dict, path=None) -> None:
    """JSON to path, or to stdout when path is None. Floats keep full precision."""
    text = json.dumps(data, indent=2, ensure_ascii=False)
    if path is None:
        sys.stdout.write(text + '\n')
        sys.stdout.flush()
        return
    try:
        Path(path).write_text(text + '\n', encoding='utf-8')
    except OSError as e:
        raise SwitchgradeError(f"{path}: {e.strerror}")
