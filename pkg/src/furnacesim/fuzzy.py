"""Two-input, one-output Mamdani inference.

Triangular 50%-overlap partitions on [-1, 1], min conjunction, max
aggregation and centre-of-gravity defuzzification on a fixed uniform grid.
Everything here is pure; controllers built from frozen partitions and rule
bases are cached and safe to share between threads.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 1001

LABELS_5 = ("NL", "NS", "Z", "PS", "PL")
LABELS_7 = ("NL", "NM", "NS", "Z", "PS", "PM", "PL")
LABELS_9 = ("NVL", "NL", "NM", "NS", "Z", "PS", "PM", "PL", "PVL")

_STANDARD_LABELS = {5: LABELS_5, 7: LABELS_7, 9: LABELS_9}


class FuzzyConfigError(ValueError):
    """Bad partition or rule-base definition."""


@dataclass(frozen=True)
class FuzzySet:
    label: str
    center: float
    half_width: float
    shoulder: str = "none"  # "left", "none" or "right"

    def __post_init__(self):
        if self.shoulder not in ("left", "none", "right"):
            raise FuzzyConfigError(f"unknown shoulder {self.shoulder!r}")
        if not self.half_width > 0:
            raise FuzzyConfigError(f"set {self.label}: half_width must be > 0")


def membership(fset: FuzzySet, x):
    """Degree of membership of ``x`` (scalar or array) in ``fset``."""
    x = np.asarray(x, dtype=float)
    d = (x - fset.center) / fset.half_width
    if fset.shoulder == "left":
        d = np.maximum(d, 0.0)
    elif fset.shoulder == "right":
        d = np.minimum(d, 0.0)
    mu = np.clip(1.0 - np.abs(d), 0.0, 1.0)
    return float(mu) if mu.ndim == 0 else mu


@dataclass(frozen=True)
class FuzzyPartition:
    sets: tuple[FuzzySet, ...]

    def __post_init__(self):
        if len(self.sets) < 2:
            raise FuzzyConfigError("a partition needs at least two sets")
        centers = [s.center for s in self.sets]
        if any(b <= a for a, b in zip(centers, centers[1:])):
            raise FuzzyConfigError("set centres must be strictly increasing")
        labels = self.labels
        if len(set(labels)) != len(labels):
            raise FuzzyConfigError("duplicate labels in partition")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.sets)

    def __len__(self):
        return len(self.sets)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise FuzzyConfigError(f"label {label!r} not in partition {self.labels}") from None


def uniform_partition(labels: Sequence[str]) -> FuzzyPartition:
    """Evenly spaced triangles on [-1, 1] with saturating end shoulders."""
    n = len(labels)
    if n < 2:
        raise FuzzyConfigError("need at least two labels")
    step = 2.0 / (n - 1)
    sets = []
    for k, label in enumerate(labels):
        shoulder = "left" if k == 0 else "right" if k == n - 1 else "none"
        sets.append(FuzzySet(label, -1.0 + k * step, step, shoulder))
    return FuzzyPartition(tuple(sets))


def standard_partition(n: int) -> FuzzyPartition:
    try:
        return uniform_partition(_STANDARD_LABELS[n])
    except KeyError:
        raise FuzzyConfigError(f"no standard label set with {n} terms") from None


def fuzzify(partition: FuzzyPartition, x: float) -> np.ndarray:
    """Membership vector of ``x`` against every set in ``partition``."""
    return np.array([membership(s, x) for s in partition.sets])


@dataclass(frozen=True)
class RuleBase:
    """Rule grid: ``cells[i][j]`` is the consequent for (rows[i], cols[j])."""

    rows: tuple[str, ...]
    cols: tuple[str, ...]
    cells: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if len(self.cells) != len(self.rows):
            raise FuzzyConfigError("rule grid row count does not match row labels")
        for r, row in enumerate(self.cells):
            if len(row) != len(self.cols):
                raise FuzzyConfigError(f"rule grid row {r} has {len(row)} cells, expected {len(self.cols)}")

    @classmethod
    def from_grid(cls, grid: Sequence[Sequence[str]], labels: Sequence[str]) -> "RuleBase":
        labels = tuple(labels)
        cells = tuple(tuple(row) for row in grid)
        return cls(labels, labels, cells)

    @property
    def shape(self):
        return len(self.rows), len(self.cols)

    def cell(self, row: str, col: str) -> str:
        return self.cells[self.rows.index(row)][self.cols.index(col)]

    def check_labels(self, out_partition: FuzzyPartition):
        allowed = set(out_partition.labels)
        for row in self.cells:
            for label in row:
                if label not in allowed:
                    raise FuzzyConfigError(f"rule consequent {label!r} not in output partition")


# Resonance controller: rows Q_e, columns dQ_e, consequent is the f_s increment.
RESONANCE_TABLE = (
    ("PL", "PL", "PS", "PS", "Z"),
    ("PL", "PS", "PS", "Z", "NS"),
    ("PS", "PS", "Z", "NS", "NS"),
    ("PS", "Z", "NS", "NS", "NL"),
    ("Z", "NS", "NS", "NL", "NL"),
)

# Power controller: rows P_e, columns dP_e, consequent is the f_c increment.
POWER_TABLE = (
    ("NVL", "NVL", "NVL", "NVL", "NVL", "NL", "NM", "NS", "Z"),
    ("NVL", "NVL", "NVL", "NVL", "NL", "NM", "NS", "Z", "PS"),
    ("NVL", "NVL", "NVL", "NL", "NM", "NS", "Z", "PS", "PM"),
    ("NVL", "NVL", "NL", "NM", "NS", "Z", "PS", "PM", "PL"),
    ("NVL", "NL", "NM", "NS", "Z", "PS", "PM", "PL", "PVL"),
    ("NL", "NM", "NS", "Z", "PS", "PM", "PL", "PVL", "PVL"),
    ("NM", "NS", "Z", "PS", "PM", "PL", "PVL", "PVL", "PVL"),
    ("NS", "Z", "PS", "PM", "PL", "PVL", "PVL", "PVL", "PVL"),
    ("Z", "PS", "PM", "PL", "PVL", "PVL", "PVL", "PVL", "PVL"),
)

RESONANCE_RULES = RuleBase.from_grid(RESONANCE_TABLE, LABELS_5)
POWER_RULES = RuleBase.from_grid(POWER_TABLE, LABELS_9)


def infer(rules: RuleBase, deg_a, deg_b) -> dict[str, float]:
    """Sup-min inference; same-consequent rules are combined with max.

    Returns only the consequents that fired (activation > 0).
    """
    deg_a = np.asarray(deg_a, dtype=float)
    deg_b = np.asarray(deg_b, dtype=float)
    if deg_a.shape != (len(rules.rows),) or deg_b.shape != (len(rules.cols),):
        raise FuzzyConfigError(
            f"degree vectors {deg_a.shape}/{deg_b.shape} do not match rule grid {rules.shape}"
        )
    out: dict[str, float] = {}
    for i in np.flatnonzero(deg_a > 0):
        for j in np.flatnonzero(deg_b > 0):
            w = min(deg_a[i], deg_b[j])
            label = rules.cells[i][j]
            if w > out.get(label, 0.0):
                out[label] = float(w)
    return out


class Defuzzified(NamedTuple):
    value: float
    fired: bool


def _grid(points: int) -> np.ndarray:
    x = np.linspace(-1.0, 1.0, points)
    # mirror the lower half so the grid is exactly antisymmetric
    half = points // 2
    x[points - half:] = -x[:half][::-1]
    if points % 2:
        x[half] = 0.0
    return x


@functools.lru_cache(maxsize=32)
def _output_table(partition: FuzzyPartition, points: int):
    x = _grid(points)
    mu = np.vstack([membership(s, x) for s in partition.sets])
    dx = np.diff(x)
    weights = np.zeros(points)  # trapezoid weights, symmetric about 0
    weights[:-1] += 0.5 * dx
    weights[1:] += 0.5 * dx
    return x, mu, weights


def defuzzify_centroid(
    aggregate: Mapping[str, float],
    output_partition: FuzzyPartition,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> Defuzzified:
    """Centre of gravity of the max of clipped output sets (trapezoid rule).

    Moment and area are summed over mirrored grid pairs, so mirrored
    aggregates give exactly negated results and symmetric ones exactly 0.
    """
    x, mu, weights = _output_table(output_partition, grid_points)
    agg = np.zeros_like(x)
    for label, w in aggregate.items():
        if w > 0:
            np.maximum(agg, np.minimum(mu[output_partition.index(label)], w), out=agg)
    f = agg * weights
    half = grid_points // 2
    lo, hi = f[:half], f[::-1][:half]
    area = float(np.sum(lo + hi)) + (float(f[half]) if grid_points % 2 else 0.0)
    if area <= 0.0:
        logger.warning("no rule fired; defuzzified output forced to 0")
        return Defuzzified(0.0, False)
    moment = float(np.sum(x[:half] * (lo - hi)))
    value = moment / area
    return Defuzzified(float(min(1.0, max(-1.0, value))), True)


@dataclass(frozen=True)
class FuzzyController:
    """Two-input controller: ``u = controller(e, de)``, all per-unit."""

    input_a: FuzzyPartition
    input_b: FuzzyPartition
    output: FuzzyPartition
    rules: RuleBase
    grid_points: int = DEFAULT_GRID_POINTS

    def __post_init__(self):
        if self.rules.rows != self.input_a.labels or self.rules.cols != self.input_b.labels:
            raise FuzzyConfigError("rule grid labels do not match input partitions")
        self.rules.check_labels(self.output)
        if self.grid_points < 3:
            raise FuzzyConfigError("defuzzification grid needs at least 3 points")

    def aggregate(self, e: float, de: float) -> dict[str, float]:
        e = min(1.0, max(-1.0, float(e)))
        de = min(1.0, max(-1.0, float(de)))
        return infer(self.rules, fuzzify(self.input_a, e), fuzzify(self.input_b, de))

    def __call__(self, e: float, de: float) -> float:
        return defuzzify_centroid(self.aggregate(e, de), self.output, self.grid_points).value


def controller_from_rules(rules: RuleBase, grid_points: int = DEFAULT_GRID_POINTS) -> FuzzyController:
    """Controller with uniform partitions built from the rule grid's labels."""
    pa = uniform_partition(rules.rows)
    pb = uniform_partition(rules.cols)
    out_labels = _output_labels(rules)
    return FuzzyController(pa, pb, uniform_partition(out_labels), rules, grid_points)


def _output_labels(rules: RuleBase) -> tuple[str, ...]:
    used = {c for row in rules.cells for c in row}
    for labels in (rules.rows, *_STANDARD_LABELS.values()):
        if used <= set(labels):
            return tuple(labels)
    raise FuzzyConfigError(f"cannot infer output partition for labels {sorted(used)}")


def controller_eval(partitions, rules: RuleBase, e: float, de: float,
                    grid_points: int = DEFAULT_GRID_POINTS) -> float:
    """Functional form: ``partitions`` is ``(input_a, input_b, output)``."""
    return _cached_controller(tuple(partitions), rules, grid_points)(e, de)


@functools.lru_cache(maxsize=32)
def _cached_controller(partitions, rules, grid_points):
    a, b, out = partitions
    return FuzzyController(a, b, out, rules, grid_points)


PRESETS = {
    "resonance5": RESONANCE_RULES,
    "power9": POWER_RULES,
}


def preset(name: str) -> RuleBase:
    try:
        return PRESETS[name]
    except KeyError:
        raise FuzzyConfigError(f"unknown rule preset {name!r}; known: {', '.join(PRESETS)}") from None


def parse_rule_grid(text: str) -> RuleBase:
    """Parse ``"PL PL PS; PL PS Z; ..."`` (rows separated by ';') into a RuleBase.

    Row/column labels are the standard label set with as many terms as the grid has rows.
    """
    rows = [r.split() for r in text.split(";") if r.strip()]
    n = len(rows)
    if n not in _STANDARD_LABELS:
        raise FuzzyConfigError(f"rule grid must be 5x5, 7x7 or 9x9, got {n} rows")
    return RuleBase.from_grid(rows, _STANDARD_LABELS[n])


def rule_grid_text(rules: RuleBase) -> str:
    return "; ".join(" ".join(row) for row in rules.cells)
