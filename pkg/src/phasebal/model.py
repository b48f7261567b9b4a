"""Feeder domain types and evaluation of phase assignments.

Currents are nonnegative real magnitudes in amperes. Phase labels are the
1-based integers 1, 2, 3 and switch-matrix column ``c`` corresponds to label
``c + 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

PHASES = (1, 2, 3)

Number = Union[int, float]
Assignment = tuple[int, ...]


class DimensionError(ValueError):
    """Raised when an assignment and a load set disagree in length."""


@dataclass(frozen=True)
class LoadSet:
    """Load currents, one per load point; the count must be a multiple of 3."""

    currents: tuple[Number, ...]

    def __post_init__(self):
        currents = tuple(self.currents)
        object.__setattr__(self, "currents", currents)
        n = len(currents)
        if n < 3 or n % 3:
            raise ValueError(f"need a positive multiple of 3 loads, got {n}")
        for i, c in enumerate(currents):
            if isinstance(c, bool) or not isinstance(c, (int, float, np.integer, np.floating)):
                raise TypeError(f"load {i + 1}: not a number: {c!r}")
            if not math.isfinite(c) or c < 0:
                raise ValueError(f"load {i + 1}: current must be finite and >= 0, got {c}")

    def __len__(self):
        return len(self.currents)

    def __iter__(self):
        return iter(self.currents)

    def __getitem__(self, i):
        return self.currents[i]

    @property
    def group_size(self) -> int:
        return len(self.currents) // 3

    def as_array(self) -> np.ndarray:
        return np.asarray(self.currents, dtype=float)

    @property
    def is_integral(self) -> bool:
        return all(isinstance(c, (int, np.integer)) for c in self.currents)


def as_loadset(loads) -> LoadSet:
    return loads if isinstance(loads, LoadSet) else LoadSet(tuple(loads))


def ideal_current(loads) -> float:
    """Return one third of the total load current."""
    return sum(as_loadset(loads)) / 3


class VerdictKind(enum.Enum):
    VALID = "valid"
    BAD_LABEL = "bad-label"
    LENGTH_MISMATCH = "length-mismatch"
    UNEQUAL_COUNTS = "unequal-counts"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    counts: tuple[int, int, int] = (0, 0, 0)
    detail: str = ""

    def __bool__(self):
        return self.kind is VerdictKind.VALID


def phase_counts(assignment: Sequence[int]) -> tuple[int, int, int]:
    return tuple(sum(1 for lab in assignment if lab == p) for p in PHASES)


def validate_assignment(assignment: Sequence[int], n_loads: int) -> Verdict:
    """Check labels, length and the equal-count rule; never raises.

    The verdict is truthy only for a balanced-valid assignment.
    """
    labels = tuple(assignment)
    bad = [i for i, lab in enumerate(labels) if isinstance(lab, bool) or lab not in PHASES]
    if bad:
        return Verdict(VerdictKind.BAD_LABEL, detail=f"label {labels[bad[0]]!r} at position {bad[0] + 1}")
    counts = phase_counts(labels)
    if len(labels) != n_loads:
        return Verdict(VerdictKind.LENGTH_MISMATCH, counts, f"{len(labels)} labels for {n_loads} loads")
    if n_loads % 3 or len(set(counts)) != 1:
        return Verdict(VerdictKind.UNEQUAL_COUNTS, counts, f"per-phase counts {counts}")
    return Verdict(VerdictKind.VALID, counts)


def _check_labels(assignment: Sequence[int]) -> Assignment:
    labels = tuple(int(lab) for lab in assignment)
    for i, lab in enumerate(labels):
        if lab not in PHASES:
            raise ValueError(f"phase label at position {i + 1} must be 1, 2 or 3, got {lab}")
    return labels


def phase_sums(loads, assignment: Sequence[int]) -> tuple[Number, Number, Number]:
    loads = as_loadset(loads)
    labels = _check_labels(assignment)
    if len(labels) != len(loads):
        raise DimensionError(f"{len(labels)} labels for {len(loads)} loads")
    sums = [0, 0, 0]
    for c, lab in zip(loads, labels):
        sums[lab - 1] += c
    return tuple(sums)


def pairwise_diffs(sums: Sequence[Number]) -> tuple[Number, Number, Number]:
    """Return ``(|s1-s2|, |s2-s3|, |s3-s1|)``."""
    s1, s2, s3 = sums
    return abs(s1 - s2), abs(s2 - s3), abs(s3 - s1)


def assignment_to_switch_matrix(assignment: Sequence[int]) -> np.ndarray:
    labels = _check_labels(assignment)
    sw = np.zeros((len(labels), 3), dtype=np.int8)
    sw[np.arange(len(labels)), np.asarray(labels, dtype=int) - 1] = 1
    return sw


def switch_matrix_to_assignment(sw) -> Assignment:
    sw = np.asarray(sw)
    if sw.ndim != 2 or sw.shape[1] != 3:
        raise ValueError(f"switch matrix must be N x 3, got shape {sw.shape}")
    if not np.isin(sw, (0, 1)).all():
        raise ValueError("switch states must be 0 or 1")
    rows = sw.sum(axis=1)
    if (rows != 1).any():
        r = int(np.flatnonzero(rows != 1)[0])
        raise ValueError(f"row {r + 1} closes {int(rows[r])} switches, exactly one required")
    return tuple(int(c) + 1 for c in sw.argmax(axis=1))


@dataclass(frozen=True)
class Branch:
    resistance: float
    active_power: float
    reactive_power: float
    voltage_magnitude: float

    def __post_init__(self):
        if self.resistance < 0:
            raise ValueError(f"resistance must be >= 0, got {self.resistance}")
        if self.voltage_magnitude < 0:
            raise ValueError(f"voltage magnitude must be >= 0, got {self.voltage_magnitude}")


def total_power_loss(branches: Sequence[Branch]) -> float:
    """Sum of ``r * (P**2 + Q**2) / |V|**2`` over all branches, in watts."""
    total = 0.0
    for i, b in enumerate(branches):
        if b.voltage_magnitude == 0:
            raise ZeroDivisionError(f"branch {i + 1}: zero voltage magnitude")
        total += b.resistance * (b.active_power**2 + b.reactive_power**2) / b.voltage_magnitude**2
    return total


@dataclass(frozen=True)
class ConnectionPoint:
    """Up to three local loads and their switch rows (one row per load)."""

    currents: tuple[Number, ...]
    switches: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "currents", tuple(self.currents))
        object.__setattr__(self, "switches", tuple(tuple(int(s) for s in row) for row in self.switches))
        if len(self.currents) > 3:
            raise ValueError("a connection point holds at most 3 loads")
        if len(self.switches) != len(self.currents):
            raise ValueError("need one switch row per local load")
        for row in self.switches:
            if len(row) != 3 or any(s not in (0, 1) for s in row) or sum(row) != 1:
                raise ValueError(f"switch row {row} must close exactly one of three switches")
        for c in self.currents:
            if not math.isfinite(c) or c < 0:
                raise ValueError(f"load current must be finite and >= 0, got {c}")

    @property
    def labels(self) -> Assignment:
        return tuple(row.index(1) + 1 for row in self.switches)


@dataclass(frozen=True)
class FeederChain:
    """Radial chain of connection points; ``points[0]`` is nearest the transformer."""

    points: tuple[ConnectionPoint, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))

    @classmethod
    def from_assignment(cls, loads, assignment, per_point: int = 3) -> "FeederChain":
        """Lay loads out along the chain, ``per_point`` to a connection point."""
        if not 1 <= per_point <= 3:
            raise ValueError("per_point must be 1, 2 or 3")
        currents = tuple(loads)
        rows = [tuple(r) for r in assignment_to_switch_matrix(assignment).tolist()]
        if len(rows) != len(currents):
            raise DimensionError(f"{len(rows)} labels for {len(currents)} loads")
        return cls(tuple(
            ConnectionPoint(currents[k:k + per_point], rows[k:k + per_point])
            for k in range(0, len(currents), per_point)
        ))

    def flatten(self) -> tuple[tuple[Number, ...], Assignment]:
        currents, labels = [], []
        for pt in self.points:
            currents.extend(pt.currents)
            labels.extend(pt.labels)
        return tuple(currents), tuple(labels)


def feeder_phase_currents(chain: FeederChain) -> list[tuple[Number, Number, Number]]:
    """Per-phase current just after each connection point.

    Accumulates from the far end of the chain towards the head, so entry 0 is
    the current drawn at the transformer.
    """
    out = []
    downstream = (0, 0, 0)
    for pt in reversed(chain.points):
        local = [0, 0, 0]
        for c, row in zip(pt.currents, pt.switches):
            for p in range(3):
                local[p] += row[p] * c
        downstream = tuple(local[p] + downstream[p] for p in range(3))
        out.append(downstream)
    out.reverse()
    return out


class BalanceReport(NamedTuple):
    phase_sums: tuple[Number, Number, Number]
    pairwise_diffs: tuple[Number, Number, Number]
    max_diff: Number
    total_abs_deviation: float


def balance_report(loads, assignment: Sequence[int]) -> BalanceReport:
    loads = as_loadset(loads)
    sums = phase_sums(loads, assignment)
    diffs = pairwise_diffs(sums)
    total = sum(loads)
    # |3S - T| / 3 is exact for integer currents, unlike |S - T/3|
    dev = sum(abs(3 * s - total) for s in sums) / 3
    return BalanceReport(sums, diffs, max(diffs), dev)
