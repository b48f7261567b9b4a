"""Generalized regression network mapping load vectors to switching sequences.

A GRNN stores its training pairs verbatim. Prediction is a Gaussian-kernel
weighted average of stored target vectors (Nadaraya-Watson form):

    y(x) = sum_i y_i w_i / sum_i w_i,   w_i = exp(-||x - x_i||**2 / (2 sigma**2))
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .balancing import BalanceObjective
from .model import (
    PHASES,
    Assignment,
    BalanceReport,
    as_loadset,
    balance_report,
    phase_counts,
    validate_assignment,
)


@dataclass(frozen=True, eq=False)
class GrnnModel:
    training_inputs: np.ndarray  # (M, N) amperes
    training_targets: np.ndarray  # (M, N) labels as floats
    spread: float

    def __post_init__(self):
        x = np.array(self.training_inputs, dtype=float)
        y = np.array(self.training_targets, dtype=float)
        if x.ndim != 2 or x.shape[0] < 1:
            raise ValueError("need at least one training vector")
        if y.shape != x.shape:
            raise ValueError(f"targets shape {y.shape} does not match inputs {x.shape}")
        if not np.isin(y, PHASES).all():
            raise ValueError("every target entry must be 1, 2 or 3")
        if not (math.isfinite(self.spread) and self.spread > 0):
            raise ValueError(f"spread must be positive and finite, got {self.spread}")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "training_inputs", x)
        object.__setattr__(self, "training_targets", y)
        object.__setattr__(self, "spread", float(self.spread))

    @property
    def n_loads(self) -> int:
        return self.training_inputs.shape[1]

    @property
    def n_samples(self) -> int:
        return self.training_inputs.shape[0]


# A toolbox-style radial basis with spread 1.0 reaches half height at 1 A;
# the equivalent Gaussian width is 1 / sqrt(2 ln 2).
DEFAULT_SPREAD = 1.0 / math.sqrt(2 * math.log(2))
MAX_AUGMENT_LOADS = 6


def mean_distance_spread(inputs) -> float:
    """Spread that puts the kernel at half height at the mean pairwise distance.

    Very wide for scattered data: predictions collapse toward the mean
    target. Falls back to :data:`DEFAULT_SPREAD` with fewer than two
    distinct inputs.
    """
    x = np.asarray(inputs, dtype=float)
    if len(x) < 2:
        return DEFAULT_SPREAD
    d = pdist(x).mean()
    if d <= 0:
        return DEFAULT_SPREAD
    return float(d / math.sqrt(2 * math.log(2)))


def min_pairwise_distance(inputs) -> float:
    x = np.asarray(inputs, dtype=float)
    if len(x) < 2:
        raise ValueError("need at least two inputs")
    d, _ = cKDTree(x).query(x, k=2)
    return float(d[:, 1].min())


def interpolation_spread(inputs, factor: float = 1e-3) -> float:
    """Spread small enough that each stored input recalls its own target."""
    return factor * min_pairwise_distance(inputs)


def resolve_spread(spread, inputs) -> float:
    """Accept a number or one of ``"default"``, ``"mean-distance"``, ``"interp"``."""
    if spread is None or spread == "default":
        return DEFAULT_SPREAD
    if spread == "mean-distance":
        return mean_distance_spread(inputs)
    if spread == "interp":
        return interpolation_spread(inputs) if len(inputs) > 1 else DEFAULT_SPREAD
    return float(spread)


def permutation_augment(inputs: np.ndarray, targets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Add every reordering of the loads, with labels carried along.

    Reordering the loads of a solved instance gives another solved instance
    of equal quality. A reordered input that repeats an earlier one (equal
    currents) is dropped so no input carries two targets.
    """
    m, n = inputs.shape
    if n > MAX_AUGMENT_LOADS:
        raise ValueError(f"permutation augmentation supports at most {MAX_AUGMENT_LOADS} loads, got {n}")
    perms = np.array(list(permutations(range(n))))
    x = inputs[:, perms].reshape(-1, n)
    y = targets[:, perms].reshape(-1, n)
    _, first = np.unique(x, axis=0, return_index=True)
    keep = np.sort(first)
    return x[keep], y[keep]


def train(instances: Sequence[tuple], spread=None, augment: bool = False) -> GrnnModel:
    """Store ``(loads, assignment)`` pairs.

    ``spread`` is a positive number or a name understood by
    :func:`resolve_spread`; it is resolved against the stored inputs.
    """
    instances = list(instances)
    if not instances:
        raise ValueError("cannot train on an empty instance set")
    n = len(instances[0][0])
    xs, ys = [], []
    for i, (loads, labels) in enumerate(instances):
        loads = as_loadset(loads)
        if len(loads) != n:
            raise ValueError(f"instance {i + 1} has {len(loads)} loads, expected {n}")
        verdict = validate_assignment(labels, n)
        if not verdict:
            raise ValueError(f"instance {i + 1}: training labels not balanced-valid ({verdict.detail})")
        xs.append(loads.as_array())
        ys.append(tuple(labels))
    x, y = np.array(xs), np.array(ys, dtype=float)
    if augment:
        x, y = permutation_augment(x, y)
    return GrnnModel(x, y, resolve_spread(spread, x))


def predict_raw(model: GrnnModel, loads) -> np.ndarray:
    x = np.asarray(tuple(loads), dtype=float)
    if x.shape != (model.n_loads,):
        raise ValueError(f"model expects {model.n_loads} loads, got {x.size}")
    d2 = ((model.training_inputs - x) ** 2).sum(axis=1)
    # shifting by the nearest distance rescales every weight by the same factor;
    # the nearest sample keeps weight 1 so the sum never underflows
    with np.errstate(under="ignore"):
        w = np.exp(-(d2 - d2.min()) / (2 * model.spread**2))
    return w @ model.training_targets / w.sum()


def decode(raw) -> Assignment:
    """Round half away from zero, then clamp into 1..3."""
    raw = np.asarray(raw, dtype=float)
    rounded = np.sign(raw) * np.floor(np.abs(raw) + 0.5)
    return tuple(int(v) for v in np.clip(rounded, 1, 3))


def predict_assignment(model: GrnnModel, loads) -> Assignment:
    """Decoded prediction; may violate the equal-count rule."""
    return decode(predict_raw(model, loads))


def repair_assignment(assignment: Sequence[int], loads) -> Assignment:
    """Nearest balanced-valid assignment by Hamming distance.

    Only loads on over-full phases are moved, and only into under-full
    phases, which is exactly the set of minimum-distance repairs. Among
    those the lowest objective wins, then the smallest label sequence.
    """
    loads = as_loadset(loads)
    labels = tuple(int(v) for v in assignment)
    n, k = len(loads), loads.group_size
    if len(labels) != n or any(v not in PHASES for v in labels):
        raise ValueError("repair needs one label in {1, 2, 3} per load")
    counts = phase_counts(labels)
    if all(c == k for c in counts):
        return labels

    surplus = [(p, counts[p - 1] - k) for p in PHASES if counts[p - 1] > k]
    slots = []
    for p in PHASES:
        slots.extend([p] * max(0, k - counts[p - 1]))

    def movers(i=0):
        if i == len(surplus):
            yield ()
            return
        p, extra = surplus[i]
        members = [j for j in range(n) if labels[j] == p]
        for chosen in combinations(members, extra):
            for rest in movers(i + 1):
                yield chosen + rest

    best, best_key = None, None
    dests = sorted(set(permutations(slots)))
    for moved in movers():
        for dest in dests:
            cand = list(labels)
            for j, p in zip(moved, dest):
                cand[j] = p
            cand = tuple(cand)
            rep = balance_report(loads, cand)
            key = (BalanceObjective(rep.max_diff, rep.total_abs_deviation), cand)
            if best_key is None or key < best_key:
                best, best_key = cand, key
    return best


class Outcome(str, enum.Enum):
    BETTER = "BETTER"
    SAME = "SAME"
    WORSE = "WORSE"
    FAIL = "FAIL"


SAME_TOL = 1e-9


def classify_outcome(nn_report: BalanceReport, heuristic_report: BalanceReport, nn_valid: bool) -> Outcome:
    if not nn_valid:
        return Outcome.FAIL
    delta = nn_report.max_diff - heuristic_report.max_diff
    if abs(delta) <= SAME_TOL:
        return Outcome.SAME
    return Outcome.BETTER if delta < 0 else Outcome.WORSE
