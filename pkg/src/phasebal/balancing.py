"""Phase assignment solvers: exhaustive enumeration and greedy group selection.

Both solvers place exactly N/3 loads on each phase. Assignments are ranked
by ``(max pairwise phase difference, total deviation from the ideal current)``
and ties are broken by the lexicographically smallest label sequence.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .model import Assignment, as_loadset, balance_report, validate_assignment

MAX_EXACT_LOADS = 15


class CapacityError(ValueError):
    """Raised when exhaustive enumeration is asked for too many loads."""


class BalanceObjective(NamedTuple):
    """Lexicographic score: tuple comparison orders ``max_diff`` first."""

    max_diff: float
    total_abs_deviation: float


def objective_value(loads, assignment) -> BalanceObjective:
    loads = as_loadset(loads)
    verdict = validate_assignment(assignment, len(loads))
    if not verdict:
        raise ValueError(f"assignment is not balanced-valid: {verdict.kind.value} ({verdict.detail})")
    rep = balance_report(loads, assignment)
    return BalanceObjective(rep.max_diff, rep.total_abs_deviation)


@lru_cache(maxsize=None)
def balanced_assignments(n: int) -> np.ndarray:
    """All label rows with n/3 of each phase, in lexicographic order.

    Returned array is read-only, shape ``(n! / ((n/3)!)**3, n)``.
    """
    if n < 3 or n % 3:
        raise ValueError(f"n must be a positive multiple of 3, got {n}")
    k = n // 3
    rows = np.zeros((1, 0), dtype=np.int8)
    counts = np.zeros((1, 3), dtype=np.int16)
    for _ in range(n):
        new_rows, new_counts = [], []
        for p in range(3):
            ok = counts[:, p] < k
            r = np.concatenate([rows[ok], np.full((int(ok.sum()), 1), p + 1, dtype=np.int8)], axis=1)
            c = counts[ok].copy()
            c[:, p] += 1
            new_rows.append(r)
            new_counts.append(c)
        rows = np.concatenate(new_rows)
        counts = np.concatenate(new_counts)
    order = np.lexsort(rows.T[::-1])
    rows = rows[order]
    rows.flags.writeable = False
    return rows


def _score_rows(currents: np.ndarray, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Objective arrays for many assignments at once.

    The deviation is returned scaled by 3 (``sum |3 S_p - T|``) so integer
    inputs compare exactly.
    """
    sums = np.stack([(rows == p) @ currents for p in (1, 2, 3)], axis=1)
    diffs = np.abs(sums - np.roll(sums, -1, axis=1))
    total = currents.sum()
    return diffs.max(axis=1), np.abs(3 * sums - total).sum(axis=1)


def best_row(currents: np.ndarray, rows: np.ndarray) -> int:
    """Index of the minimum-objective row; earliest row wins ties."""
    max_diff, dev3 = _score_rows(currents, rows)
    cand = np.flatnonzero(max_diff == max_diff.min())
    return int(cand[np.argmin(dev3[cand])])


def exact_balance(loads) -> Assignment:
    loads = as_loadset(loads)
    n = len(loads)
    if n > MAX_EXACT_LOADS:
        raise CapacityError(f"exhaustive search limited to {MAX_EXACT_LOADS} loads, got {n}")
    dtype = np.int64 if loads.is_integral else float
    currents = np.asarray(loads.currents, dtype=dtype)
    rows = balanced_assignments(n)
    return tuple(int(v) for v in rows[best_row(currents, rows)])


def greedy_balance(loads) -> Assignment:
    """Pick the group closest to the ideal current, give it the next label, repeat.

    The ideal current is computed once from all loads. Candidate groups are
    scanned in lexicographic index order and only a strictly better one
    replaces the incumbent, so ties go to the smallest index set.
    """
    loads = as_loadset(loads)
    n, k = len(loads), loads.group_size
    total = sum(loads)
    labels = [0] * n
    remaining = list(range(n))
    for phase in (1, 2):
        best, best_gap = None, None
        for group in combinations(remaining, k):
            gap = abs(3 * sum(loads[i] for i in group) - total)
            if best_gap is None or gap < best_gap:
                best, best_gap = group, gap
        for i in best:
            labels[i] = phase
        chosen = set(best)
        remaining = [i for i in remaining if i not in chosen]
    for i in remaining:
        labels[i] = 3
    return tuple(labels)


SOLVERS = {"exact": exact_balance, "greedy": greedy_balance}
