"""Simulated-instance experiments and recomputation of the published tables."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Sequence, Union

import numpy as np

from . import grnn
from .balancing import SOLVERS, exact_balance, greedy_balance
from .grnn import Outcome
from .model import LoadSet, balance_report, validate_assignment

# Published six-load examples: columns are the three data sets.
TABLE1_LOADS = {
    1: (89, 85, 74, 38, 56, 45),
    2: (35, 0, 90, 21, 87, 112),
    3: (45, 67, 87, 64, 30, 90),
}
TABLE2_LABELS = {
    (1, "NN"): (1, 2, 3, 1, 3, 2),
    (1, "HEU"): (1, 2, 3, 1, 3, 2),
    (2, "NN"): (1, 2, 1, 3, 3, 2),
    (2, "HEU"): (1, 3, 2, 1, 2, 3),
    (3, "NN"): (1, 2, 3, 2, 3, 1),
    (3, "HEU"): (1, 2, 1, 2, 3, 3),
}
TABLE3_SUMS = {
    (1, "NN"): (127, 130, 130),
    (1, "HEU"): (127, 130, 130),
    (2, "NN"): (125, 112, 108),
    (2, "HEU"): (56, 177, 112),
    (3, "NN"): (135, 131, 117),
    (3, "HEU"): (132, 131, 120),
}
TABLE4_DIFFS = {
    (1, "NN"): (3, 0, 3),
    (1, "HEU"): (3, 0, 3),
    (2, "NN"): (13, 4, 17),
    (2, "HEU"): (121, 65, 56),
    (3, "NN"): (4, 14, 18),
    (3, "HEU"): (1, 11, 12),
}


SPREAD_NAMES = ("default", "mean-distance", "interp")


class TableMismatch(AssertionError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    n_loads: int = 6
    train_count: int = 400
    test_count: int = 100
    current_min: int = 0
    current_max: int = 120
    seed: int = 42
    spread: Union[float, str] = "default"
    label_source: str = "greedy"
    repair: bool = False
    augment: bool = True

    def __post_init__(self):
        if self.n_loads < 3 or self.n_loads % 3:
            raise ValueError(f"n_loads must be a positive multiple of 3, got {self.n_loads}")
        if self.train_count < 1 or self.test_count < 1:
            raise ValueError("train_count and test_count must be >= 1")
        if not 0 <= self.current_min < self.current_max:
            raise ValueError("need 0 <= current_min < current_max")
        if self.label_source not in SOLVERS:
            raise ValueError(f"label_source must be one of {sorted(SOLVERS)}")
        if self.spread not in SPREAD_NAMES and not float(self.spread) > 0:
            raise ValueError(f"spread must be one of {SPREAD_NAMES} or a positive number")
        if self.augment and self.n_loads > grnn.MAX_AUGMENT_LOADS:
            raise ValueError(
                f"augmentation needs n_loads <= {grnn.MAX_AUGMENT_LOADS}; disable it for {self.n_loads} loads"
            )


def generate_instances(config: ExperimentConfig, count: int | None = None, start: int = 0) -> list[LoadSet]:
    """Integer loads drawn uniformly from ``[current_min, current_max]``.

    Instance ``i`` is seeded from ``(seed, i)`` alone, so any slice of the
    stream can be regenerated independently.
    """
    count = config.train_count + config.test_count if count is None else count
    out = []
    for i in range(start, start + count):
        rng = np.random.default_rng([config.seed, i])
        draw = rng.integers(config.current_min, config.current_max, size=config.n_loads, endpoint=True)
        out.append(LoadSet(tuple(int(v) for v in draw)))
    return out


@dataclass
class InstanceRecord:
    loads: tuple
    heuristic: tuple
    nn_raw: tuple
    nn: tuple
    nn_valid: bool
    heuristic_max_diff: float
    nn_max_diff: float
    exact_max_diff: float
    outcome: str


@dataclass
class ExperimentSummary:
    counts: dict
    percentages: dict
    mean_max_diff: dict
    spread: float
    records: list = field(default_factory=list)
    seconds: float = 0.0

    def to_dict(self, with_timing: bool = False) -> dict:
        d = asdict(self)
        if not with_timing:
            d.pop("seconds")
        return d


def label_instances(instances: Sequence[LoadSet], label_source: str = "greedy") -> list[tuple]:
    solve = SOLVERS[label_source]
    return [(loads, solve(loads)) for loads in instances]


def evaluate_model(model: grnn.GrnnModel, instances: Sequence[LoadSet], repair: bool = False) -> list[InstanceRecord]:
    records = []
    for loads in instances:
        heu = greedy_balance(loads)
        raw = grnn.predict_assignment(model, loads)
        nn = grnn.repair_assignment(raw, loads) if repair else raw
        valid = bool(validate_assignment(nn, len(loads)))
        heu_rep = balance_report(loads, heu)
        nn_rep = balance_report(loads, nn)
        exact_rep = balance_report(loads, exact_balance(loads))
        records.append(InstanceRecord(
            loads=tuple(loads),
            heuristic=heu,
            nn_raw=raw,
            nn=nn,
            nn_valid=valid,
            heuristic_max_diff=heu_rep.max_diff,
            nn_max_diff=nn_rep.max_diff,
            exact_max_diff=exact_rep.max_diff,
            outcome=grnn.classify_outcome(nn_rep, heu_rep, valid).value,
        ))
    return records


def summarize_categories(outcomes: Sequence[str]) -> dict:
    """Counts and percentages (2 decimals) for the four outcome categories.

    Percentages use largest-remainder rounding in hundredths, so they always
    total exactly 100.
    """
    tally = Counter(str(getattr(o, "value", o)) for o in outcomes)
    n = len(outcomes)
    counts = {o.value: tally.get(o.value, 0) for o in Outcome}
    if not n:
        return {"counts": counts, "percentages": {k: 0.0 for k in counts}}
    hundredths = {k: divmod(10000 * v, n) for k, v in counts.items()}
    short = 10000 - sum(q for q, _ in hundredths.values())
    order = sorted(counts, key=lambda k: -hundredths[k][1])
    bumped = set(order[:short])
    pct = {k: (q + (k in bumped)) / 100 for k, (q, _) in hundredths.items()}
    return {"counts": counts, "percentages": pct}


def summarize(records: Sequence[InstanceRecord], spread: float, seconds: float = 0.0) -> ExperimentSummary:
    cats = summarize_categories([r.outcome for r in records])
    counts, pct = cats["counts"], cats["percentages"]

    def mean(key, only_valid=False):
        vals = [getattr(r, key) for r in records if r.nn_valid or not only_valid]
        return float(np.mean(vals)) if vals else None

    means = {
        "heuristic": mean("heuristic_max_diff"),
        "exact": mean("exact_max_diff"),
        "nn_valid_only": mean("nn_max_diff", only_valid=True),
    }
    return ExperimentSummary(counts, pct, means, spread, list(records), seconds)


def run_experiment(config: ExperimentConfig) -> ExperimentSummary:
    t0 = time.perf_counter()
    train_set = generate_instances(config, config.train_count, start=0)
    test_set = generate_instances(config, config.test_count, start=config.train_count)
    model = grnn.train(label_instances(train_set, config.label_source), config.spread, augment=config.augment)
    records = evaluate_model(model, test_set, repair=config.repair)
    return summarize(records, model.spread, time.perf_counter() - t0)


def golden_view(config: ExperimentConfig, summary: ExperimentSummary) -> dict:
    """The parts of a run pinned by the regression golden file."""
    return {
        "config": asdict(config),
        "spread": summary.spread,
        "counts": summary.counts,
        "percentages": summary.percentages,
        "mean_max_diff": summary.mean_max_diff,
        "outcomes": [r.outcome for r in summary.records],
    }


def reproduce_tables() -> dict:
    """Recompute phase currents and differences from the published loads and labels.

    Raises :class:`TableMismatch` on any disagreement. Also reports what the
    greedy and exact solvers produce for each data set.
    """
    report = {"tables": [], "solvers": []}
    for data, loads in TABLE1_LOADS.items():
        for method in ("NN", "HEU"):
            labels = TABLE2_LABELS[data, method]
            rep = balance_report(loads, labels)
            if rep.phase_sums != TABLE3_SUMS[data, method]:
                raise TableMismatch(
                    f"data {data} {method}: phase currents {rep.phase_sums} != {TABLE3_SUMS[data, method]}"
                )
            if rep.pairwise_diffs != TABLE4_DIFFS[data, method]:
                raise TableMismatch(
                    f"data {data} {method}: differences {rep.pairwise_diffs} != {TABLE4_DIFFS[data, method]}"
                )
            report["tables"].append({
                "data": data, "method": method, "labels": list(labels),
                "phase_sums": list(rep.phase_sums), "pairwise_diffs": list(rep.pairwise_diffs),
            })
        published = sorted(TABLE3_SUMS[data, "HEU"])
        for name, solve in SOLVERS.items():
            labels = solve(loads)
            rep = balance_report(loads, labels)
            report["solvers"].append({
                "data": data, "solver": name, "labels": list(labels),
                "phase_sums": list(rep.phase_sums), "max_diff": rep.max_diff,
                "matches_published_heuristic": sorted(rep.phase_sums) == published,
            })
    return report
