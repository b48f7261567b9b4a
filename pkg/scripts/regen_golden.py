"""Rewrite tests/golden/experiment_seed42.json from a fresh run.

Only run this after a deliberate change to instance generation, labelling
or the GRNN; the regression test exists to catch silent drift.
"""

import json
from pathlib import Path

from phasebal.harness import ExperimentConfig, golden_view, run_experiment

OUT = Path(__file__).resolve().parents[1] / "tests" / "golden" / "experiment_seed42.json"

if __name__ == "__main__":
    config = ExperimentConfig(train_count=400, test_count=100, seed=42, n_loads=6)
    summary = run_experiment(config)
    OUT.write_text(json.dumps(golden_view(config, summary), indent=1) + "\n")
    print(f"wrote {OUT}: {summary.counts}")
