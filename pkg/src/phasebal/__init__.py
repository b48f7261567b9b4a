"""Three-phase feeder load balancing: exact and greedy solvers, a GRNN predictor,
and the feeder current and loss model."""

from .balancing import BalanceObjective, CapacityError, exact_balance, greedy_balance, objective_value
from .grnn import (
    GrnnModel,
    Outcome,
    classify_outcome,
    predict_assignment,
    predict_raw,
    repair_assignment,
    train,
)
from .harness import ExperimentConfig, generate_instances, reproduce_tables, run_experiment
from .model import (
    Branch,
    BalanceReport,
    ConnectionPoint,
    DimensionError,
    FeederChain,
    LoadSet,
    Verdict,
    VerdictKind,
    assignment_to_switch_matrix,
    balance_report,
    feeder_phase_currents,
    ideal_current,
    pairwise_diffs,
    phase_sums,
    switch_matrix_to_assignment,
    total_power_loss,
    validate_assignment,
)

__version__ = "0.1.0"
