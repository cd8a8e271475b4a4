"""Gittins indices of finite-state bandits by fast pivoting, with reference
algorithms, brute-force oracles and an optimal-stopping solver."""

from .baselines import cp_compute, se_compute, vwb_compute
from .errors import (
    BadDiscount,
    DegeneratePivot,
    DimensionMismatch,
    FastPivotError,
    InstanceTooLarge,
    NegativeProbability,
    NonStochasticRow,
    ParseError,
    SingularMatrix,
    ValidationError,
)
from .fp import ReducedTableau, fp_compute, fp_pivot_step
from .linsolve import PolicyMeasures, evaluate_policy, solve_dense
from .model import (
    BanditInstance,
    ExtendedRecord,
    IndexResult,
    OpCounter,
    StoppingInstance,
    load_instance,
    random_instance,
    random_stopping_instance,
    save_instance,
    validate_instance,
)
from .stopping import (
    StoppingSolution,
    evaluate_stopping_rule,
    reduce_terminal_rewards,
    solve_optimal_stopping,
    value_iteration,
)

__version__ = "0.1.0"
