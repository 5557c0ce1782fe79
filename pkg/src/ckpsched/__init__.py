"""Checkpoint scheduling for discrete adjoints of multistage time steppers."""

from .core import (
    Action,
    Advance,
    CheckpointRecord,
    CheckpointType,
    DomainError,
    InfeasibleScheduleError,
    Restore,
    ReverseStep,
    Schedule,
    SchedulingError,
    SchemeInfo,
    Store,
    make_record,
    unit_cost,
)
from .revolve import (
    RevolveState,
    RevolveTables,
    repetition_number,
    revolve_cost,
    revolve_dp_cost,
    revolve_next_action,
    revolve_schedule,
    revolve_state,
)
from .mrevolve import (
    Strategy,
    StrategyChoice,
    crossover_steps,
    modified_cost,
    modified_schedule,
    select_strategy,
)
from .cams import (
    CamsTables,
    CamsVariant,
    InvalidQueryError,
    build_gen_tables,
    build_sa_tables,
    build_tables,
    cams_query,
    cams_schedule,
    gen_total_cost,
    sa_total_cost,
    total_cost,
)
from .oracle import BruteForceSearch, InstanceTooLargeError, brute_force
from .executor import (
    CountingEngine,
    ExecutionMetrics,
    StepEngine,
    ValidationError,
    execute,
)
from .consultant import (
    Policy,
    consultant_run,
    consultant_schedule,
    drive_cams,
    full_storage_schedule,
    predicted_cost,
)
from .adjoint import (
    EULER_SA2,
    MIDPOINT,
    PROBLEMS,
    RK4,
    TABLEAUS,
    AdjointEngine,
    ButcherTableau,
    OdeProblem,
    StageSet,
    erk_adjoint_step,
    erk_step,
    finite_difference_gradient,
    gradient_via_policy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
