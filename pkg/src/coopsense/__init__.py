"""Mission completion time optimization for cooperative UAV sensing fleets."""

from .analysis import necessity_check
from .baselines import full_c, opt_wc, uta_c, uta_wc
from .degenerate import solve_degenerate
from .errors import (
    BracketError,
    ConvergenceError,
    CoopSenseError,
    InfeasibleAllocationError,
)
from .harness import PRESETS, SweepSpec, brute_force_oracle, run_sweep, solve_auto
from .inner import solve_inner
from .model import (
    ProblemInstance,
    SolveReport,
    TaskAllocation,
    TransmissionPlan,
    evaluate_timeline,
    validate_solution,
)
from .polyblock import solve_polyblock

__all__ = [
    "BracketError",
    "ConvergenceError",
    "CoopSenseError",
    "InfeasibleAllocationError",
    "PRESETS",
    "ProblemInstance",
    "SolveReport",
    "SweepSpec",
    "TaskAllocation",
    "TransmissionPlan",
    "brute_force_oracle",
    "evaluate_timeline",
    "full_c",
    "necessity_check",
    "opt_wc",
    "run_sweep",
    "solve_auto",
    "solve_degenerate",
    "solve_inner",
    "solve_polyblock",
    "uta_c",
    "uta_wc",
    "validate_solution",
]

__version__ = "1.0.0"
