"""Comparison schemes: fixed or restricted allocations with optimal power.

Every baseline fixes the task split by a simple rule and then runs the
same convex inner solver as the proposed method, so differences in
completion time come from the allocation alone.
"""

from __future__ import annotations

from .degenerate import solve_degenerate
from .inner import solve_inner
from .model import ProblemInstance, SolveReport, TaskAllocation, evaluate_timeline


def _fixed_allocation_report(
    inst: ProblemInstance, omega: tuple[float, ...], scheme: str
) -> SolveReport:
    alloc = TaskAllocation(omega)
    sol = solve_inner(inst, alloc)
    return SolveReport(
        allocation=alloc,
        plan=sol.plan,
        timeline=evaluate_timeline(inst, alloc, sol.plan),
        scheme_name=scheme,
        iterations=sol.iterations,
        bound_gap=0.0,
    )


def uta_wc(inst: ProblemInstance) -> SolveReport:
    """Uniform individual split, no overlapped sensing."""
    m = inst.num_uavs
    return _fixed_allocation_report(inst, (0.0,) + (1.0 / m,) * m, "uta_wc")


def uta_c(inst: ProblemInstance) -> SolveReport:
    """Uniform split including the common task."""
    m = inst.num_uavs
    return _fixed_allocation_report(inst, (1.0 / (m + 1),) * (m + 1), "uta_c")


def full_c(inst: ProblemInstance) -> SolveReport:
    """Everything overlapped: every UAV senses the whole mission."""
    m = inst.num_uavs
    return _fixed_allocation_report(inst, (1.0,) + (0.0,) * m, "full_c")


def opt_wc(inst: ProblemInstance) -> SolveReport:
    """Optimal allocation with overlapped sensing disabled."""
    return solve_degenerate(inst)


BASELINES = {
    "uta_wc": uta_wc,
    "uta_c": uta_c,
    "full_c": full_c,
    "opt_wc": opt_wc,
}
