"""Optimal allocation without overlapped sensing (common ratio fixed to 0).

With no cooperative phase the problem reduces to choosing non-decreasing
individual ratios summing to one.  The optimality conditions couple
adjacent UAVs: either the causality constraint between them is tight (the
next UAV's sensing ends exactly when the channel frees up) or their
marginal completion-time derivatives are equal.  The chain is built UAV by
UAV from a trial first ratio; an outer bisection then drives the total
ratio mass to one, which works because every chained ratio grows with the
first one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analysis import hat_omega, marginal_time, tau_from_energy
from .errors import BracketError, InfeasibleAllocationError
from .inner import solve_inner
from .model import (
    ProblemInstance,
    SolveReport,
    TaskAllocation,
    evaluate_timeline,
)

_RATIO_TOL = 1e-9
_MARGINAL_TOL = 1e-12


@dataclass(frozen=True)
class ChainLink:
    """One UAV's state while the allocation chain is being built."""

    uav: int
    omega: float
    t_max: float        # instant its transmission may start (channel free)
    tx_time: float      # duration of its individual transmission
    branch: str         # max-power | energy-binding | causality-binding


@dataclass
class ChainState:
    """Chain prefix: links for UAVs 1..m plus the running timeline."""

    links: list[ChainLink]

    @property
    def last(self) -> ChainLink:
        return self.links[-1]

    @property
    def total_ratio(self) -> float:
        return sum(link.omega for link in self.links)


def _tx_time(omega: float, m: int, inst: ProblemInstance) -> float:
    if omega <= 0.0:
        return 0.0
    tau = tau_from_energy(omega, inst.gamma[m - 1], inst.energy_budget, inst)
    return omega * inst.data_volume * tau


def _branch_tag(omega: float, m: int, inst: ProblemInstance) -> str:
    w_hat = hat_omega(inst.gamma[m - 1], inst, inst.energy_budget)
    return "max-power" if omega < w_hat else "energy-binding"


def _marginal(omega: float, m: int, inst: ProblemInstance) -> float:
    """Completion-time derivative in UAV m's ratio along the binding chain.

    UAV 1's ratio also stretches its own sensing, so its marginal carries
    an extra workload term.
    """
    base = marginal_time(omega, inst.gamma[m - 1], inst.energy_budget, inst)
    return base + inst.workload if m == 1 else base


def start_chain(omega_1: float, inst: ProblemInstance) -> ChainState:
    if omega_1 <= 0.0:
        raise ValueError("first ratio must be positive")
    tx = _tx_time(omega_1, 1, inst)
    link = ChainLink(
        uav=1,
        omega=omega_1,
        t_max=omega_1 * inst.workload,
        tx_time=tx,
        branch=_branch_tag(omega_1, 1, inst),
    )
    return ChainState(links=[link])


def next_ratio(m: int, state: ChainState, inst: ProblemInstance) -> float:
    """Ratio of UAV m+1 implied by UAV m's ratio at the joint optimum.

    Either the causality constraint binds (UAV m+1's sensing ends exactly
    when the channel frees up) and its ratio is (T_free)/workload, or the
    marginal derivatives equalize at a smaller ratio.  The marginal curve
    jumps upward at the max-power threshold, so "equalize" means the
    largest ratio whose marginal does not exceed UAV m's.
    """
    if inst.workload <= 0.0:
        raise ValueError("chain requires positive sensing workload")
    link = state.last
    if link.uav != m:
        raise ValueError(f"chain tip is UAV {link.uav}, expected {m}")
    channel_free = link.t_max + link.tx_time
    # Causality-binding candidate: sensing of m+1 ends at channel_free.
    omega_causal = channel_free / inst.workload
    marg_here = _marginal(link.omega, m, inst)

    def marg_next(omega: float) -> float:
        return _marginal(omega, m + 1, inst)

    # Keep every candidate below UAV m+1's Shannon limit so transmission
    # times stay computable; the outer bisection only needs the sign of
    # (sum - 1), which clamping cannot flip for any workable instance.
    gain_next_limit = inst.bandwidth * inst.gamma[m] * inst.energy_budget / (
        inst.data_volume * math.log(2.0)
    )
    omega_causal = min(omega_causal, gain_next_limit * (1.0 - 1e-12))
    cap = min(omega_causal, 1.0)
    if cap <= 0.0:
        return 0.0
    try:
        if marg_next(cap) <= marg_here + _MARGINAL_TOL:
            return omega_causal
    except InfeasibleAllocationError:
        pass  # cap beyond the Shannon limit: the equality root is below it

    # Prop.-style shortcut: adjacent interior energy-binding ratios keep
    # omega/gamma constant; valid when causality stays slack there.
    gain_m, gain_next = inst.gamma[m - 1], inst.gamma[m]
    shortcut = link.omega * gain_next / gain_m
    if (
        m >= 2
        and link.branch == "energy-binding"
        and shortcut < cap
        and shortcut > hat_omega(gain_next, inst, inst.energy_budget)
    ):
        return shortcut

    # Largest ratio with marginal <= marg_here, found by bisection; the
    # marginal is non-decreasing with one upward jump, so the sup is
    # well defined even when exact equality is unattainable.
    limit = inst.bandwidth * gain_next * inst.energy_budget / (
        inst.data_volume * math.log(2.0)
    )
    lo, hi = 0.0, min(cap, limit * (1.0 - 1e-12))
    if hi <= 0.0:
        return 0.0
    if marg_next(hi) <= marg_here + _MARGINAL_TOL:
        return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if marg_next(mid) <= marg_here + _MARGINAL_TOL:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 + 1e-12 * hi:
            break
    return lo


def extend_chain(state: ChainState, inst: ProblemInstance) -> ChainState:
    m = state.last.uav
    omega_next = next_ratio(m, state, inst)
    link = state.last
    channel_free = link.t_max + link.tx_time
    sense_end = omega_next * inst.workload
    t_max = max(channel_free, sense_end)
    if omega_next <= 0.0:
        branch = "max-power"
        tx = 0.0
    else:
        tx = _tx_time(omega_next, m + 1, inst)
        branch = (
            "causality-binding"
            if sense_end >= channel_free * (1.0 - 1e-12)
            else _branch_tag(omega_next, m + 1, inst)
        )
    state.links.append(
        ChainLink(uav=m + 1, omega=omega_next, t_max=t_max, tx_time=tx, branch=branch)
    )
    return state


def sum_ratio_curve(omega_1: float, inst: ProblemInstance) -> float:
    """Total ratio mass implied by the chain from a trial first ratio."""
    if omega_1 <= 0.0:
        return 0.0
    state = start_chain(omega_1, inst)
    for _ in range(inst.num_uavs - 1):
        state = extend_chain(state, inst)
    return state.total_ratio


def solve_degenerate(inst: ProblemInstance) -> SolveReport:
    """Optimal allocation and plan with the common ratio pinned to zero.

    Bisects the first UAV's ratio until the chained ratios sum to one;
    the sum grows with the first ratio, so the root is unique.  The final
    plan comes from the convex inner solver on the resulting allocation.
    """
    m_count = inst.num_uavs
    if m_count == 1:
        return _report(inst, (0.0, 1.0))
    if inst.workload <= 0.0:
        # No sensing time: causality cannot bind; marginal equalization
        # alone fixes the split, which the inner chain handles with a
        # tiny synthetic workload only through this guard.
        raise ValueError(
            "zero sensing workload: use the outer-approximation solver"
        )

    limit_1 = inst.bandwidth * inst.gamma[0] * inst.energy_budget / (
        inst.data_volume * math.log(2.0)
    )
    hi_max = min(1.0, limit_1 * (1.0 - 1e-9))
    hi = min(1.0 / m_count, hi_max)
    while sum_ratio_curve(hi, inst) < 1.0:
        if hi >= hi_max:
            raise BracketError(
                f"chained ratios sum below 1 even at omega_1={hi} "
                f"(sum={sum_ratio_curve(hi, inst)})"
            )
        hi = min(hi * 1.5, hi_max)
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= 0.0 or mid >= limit_1:
            break
        if sum_ratio_curve(mid, inst) < 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= _RATIO_TOL * max(1.0, hi):
            break
    omega_1 = 0.5 * (lo + hi)
    state = start_chain(omega_1, inst)
    for _ in range(m_count - 1):
        state = extend_chain(state, inst)
    ratios = [link.omega for link in state.links]
    # Snap the residual rounding error into the last (largest) ratio.
    ratios[-1] += 1.0 - sum(ratios)
    ratios = [max(0.0, r) for r in ratios]
    return _report(inst, (0.0, *ratios))


def _report(inst: ProblemInstance, omega: tuple[float, ...]) -> SolveReport:
    alloc = TaskAllocation(omega)
    sol = solve_inner(inst, alloc)
    return SolveReport(
        allocation=alloc,
        plan=sol.plan,
        timeline=evaluate_timeline(inst, alloc, sol.plan),
        scheme_name="opt_wc",
        iterations=sol.iterations,
        bound_gap=0.0,
    )
