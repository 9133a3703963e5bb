"""Domain types and exact evaluation of the mission timeline and energy.

A mission consists of a common sensing task (ratio ``omega[0]``, performed
by every UAV and later delivered by coherent cooperative transmission) and
per-UAV individual tasks (``omega[1..M]``, delivered one UAV at a time over
a shared TDMA channel).  The total completion time is the end of the
cooperative transmission, which starts once the last individual
transmission finishes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

SUM_TOL = 1e-9

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named feasibility or optimality check."""

    name: str
    passed: bool
    residual: float
    detail: str = ""


@dataclass(frozen=True)
class ProblemInstance:
    """All physical parameters of one scenario.

    ``gamma`` holds the normalized channel power gains (|h|^2 / sigma^2,
    units 1/W) sorted in non-decreasing order; ``caller_order`` maps each
    internal index back to the position the caller supplied so results can
    be reported in the original order.
    """

    gamma: tuple[float, ...]
    data_volume: float       # C, bits for the entire mission
    workload: float          # beta_s, seconds for one UAV to sense everything
    bandwidth: float         # B, Hz
    p_max: float             # W
    energy_budget: float     # J per UAV
    caller_order: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if len(self.gamma) < 1:
            raise ValueError("need at least one UAV")
        if any(g <= 0.0 for g in self.gamma):
            raise ValueError("channel gains must be positive")
        if any(a > b for a, b in zip(self.gamma, self.gamma[1:])):
            raise ValueError("gamma must be sorted non-decreasing; use from_parameters")
        if self.data_volume <= 0.0:
            raise ValueError("data volume must be positive")
        if self.workload < 0.0:
            raise ValueError("workload must be non-negative")
        if self.bandwidth <= 0.0:
            raise ValueError("bandwidth must be positive")
        if self.p_max <= 0.0:
            raise ValueError("max transmit power must be positive")
        if self.energy_budget <= 0.0:
            raise ValueError("energy budget must be positive")
        if not self.caller_order:
            object.__setattr__(self, "caller_order", tuple(range(len(self.gamma))))

    @classmethod
    def from_parameters(
        cls,
        gamma: Sequence[float],
        data_volume: float,
        workload: float,
        bandwidth: float,
        p_max: float,
        energy_budget: float,
    ) -> "ProblemInstance":
        """Build an instance, sorting gains ascending and recording the permutation."""
        order = sorted(range(len(gamma)), key=lambda i: gamma[i])
        return cls(
            gamma=tuple(float(gamma[i]) for i in order),
            data_volume=float(data_volume),
            workload=float(workload),
            bandwidth=float(bandwidth),
            p_max=float(p_max),
            energy_budget=float(energy_budget),
            caller_order=tuple(order),
        )

    @property
    def num_uavs(self) -> int:
        return len(self.gamma)

    def per_bit_floor(self, m: int) -> float:
        """Fastest per-bit individual time for UAV m (1-based), at max power."""
        g = self.gamma[m - 1]
        return 1.0 / (self.bandwidth * math.log2(1.0 + self.p_max * g))

    def coop_per_bit_floor(self) -> float:
        """Fastest per-bit cooperative time, all UAVs at max power."""
        snr = self.p_max * sum(self.gamma)
        return 1.0 / (self.bandwidth * math.log2(1.0 + snr))

    def power_for_time(self, t: float, m: int) -> float:
        """Invert the per-bit rate relation: power needed for per-bit time t."""
        if t <= 0.0:
            raise ValueError("per-bit time must be positive")
        return (2.0 ** (1.0 / (self.bandwidth * t)) - 1.0) / self.gamma[m - 1]

    def shannon_floor(self, bits: float, gain: float) -> float:
        """Minimum energy to deliver ``bits`` over a channel with ``gain``."""
        return bits * _LN2 / (self.bandwidth * gain)

    def to_json_dict(self) -> dict:
        return {
            "gamma": list(self.gamma),
            "C_bits": self.data_volume,
            "beta_s_sec": self.workload,
            "bandwidth_hz": self.bandwidth,
            "p_max_w": self.p_max,
            "energy_budget_j": self.energy_budget,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ProblemInstance":
        return cls.from_parameters(
            gamma=doc["gamma"],
            data_volume=doc["C_bits"],
            workload=doc["beta_s_sec"],
            bandwidth=doc["bandwidth_hz"],
            p_max=doc["p_max_w"],
            energy_budget=doc["energy_budget_j"],
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "ProblemInstance":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class TaskAllocation:
    """Ratio vector (omega_0, omega_1, ..., omega_M); sums to one.

    ``omega[0]`` is the common task executed by every UAV; ``omega[m]`` is
    the individual task of UAV m.  Individual ratios are non-decreasing in
    the (gain-sorted) UAV index.
    """

    omega: tuple[float, ...]

    def __post_init__(self):
        if len(self.omega) < 2:
            raise ValueError("allocation needs a common ratio and at least one UAV")
        if any(w < -SUM_TOL or w > 1.0 + SUM_TOL for w in self.omega):
            raise ValueError(f"ratios must lie in [0, 1]: {self.omega}")
        total = sum(self.omega)
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"ratios must sum to 1 (got {total})")
        individual = self.omega[1:]
        if any(a > b + SUM_TOL for a, b in zip(individual, individual[1:])):
            raise ValueError(f"individual ratios must be non-decreasing: {individual}")

    @property
    def common(self) -> float:
        return self.omega[0]

    @property
    def individual(self) -> tuple[float, ...]:
        return self.omega[1:]

    @property
    def num_uavs(self) -> int:
        return len(self.omega) - 1


@dataclass(frozen=True)
class TransmissionPlan:
    """Per-bit times, transmit powers, and the cooperative energy split.

    When no common task exists (``omega_0 == 0``) the cooperative phase is
    absent: ``t_c`` is reported as 0.0 and all cooperative powers and
    energies are zero.
    """

    t_n: tuple[float, ...]   # s/bit, individual transmission of each UAV
    t_c: float               # s/bit, cooperative transmission (0.0 if unused)
    p_n: tuple[float, ...]   # W
    p_c: tuple[float, ...]   # W
    E_c: tuple[float, ...]   # J, per-UAV cooperative energy budget

    def __post_init__(self):
        n = len(self.t_n)
        if not (len(self.p_n) == len(self.p_c) == len(self.E_c) == n):
            raise ValueError("plan vectors must share one length")
        if any(t <= 0.0 for t in self.t_n):
            raise ValueError("individual per-bit times must be positive")
        if self.t_c < 0.0:
            raise ValueError("cooperative per-bit time must be non-negative")
        if any(e < 0.0 for e in self.E_c):
            raise ValueError("cooperative energies must be non-negative")

    @property
    def num_uavs(self) -> int:
        return len(self.t_n)

    @property
    def has_coop_phase(self) -> bool:
        return self.t_c > 0.0


@dataclass(frozen=True)
class MissionTimeline:
    """Start and end instants of every phase plus the total completion time."""

    sense_end: tuple[float, ...]
    tx_start: tuple[float, ...]
    tx_end: tuple[float, ...]
    coop_start: float
    coop_end: float
    total_T: float


@dataclass(frozen=True)
class SolveReport:
    """Everything one solve produced: solution, exact timeline, diagnostics."""

    allocation: TaskAllocation
    plan: TransmissionPlan
    timeline: MissionTimeline
    scheme_name: str
    iterations: int = 0
    bound_gap: float = 0.0
    diagnostics: tuple[CheckResult, ...] = ()

    @property
    def total_T(self) -> float:
        return self.timeline.total_T


def _check_dimensions(inst: ProblemInstance, omega: Sequence[float], plan: TransmissionPlan):
    if len(omega) != inst.num_uavs + 1:
        raise ValueError(
            f"allocation has {len(omega) - 1} UAVs but instance has {inst.num_uavs}"
        )
    if plan.num_uavs != inst.num_uavs:
        raise ValueError(
            f"plan has {plan.num_uavs} UAVs but instance has {inst.num_uavs}"
        )


def timeline_from_times(
    inst: ProblemInstance,
    omega: Sequence[float],
    t_n: Sequence[float],
    t_c: float,
) -> MissionTimeline:
    """Serialize the transmissions in UAV index order and nest the maxima.

    A UAV starts transmitting once its own sensing is done and the channel
    is free; the cooperative phase starts when the last individual
    transmission ends.  Works for partial allocations (sum < 1) too, which
    the outer-approximation engine uses for bound evaluation.
    """
    m_count = inst.num_uavs
    w0 = omega[0]
    beta = inst.workload
    c_bits = inst.data_volume
    sense_end = [(omega[m] + w0) * beta for m in range(1, m_count + 1)]
    tx_start: list[float] = []
    tx_end: list[float] = []
    channel_free = 0.0
    for m in range(m_count):
        start = max(channel_free, sense_end[m])
        duration = omega[m + 1] * c_bits * t_n[m]
        tx_start.append(start)
        tx_end.append(start + duration)
        channel_free = start + duration
    coop_start = channel_free
    coop_end = coop_start + w0 * c_bits * t_c
    return MissionTimeline(
        sense_end=tuple(sense_end),
        tx_start=tuple(tx_start),
        tx_end=tuple(tx_end),
        coop_start=coop_start,
        coop_end=coop_end,
        total_T=coop_end,
    )


def evaluate_timeline(
    inst: ProblemInstance, alloc: TaskAllocation, plan: TransmissionPlan
) -> MissionTimeline:
    """Exact mission timeline for a given allocation and transmission plan."""
    _check_dimensions(inst, alloc.omega, plan)
    return timeline_from_times(inst, alloc.omega, plan.t_n, plan.t_c)


def energy_consumption(
    inst: ProblemInstance, alloc: TaskAllocation, plan: TransmissionPlan, m: int
) -> float:
    """Total transmit energy of UAV m (1-based): cooperative plus individual."""
    _check_dimensions(inst, alloc.omega, plan)
    if not 1 <= m <= inst.num_uavs:
        raise IndexError(f"UAV index {m} out of range 1..{inst.num_uavs}")
    c_bits = inst.data_volume
    coop = alloc.common * c_bits * plan.t_c * plan.p_c[m - 1]
    individual = alloc.individual[m - 1] * c_bits * plan.t_n[m - 1] * plan.p_n[m - 1]
    return coop + individual


def validate_solution(
    inst: ProblemInstance, alloc: TaskAllocation, plan: TransmissionPlan
) -> list[CheckResult]:
    """All constraint violations of a candidate solution, as data.

    Returns an empty list iff per-UAV energy stays within budget, powers
    are within [0, p_max], times are consistent with powers, the ratios sum
    to one, and no UAV would have to idle waiting for its own sensing after
    the channel frees up (beyond the unavoidable wait of the first UAV that
    actually transmits).
    """
    _check_dimensions(inst, alloc.omega, plan)
    violations: list[CheckResult] = []
    m_count = inst.num_uavs
    e_bar = inst.energy_budget

    total = sum(alloc.omega)
    if abs(total - 1.0) > SUM_TOL:
        violations.append(
            CheckResult("ratio_sum", False, abs(total - 1.0), f"sum(omega)={total}")
        )

    for m in range(1, m_count + 1):
        for label, p in (("p_n", plan.p_n[m - 1]), ("p_c", plan.p_c[m - 1])):
            if p < -1e-12 or p > inst.p_max * (1.0 + 1e-9):
                violations.append(
                    CheckResult(
                        f"power_bound[{label},{m}]",
                        False,
                        max(-p, p - inst.p_max),
                        f"{label}={p} W outside [0, {inst.p_max}]",
                    )
                )

    # Time/power consistency for every UAV that carries individual data.
    for m in range(1, m_count + 1):
        if alloc.individual[m - 1] <= 0.0:
            continue
        implied = inst.power_for_time(plan.t_n[m - 1], m)
        rel = abs(implied - plan.p_n[m - 1]) / max(implied, 1e-300)
        if rel > 1e-9:
            violations.append(
                CheckResult(
                    f"rate_consistency[t_n,{m}]",
                    False,
                    rel,
                    f"t_n={plan.t_n[m - 1]} implies p_n={implied}, plan has {plan.p_n[m - 1]}",
                )
            )

    # Cooperative-rate consistency, only when the phase exists.
    if alloc.common > 0.0:
        if plan.t_c <= 0.0:
            violations.append(
                CheckResult(
                    "coop_time_missing", False, alloc.common,
                    "common task present but no cooperative per-bit time",
                )
            )
        else:
            snr = sum(p * g for p, g in zip(plan.p_c, inst.gamma))
            if snr <= 0.0:
                violations.append(
                    CheckResult("coop_power_zero", False, alloc.common,
                                "common task present but zero cooperative power")
                )
            else:
                implied_t = 1.0 / (inst.bandwidth * math.log2(1.0 + snr))
                rel = abs(implied_t - plan.t_c) / implied_t
                if rel > 1e-9:
                    violations.append(
                        CheckResult(
                            "rate_consistency[t_c]", False, rel,
                            f"coop SNR {snr} implies t_c={implied_t}, plan has {plan.t_c}",
                        )
                    )

    for m in range(1, m_count + 1):
        e_m = energy_consumption(inst, alloc, plan, m)
        if e_m > e_bar * (1.0 + 1e-9):
            violations.append(
                CheckResult(
                    f"energy_budget[{m}]", False, e_m - e_bar,
                    f"E_{m}={e_m} J exceeds budget {e_bar} J",
                )
            )

    # Information-causality chain: after the first transmitting UAV, the
    # channel must never sit idle waiting for a later UAV's sensing.
    first_active = next(
        (m for m in range(1, m_count + 1) if alloc.individual[m - 1] > 0.0), None
    )
    if first_active is not None:
        beta = inst.workload
        c_bits = inst.data_volume
        t_max = (alloc.individual[first_active - 1] + alloc.common) * beta
        for m in range(first_active, m_count):
            t_max += alloc.individual[m - 1] * c_bits * plan.t_n[m - 1]
            sense_end_next = (alloc.individual[m] + alloc.common) * beta
            slack = t_max - sense_end_next
            scale = max(1.0, abs(sense_end_next))
            if slack < -1e-9 * scale and alloc.individual[m] > 0.0:
                violations.append(
                    CheckResult(
                        f"causality[{m}->{m + 1}]", False, -slack,
                        f"channel frees at {t_max} s but UAV {m + 1} senses until "
                        f"{sense_end_next} s",
                    )
                )
                t_max = sense_end_next  # restart the chain after a gap
    return violations
