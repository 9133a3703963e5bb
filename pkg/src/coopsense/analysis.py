"""Closed-form thresholds, transmission-time formulas, and optimality checks.

The central object is the per-UAV optimal per-bit transmission time under an
energy budget: below a threshold ratio the budget is slack and max power is
optimal; above it the budget binds and the time follows a Lambert-W closed
form.  From it come marginal completion-time derivatives, a necessity test
for overlapped sensing, and advisory diagnostics on solver output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfeasibleAllocationError
from .model import CheckResult, ProblemInstance, SolveReport
from .numerics import RootBracket, bisect, lambert_w_minus1

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class OverlapVerdict:
    """Outcome of the overlapped-sensing necessity test.

    ``x_star`` is the SNR the whole fleet could sustain for a full-mission
    cooperative transmission that exactly exhausts every budget; overlap
    can only help when it beats the best single channel at max power.
    """

    x_star: float
    threshold: float
    overlap_possible: bool


@dataclass(frozen=True)
class MarginalCurve:
    """Per-UAV constants of the marginal completion-time derivative."""

    uav: int
    hat_omega: float
    coeff_a: float   # C ln2 / (B gamma E), dimensionless per unit ratio


def necessity_check(inst: ProblemInstance) -> OverlapVerdict:
    """Decide whether overlapped sensing can possibly pay off.

    Solves C*x / (B*log2(1+x)) = E_bar * sum(gamma) for the fleet-level
    SNR ``x`` by bisection and compares it against the best single-UAV SNR
    at max power.  When the verdict is negative, downstream solvers may fix
    the common ratio to zero with no loss of optimality.
    """
    rhs = inst.energy_budget * sum(inst.gamma) * inst.bandwidth / inst.data_volume

    def f(x: float) -> float:
        return x / math.log2(1.0 + x) - rhs

    threshold = inst.p_max * inst.gamma[-1]
    # x/log2(1+x) -> ln 2 as x -> 0+; below that the budget cannot even
    # cover the slowest cooperative transmission of the full mission.
    if rhs <= _LN2:
        return OverlapVerdict(x_star=0.0, threshold=threshold, overlap_possible=False)
    hi = 2.0
    while f(hi) < 0.0:
        hi *= 4.0
        if hi > 1e300:
            raise ArithmeticError("necessity-check bracket expansion ran away")
    x_star = bisect(f, RootBracket(1e-12, hi, tol_abs=1e-300, tol_rel=1e-12, max_iter=400))
    return OverlapVerdict(
        x_star=x_star, threshold=threshold, overlap_possible=x_star > threshold
    )


def hat_omega(gain: float, inst: ProblemInstance, energy: float) -> float:
    """Task ratio at which transmitting at max power exactly exhausts ``energy``."""
    if gain <= 0.0:
        raise ValueError("gain must be positive")
    if energy < 0.0:
        raise ValueError("energy must be non-negative")
    rate_log = math.log2(1.0 + inst.p_max * gain)
    return inst.bandwidth * rate_log * energy / (inst.p_max * inst.data_volume)


def marginal_curve(m: int, inst: ProblemInstance, energy: float | None = None) -> MarginalCurve:
    """Constants of UAV m's marginal-time derivative under budget ``energy``."""
    e = inst.energy_budget if energy is None else energy
    gain = inst.gamma[m - 1]
    return MarginalCurve(
        uav=m,
        hat_omega=hat_omega(gain, inst, e),
        coeff_a=inst.data_volume * _LN2 / (inst.bandwidth * gain * e),
    )


def _require_feasible(omega: float, gain: float, energy: float, inst: ProblemInstance):
    floor = omega * inst.data_volume * _LN2 / (inst.bandwidth * gain)
    if energy <= floor:
        raise InfeasibleAllocationError(
            f"energy {energy} J cannot deliver ratio {omega} over gain {gain}: "
            f"the zero-power limit already needs {floor} J"
        )


def tau_from_energy(
    omega: float, gain: float, energy: float, inst: ProblemInstance
) -> float:
    """Optimal per-bit transmission time for ratio ``omega`` under ``energy``.

    Below the threshold ratio the budget is slack and the max-power time is
    returned; above it the budget binds and the Lambert-W closed form
    applies.  The returned time never spends more than ``energy``.
    """
    if omega <= 0.0:
        raise ValueError("ratio must be positive")
    if gain <= 0.0:
        raise ValueError("gain must be positive")
    _require_feasible(omega, gain, energy, inst)
    w_hat = hat_omega(gain, inst, energy)
    if omega < w_hat:
        return 1.0 / (inst.bandwidth * math.log2(1.0 + inst.p_max * gain))
    a = inst.data_volume * _LN2 / (inst.bandwidth * gain * energy)
    x = a * omega          # < 1 by the feasibility check above
    w = lambert_w_minus1(-x * math.exp(-x))
    return -_LN2 / (inst.bandwidth * (w + x))


def marginal_time(
    omega: float, gain: float, energy: float, inst: ProblemInstance
) -> float:
    """Derivative of UAV transmission time C*omega*tau(omega) w.r.t. omega.

    Constant in the max-power regime; in the budget-binding regime it is
    the analytic Lambert-W derivative.  Piecewise monotone non-decreasing,
    with an upward jump at the threshold ratio (the binding branch starts
    steeper because slowing down is the only way to stay within budget).
    """
    if omega <= 0.0:
        raise ValueError("ratio must be positive")
    _require_feasible(omega, gain, energy, inst)
    w_hat = hat_omega(gain, inst, energy)
    if omega < w_hat:
        return inst.data_volume / (inst.bandwidth * math.log2(1.0 + inst.p_max * gain))
    a = inst.data_volume * _LN2 / (inst.bandwidth * gain * energy)
    x = a * omega
    w = lambert_w_minus1(-x * math.exp(-x))
    # d/domega of C*omega*tau = (C ln2 / B) * (-W) / ((W + x)(1 + W)).
    denom = (w + x) * (1.0 + w)
    if denom <= 0.0:
        # x has reached 1: the ratio sits on the Shannon limit of the
        # budget and the transmission time diverges, so the marginal does.
        return math.inf
    return inst.data_volume * _LN2 / inst.bandwidth * (-w / denom)


def limit_allocation(inst: ProblemInstance) -> float | None:
    """Predicted common ratio in the extreme-workload regimes.

    Vanishing workload makes full overlap optimal (ratio 1); overwhelming
    workload kills overlap (ratio 0).  Interior workloads get no
    prediction.  Used by the property-test harness only.
    """
    scale = inst.data_volume * inst.coop_per_bit_floor()
    if inst.workload <= 1e-4 * scale:
        return 1.0
    if inst.workload >= 100.0 * scale:
        return 0.0
    return None


def optimality_diagnostics(inst: ProblemInstance, report: SolveReport) -> list[CheckResult]:
    """Advisory structure checks on a solution that uses overlapped sensing.

    When the common ratio is meaningfully positive, the optimal solution
    (i) relates each individual power to the cooperative SNR and (ii) makes
    the cooperative per-bit time no slower than any individual one.  Both
    are reported with residuals; failures flag a suspicious solve, they do
    not invalidate feasibility.
    """
    alloc, plan = report.allocation, report.plan
    results: list[CheckResult] = []
    if alloc.common <= 1e-6:
        return results
    m_count = inst.num_uavs
    coop_snr = sum(p * g for p, g in zip(plan.p_c, inst.gamma))
    timeline = report.timeline
    beta = inst.workload
    c_bits = inst.data_volume

    for m in range(1, m_count + 1):
        if alloc.individual[m - 1] <= 1e-12:
            continue
        candidates = [coop_snr / inst.gamma[m - 1], inst.p_max]
        if m < m_count:
            # The causality bound: transmit no faster than needed for the
            # next UAV's sensing to finish in time.
            window = (alloc.individual[m] + alloc.common) * beta - timeline.tx_start[m - 1]
            if window > 0.0:
                exponent = c_bits * alloc.individual[m - 1] / (inst.bandwidth * window)
                if exponent < 700.0:
                    candidates.append((2.0 ** exponent - 1.0) / inst.gamma[m - 1])
        expected = min(candidates)
        rel = abs(plan.p_n[m - 1] - expected) / max(expected, 1e-300)
        results.append(
            CheckResult(
                f"power_relation[{m}]", rel <= 1e-4, rel,
                f"p_n={plan.p_n[m - 1]} W, structural value {expected} W",
            )
        )

    worst = 0.0
    for m in range(1, m_count + 1):
        worst = max(worst, plan.t_c - plan.t_n[m - 1])
    results.append(
        CheckResult(
            "coop_time_fastest", worst <= 1e-9, max(worst, 0.0),
            f"t_c={plan.t_c}, min t_n={min(plan.t_n)}",
        )
    )
    return results
