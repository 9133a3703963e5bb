"""Minimum completion time for a fixed task allocation.

With the allocation frozen, the remaining problem over per-bit times and
the cooperative energy split is convex: the objective is linear in the
times and every constraint is built from the convex, decreasing per-bit
energy kernel.  It is solved by a primal log-barrier method with damped
Newton steps; all first and second derivatives are available in closed
form, so no external solver is needed.

Two exact fast paths cover the common regimes without any Newton work:
everything at max power when all budgets are slack, and the per-UAV
closed-form times when there is no cooperative phase and the causality
chain stays slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analysis import tau_from_energy
from .errors import ConvergenceError, InfeasibleAllocationError
from .model import (
    ProblemInstance,
    TaskAllocation,
    TransmissionPlan,
    timeline_from_times,
)
from .numerics import (
    energy_time_kernel,
    energy_time_kernel_grad,
    energy_time_kernel_hess,
)

_LN2 = math.log(2.0)
_OMEGA_EPS = 1e-12

DEFAULT_GAP_TOL = 1e-8
DEFAULT_MAX_NEWTON = 200


@dataclass(frozen=True)
class InnerSolution:
    """Optimal transmission plan for one allocation, with solve diagnostics."""

    plan: TransmissionPlan
    objective_T: float
    kkt_residual: float
    converged: bool
    iterations: int


def _as_omega(alloc) -> tuple[float, ...]:
    if isinstance(alloc, TaskAllocation):
        return alloc.omega
    return tuple(float(w) for w in alloc)


def recover_coop_power(
    E_c: Sequence[float], t_c: float, alloc, inst: ProblemInstance
) -> tuple[float, ...]:
    """Per-UAV cooperative powers implied by the energy split and time."""
    omega = _as_omega(alloc)
    w0 = omega[0]
    if w0 <= 0.0:
        raise ValueError("no cooperative phase: common ratio is zero")
    if t_c <= 0.0:
        raise ValueError("no cooperative phase: per-bit time is zero")
    denom = inst.data_volume * w0 * t_c
    powers = tuple(e / denom for e in E_c)
    for p in powers:
        if p > inst.p_max * (1.0 + 1e-9):
            raise ValueError(f"recovered power {p} W exceeds cap {inst.p_max} W")
    return tuple(min(p, inst.p_max) for p in powers)


def _build_plan(
    inst: ProblemInstance,
    omega: tuple[float, ...],
    t_by_uav: dict[int, float],
    t_c: float,
    e_c: Sequence[float],
) -> TransmissionPlan:
    m_count = inst.num_uavs
    t_n, p_n = [], []
    for m in range(1, m_count + 1):
        t = t_by_uav.get(m, inst.per_bit_floor(m))
        t = max(t, inst.per_bit_floor(m))
        t_n.append(t)
        p_n.append(min(inst.power_for_time(t, m), inst.p_max))
    w0 = omega[0]
    if w0 > _OMEGA_EPS and t_c > 0.0:
        p_c = recover_coop_power(e_c, t_c, omega, inst)
        return TransmissionPlan(
            t_n=tuple(t_n), t_c=t_c, p_n=tuple(p_n), p_c=p_c, E_c=tuple(e_c)
        )
    zeros = (0.0,) * m_count
    return TransmissionPlan(t_n=tuple(t_n), t_c=0.0, p_n=tuple(p_n), p_c=zeros, E_c=zeros)


def _solution(inst, omega, t_by_uav, t_c, e_c, kkt, converged, iters) -> InnerSolution:
    plan = _build_plan(inst, omega, t_by_uav, t_c, e_c)
    timeline = timeline_from_times(inst, omega, plan.t_n, plan.t_c)
    return InnerSolution(
        plan=plan,
        objective_T=timeline.total_T,
        kkt_residual=kkt,
        converged=converged,
        iterations=iters,
    )


def _feasibility_precheck(inst, omega, active, coop):
    """Raise when some UAV cannot meet its load even with power -> 0."""
    e_bar = inst.energy_budget
    floors = {}
    for m in active:
        floor = inst.shannon_floor(omega[m] * inst.data_volume, inst.gamma[m - 1])
        if floor >= e_bar:
            raise InfeasibleAllocationError(
                f"UAV {m} needs at least {floor} J for its individual data, "
                f"budget is {e_bar} J"
            )
        floors[m] = floor
    if coop:
        leftover = sum(
            (e_bar - floors.get(m, 0.0)) * inst.gamma[m - 1]
            for m in range(1, inst.num_uavs + 1)
        )
        coop_floor = omega[0] * inst.data_volume * _LN2 / inst.bandwidth
        if coop_floor >= leftover:
            raise InfeasibleAllocationError(
                f"cooperative phase needs gain-weighted energy {coop_floor}, "
                f"only {leftover} available across the fleet"
            )


def _causality_rows(inst, omega, active):
    """(row targets) for the no-idle chain: list of (m_next, rhs_seconds)."""
    if not active:
        return []
    beta = inst.workload
    m0 = active[0]
    rows = []
    for m_next in active[1:]:
        rhs = (omega[m_next] - omega[m0]) * beta
        if rhs > 1e-15:
            rows.append((m_next, rhs))
    return rows


def _try_max_power(inst, omega, active, coop, causality):
    """Exact optimum when every per-bit time can sit at its floor.

    The objective is increasing in every time variable, so if the floors
    satisfy all energy and causality constraints the floor point is the
    certified global optimum.
    """
    c_bits = inst.data_volume
    e_bar = inst.energy_budget
    t = {m: inst.per_bit_floor(m) for m in active}
    t_c = inst.coop_per_bit_floor() if coop else 0.0
    coop_e = omega[0] * c_bits * t_c * inst.p_max if coop else 0.0
    for m in active:
        used = omega[m] * c_bits * t[m] * inst.p_max + coop_e
        if used > e_bar * (1.0 + 1e-12):
            return None
    if coop and coop_e > e_bar * (1.0 + 1e-12):
        return None
    lhs = 0.0
    upto = {}
    for m in active:
        lhs += c_bits * omega[m] * t[m]
        upto[m] = lhs
    for m_next, rhs in causality:
        prev = [m for m in active if m < m_next]
        if not prev or upto[prev[-1]] < rhs * (1.0 - 1e-12) - 1e-15:
            return None
    e_c = [coop_e] * inst.num_uavs if coop else [0.0] * inst.num_uavs
    return _solution(inst, omega, t, t_c, e_c, kkt=0.0, converged=True, iters=0)


def _try_separable(inst, omega, active, coop, causality):
    """Exact optimum when there is no coupling between UAVs.

    Without a cooperative phase each UAV's optimal time is its closed-form
    budget-limited time; if the causality chain is slack there, the
    separable point is globally optimal.
    """
    if coop:
        return None
    c_bits = inst.data_volume
    t = {
        m: tau_from_energy(omega[m], inst.gamma[m - 1], inst.energy_budget, inst)
        for m in active
    }
    lhs = 0.0
    upto = {}
    for m in active:
        lhs += c_bits * omega[m] * t[m]
        upto[m] = lhs
    for m_next, rhs in causality:
        prev = [m for m in active if m < m_next]
        if not prev or upto[prev[-1]] < rhs * (1.0 - 1e-12) - 1e-15:
            return None
    return _solution(inst, omega, t, 0.0, [0.0] * inst.num_uavs, 0.0, True, 0)


class _Barrier:
    """Constraint bookkeeping for the scaled barrier problem.

    Scaled variables: theta = B * t (dimensionless, order 0.1..10) for each
    active UAV and for the cooperative phase, plus the raw per-UAV
    cooperative energies in joules.
    """

    def __init__(self, inst: ProblemInstance, omega, active, coop, causality):
        self.inst = inst
        self.omega = omega
        self.active = active
        self.coop = coop
        m_count = inst.num_uavs
        self.n_t = len(active)
        self.coop_idx = self.n_t if coop else -1
        self.f_base = self.n_t + (1 if coop else 0)
        self.dim = self.f_base + (m_count if coop else 0)
        self.var_of_uav = {m: i for i, m in enumerate(active)}

        c_over_b = inst.data_volume / inst.bandwidth
        self.obj = np.zeros(self.dim)
        for i, m in enumerate(active):
            self.obj[i] = c_over_b * omega[m]
        if coop:
            self.obj[self.coop_idx] = c_over_b * omega[0]

        self.theta_floor = np.array(
            [inst.per_bit_floor(m) * inst.bandwidth for m in active]
        )
        self.theta_c_floor = inst.coop_per_bit_floor() * inst.bandwidth if coop else 0.0
        # Energy kernel multipliers: energy_m = k_m * K(theta_m).
        self.k_energy = np.array(
            [inst.data_volume * omega[m] / (inst.bandwidth * inst.gamma[m - 1]) for m in active]
        )
        self.k_coop = inst.data_volume * omega[0] / inst.bandwidth if coop else 0.0
        self.cap_coef = (
            inst.data_volume * omega[0] * inst.p_max / inst.bandwidth if coop else 0.0
        )
        self.causality = causality

        rows = []  # (kind, payload)
        for i in range(self.n_t):
            rows.append(("floor_t", i))
        for i, m in enumerate(active):
            rows.append(("energy", (i, m)))
        for m_next, rhs in causality:
            prev = [self.var_of_uav[m] for m in active if m < m_next]
            coeff = np.zeros(self.dim)
            for i in prev:
                coeff[i] = -c_over_b * omega[active[i]]
            rows.append(("lin", (coeff, rhs)))
        if coop:
            rows.append(("floor_c", None))
            rows.append(("agg", None))
            for m in range(1, m_count + 1):
                f_i = self.f_base + m - 1
                if m not in self.var_of_uav:
                    coeff = np.zeros(self.dim)
                    coeff[f_i] = 1.0
                    rows.append(("lin", (coeff, -inst.energy_budget)))
                coeff = np.zeros(self.dim)
                coeff[f_i] = -1.0
                rows.append(("lin", (coeff, 0.0)))  # F_m >= 0
                cap = np.zeros(self.dim)
                cap[f_i] = 1.0
                cap[self.coop_idx] = -self.cap_coef
                rows.append(("lin", (cap, 0.0)))
        self.rows = rows
        self.n_con = len(rows)

    def constraints(self, x):
        """Values c_i(x) (feasible iff all < 0), Jacobian, and curvatures."""
        vals = np.empty(self.n_con)
        jac = np.zeros((self.n_con, self.dim))
        curv = []  # (row, var, second derivative)
        e_bar = self.inst.energy_budget
        gammas = self.inst.gamma
        for r, (kind, payload) in enumerate(self.rows):
            if kind == "floor_t":
                i = payload
                vals[r] = self.theta_floor[i] - x[i]
                jac[r, i] = -1.0
            elif kind == "floor_c":
                vals[r] = self.theta_c_floor - x[self.coop_idx]
                jac[r, self.coop_idx] = -1.0
            elif kind == "energy":
                i, m = payload
                th = x[i]
                used = self.k_energy[i] * energy_time_kernel(th, 1.0)
                f_term = x[self.f_base + m - 1] if self.coop else 0.0
                vals[r] = used + f_term - e_bar
                jac[r, i] = self.k_energy[i] * energy_time_kernel_grad(th, 1.0)
                if self.coop:
                    jac[r, self.f_base + m - 1] = 1.0
                curv.append((r, i, self.k_energy[i] * energy_time_kernel_hess(th, 1.0)))
            elif kind == "agg":
                th = x[self.coop_idx]
                total = sum(
                    x[self.f_base + m - 1] * gammas[m - 1]
                    for m in range(1, self.inst.num_uavs + 1)
                )
                vals[r] = self.k_coop * energy_time_kernel(th, 1.0) - total
                jac[r, self.coop_idx] = self.k_coop * energy_time_kernel_grad(th, 1.0)
                for m in range(1, self.inst.num_uavs + 1):
                    jac[r, self.f_base + m - 1] = -gammas[m - 1]
                curv.append(
                    (r, self.coop_idx, self.k_coop * energy_time_kernel_hess(th, 1.0))
                )
            else:  # lin
                coeff, rhs = payload
                vals[r] = coeff @ x + rhs
                jac[r] = coeff
        return vals, jac, curv

    def values_only(self, x):
        vals, _, _ = self.constraints(x)
        return vals


def _feasible_start(barrier: _Barrier):
    """Strictly feasible start: floors pushed up for energy and causality."""
    inst, omega = barrier.inst, barrier.omega
    e_bar = inst.energy_budget
    x = np.zeros(barrier.dim)
    used = {}
    for i, m in enumerate(barrier.active):
        th = barrier.theta_floor[i] * (1.0 + 1e-3)
        k = barrier.k_energy[i]
        shannon = k * _LN2
        budget_share = 0.5 if barrier.coop else 0.9
        target = shannon + (e_bar - shannon) * budget_share
        if k * energy_time_kernel(th, 1.0) >= target:
            # Kernel is decreasing: push theta up until usage hits target.
            hi = th
            while k * energy_time_kernel(hi, 1.0) >= target:
                hi *= 2.0
                if hi > 1e12:
                    raise InfeasibleAllocationError(
                        f"UAV {m}: cannot reach energy target within budget"
                    )
            lo = th
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if k * energy_time_kernel(mid, 1.0) >= target:
                    lo = mid
                else:
                    hi = mid
            th = hi
        x[i] = th
        used[m] = k * energy_time_kernel(th, 1.0)
    # Causality pass: raise the latest prefix time when the chain is short.
    c_over_b = inst.data_volume / inst.bandwidth
    for m_next, rhs in barrier.causality:
        prev = [m for m in barrier.active if m < m_next]
        lhs = sum(c_over_b * omega[m] * x[barrier.var_of_uav[m]] for m in prev)
        need = rhs * (1.0 + 1e-6) + 1e-12
        if lhs < need:
            m_fix = prev[-1]
            i = barrier.var_of_uav[m_fix]
            x[i] += (need - lhs) / (c_over_b * omega[m_fix])
            used[m_fix] = barrier.k_energy[i] * energy_time_kernel(x[i], 1.0)
    if barrier.coop:
        avail = np.array(
            [e_bar - used.get(m, 0.0) for m in range(1, inst.num_uavs + 1)]
        )
        if np.any(avail <= 0.0):
            raise InfeasibleAllocationError("no cooperative energy left after start")
        th_c = barrier.theta_c_floor * (1.0 + 1e-3)
        gammas = np.array(inst.gamma)
        for _ in range(600):
            caps = barrier.cap_coef * th_c
            f = 0.9 * np.minimum(avail, caps)
            if barrier.k_coop * energy_time_kernel(th_c, 1.0) < 0.98 * float(f @ gammas):
                break
            th_c *= 1.3
        else:
            raise InfeasibleAllocationError(
                "cooperative phase infeasible even at vanishing power"
            )
        x[barrier.coop_idx] = th_c
        x[barrier.f_base:] = f
    vals = barrier.values_only(x)
    if np.max(vals) >= 0.0:
        raise ConvergenceError(
            f"failed to construct a strictly feasible start (max residual {np.max(vals)})"
        )
    return x


def _barrier_solve(barrier: _Barrier, gap_tol: float, max_newton: int):
    """Path-following: minimize tb*f + barrier, growing tb geometrically."""
    x = _feasible_start(barrier)
    tb = 1.0
    mu = 20.0
    steps = 0
    obj = barrier.obj

    def psi(xv, tbv):
        if np.any(xv[: barrier.f_base] <= 0.0):
            return math.inf
        vals = barrier.values_only(xv)
        if np.max(vals) >= 0.0:
            return math.inf
        return tbv * float(obj @ xv) - float(np.sum(np.log(-vals)))

    while True:
        for _ in range(max_newton):
            vals, jac, curv = barrier.constraints(x)
            s = -vals
            grad = tb * obj + jac.T @ (1.0 / s)
            weighted = jac / s[:, None]
            hess = weighted.T @ weighted
            for r, i, h in curv:
                hess[i, i] += h / s[r]
            hess[np.diag_indices_from(hess)] += 1e-12 * max(1.0, float(np.max(np.diag(hess))))
            try:
                step = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError:
                step = -grad / max(1.0, float(np.max(np.diag(hess))))
            decrement = float(-grad @ step)
            if decrement <= 2e-9:
                break
            steps += 1
            if steps > max_newton:
                raise ConvergenceError(
                    f"inner solver exceeded {max_newton} Newton steps",
                    best_gap=barrier.n_con / tb,
                )
            base = psi(x, tb)
            alpha = 1.0
            for _ in range(60):
                trial = x + alpha * step
                val = psi(trial, tb)
                if val < base - 0.25 * alpha * decrement:
                    x = trial
                    break
                alpha *= 0.5
            else:
                break  # no progress possible at this stage
        f_val = float(obj @ x)
        if barrier.n_con / tb <= gap_tol * (1.0 + abs(f_val)):
            return x, barrier.n_con / tb, steps
        tb *= mu


def solve_inner(
    inst: ProblemInstance,
    alloc,
    *,
    allow_partial: bool = False,
    gap_tol: float = DEFAULT_GAP_TOL,
    max_newton: int = DEFAULT_MAX_NEWTON,
) -> InnerSolution:
    """Optimal per-bit times and cooperative energy split for ``alloc``.

    ``alloc`` may be a TaskAllocation or a bare ratio sequence.  With
    ``allow_partial`` the ratios may sum to less than one, which the
    outer-approximation engine uses to evaluate lower-bound vertices.
    Individual ratios should be non-decreasing (the serialization order
    assumes the gain-sorted convention).

    Raises InfeasibleAllocationError when some load cannot be delivered
    within the energy budget even at vanishing power.
    """
    omega = _as_omega(alloc)
    if len(omega) != inst.num_uavs + 1:
        raise ValueError("allocation size does not match instance")
    total = sum(omega)
    if not allow_partial and abs(total - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1 (got {total}); use allow_partial")
    if total > 1.0 + 1e-9:
        raise ValueError(f"ratios sum to {total} > 1")

    active = [m for m in range(1, inst.num_uavs + 1) if omega[m] > _OMEGA_EPS]
    coop = omega[0] > _OMEGA_EPS
    _feasibility_precheck(inst, omega, active, coop)
    if not active and not coop:
        return _solution(inst, omega, {}, 0.0, [0.0] * inst.num_uavs, 0.0, True, 0)
    causality = _causality_rows(inst, omega, active)

    fast = _try_max_power(inst, omega, active, coop, causality)
    if fast is not None:
        return fast
    fast = _try_separable(inst, omega, active, coop, causality)
    if fast is not None:
        return fast

    barrier = _Barrier(inst, omega, active, coop, causality)
    x, gap, steps = _barrier_solve(barrier, gap_tol, max_newton)
    t_by_uav = {m: x[i] / inst.bandwidth for i, m in enumerate(active)}
    t_c = x[barrier.coop_idx] / inst.bandwidth if coop else 0.0
    e_c = list(x[barrier.f_base:]) if coop else [0.0] * inst.num_uavs
    e_c = [max(e, 0.0) for e in e_c]
    f_val = float(barrier.obj @ x)
    kkt = gap / (1.0 + abs(f_val))
    return _solution(inst, omega, t_by_uav, t_c, e_c, kkt, True, steps)
