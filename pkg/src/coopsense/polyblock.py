"""Outer-approximation engine for monotone objectives, plus the task adapter.

The completion time is increasing in every task ratio, and the feasible
allocations live on the slab boundary sum(omega) = 1 inside a box.  The
engine keeps a shrinking union of upward-closed boxes (a copolyblock)
covering every candidate better than the incumbent: each step takes the
vertex with the smallest objective lower bound, projects it onto the
boundary along the ray to the box's upper corner to get a feasible
incumbent candidate, and replaces the vertex with one child per raised
coordinate.  The vertex minimum is a global lower bound, so the gap to
the incumbent certifies epsilon-optimality.

The engine itself knows nothing about UAVs; ``solve_polyblock`` supplies
the projection, bounds, and incumbent seeding for the task-allocation
problem.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog

from .analysis import marginal_time, tau_from_energy
from .errors import ConvergenceError, InfeasibleAllocationError
from .inner import InnerSolution, solve_inner
from .model import ProblemInstance, SolveReport, TaskAllocation, evaluate_timeline
from .numerics import energy_time_kernel, energy_time_kernel_grad

DEFAULT_EPSILON = 1e-3
DEFAULT_MAX_ITER = 500
MAX_VERTICES = 100_000

_COORD_TOL = 1e-12


@dataclass(frozen=True)
class Box:
    """Axis-aligned box; the search region is a union of [vertex, upper]."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("box corners must share a dimension")
        if any(lo > hi + _COORD_TOL for lo, hi in zip(self.lower, self.upper)):
            raise ValueError(f"box requires lower <= upper: {self.lower} vs {self.upper}")


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    cbv: float
    lower_bound: float
    vertex: tuple[float, ...]
    projection: tuple[float, ...] | None


@dataclass
class PolyblockTrace:
    """Per-iteration progress log; CBV falls, the lower bound rises."""

    rows: list[TraceRow] = field(default_factory=list)

    def append(self, row: TraceRow):
        if self.rows:
            last = self.rows[-1]
            if row.cbv > last.cbv + 1e-12 or row.lower_bound < last.lower_bound - 1e-12:
                raise AssertionError("trace monotonicity violated")
        self.rows.append(row)


class VertexSet:
    """Candidate lower-bound vertices of the remaining copolyblock.

    A vertex whose box lies inside another vertex's box is redundant for
    coverage and is pruned, so no vertex ever dominates another.
    """

    def __init__(self, upper_corner: Sequence[float]):
        self.upper_corner = tuple(float(u) for u in upper_corner)
        self._alive: dict[tuple[float, ...], float | None] = {}

    def __len__(self) -> int:
        return len(self._alive)

    def __contains__(self, v) -> bool:
        return tuple(v) in self._alive

    def vertices(self) -> list[tuple[float, ...]]:
        return list(self._alive)

    def bound(self, v) -> float | None:
        return self._alive[tuple(v)]

    def set_bound(self, v, bound: float):
        key = tuple(v)
        if key not in self._alive:
            raise KeyError(f"vertex not in set: {key}")
        self._alive[key] = bound

    def add(self, v, bound: float | None = None) -> bool:
        """Insert unless duplicated, dominated, or out of the global box."""
        key = tuple(v)
        if key in self._alive:
            return False
        if any(c > u + _COORD_TOL for c, u in zip(key, self.upper_corner)):
            return False
        for other in self._alive:
            if other != key and all(o <= c + _COORD_TOL for o, c in zip(other, key)):
                return False  # key's box sits inside other's box
        if len(self._alive) >= MAX_VERTICES:
            raise ConvergenceError(f"vertex set exceeded {MAX_VERTICES} entries")
        self._alive[key] = bound
        return True

    def remove(self, v):
        self._alive.pop(tuple(v), None)


def replace_vertex(vset: VertexSet, v, projection) -> list[tuple[float, ...]]:
    """Swap ``v`` for one child per coordinate raised to the projection's value.

    Children that leave the global box, duplicate or are dominated by an
    existing vertex, or are not a strict refinement, are pruned.
    """
    key = tuple(v)
    if key not in vset:
        raise KeyError(f"vertex not in set: {key}")
    parent_bound = vset.bound(key)
    vset.remove(key)
    children = []
    for i, (vi, pi) in enumerate(zip(key, projection)):
        if pi <= vi + _COORD_TOL:
            continue  # no refinement along this axis
        child = key[:i] + (float(pi),) + key[i + 1 :]
        if vset.add(child, parent_bound):
            children.append(child)
    return children


def project_to_boundary(
    v: Sequence[float],
    upper_corner: Sequence[float],
    boundary_offset: Callable[[Sequence[float]], float] | None = None,
) -> tuple[float, ...]:
    """Point where the ray from ``v`` toward ``upper_corner`` meets the boundary.

    With no callback the boundary is the hyperplane sum = 1, for which the
    step is analytic.  A callback (negative strictly inside, positive
    outside, increasing along the ray) is resolved by bisection instead,
    which keeps the engine usable for other feasible sets.
    """
    v = tuple(float(x) for x in v)
    u = tuple(float(x) for x in upper_corner)
    if boundary_offset is None:
        sv, su = sum(v), sum(u)
        if sv > 1.0 + 1e-9:
            raise ValueError(f"vertex already beyond the boundary: sum={sv}")
        if su <= 1.0:
            raise ValueError("upper corner must lie beyond the boundary")
        lam = min(1.0, max(0.0, (1.0 - sv) / (su - sv)))
    else:
        if boundary_offset(v) > 0.0:
            raise ValueError("vertex already beyond the boundary")
        if boundary_offset(u) < 0.0:
            raise ValueError("upper corner must lie beyond the boundary")
        lo, hi = 0.0, 1.0
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            point = tuple(a + mid * (b - a) for a, b in zip(v, u))
            if boundary_offset(point) <= 0.0:
                lo = mid
            else:
                hi = mid
        lam = 0.5 * (lo + hi)
    return tuple(a + lam * (b - a) for a, b in zip(v, u))


@dataclass(frozen=True)
class EngineResult:
    best_point: tuple[float, ...]
    best_value: float
    best_payload: object
    lower_bound: float
    gap: float
    iterations: int
    trace: PolyblockTrace


def minimize_increasing(
    vertex_bound: Callable[[tuple[float, ...]], float],
    feasible_value: Callable[[tuple[float, ...]], tuple[float, object]],
    project: Callable[[tuple[float, ...]], tuple[float, ...]],
    upper_corner: Sequence[float],
    *,
    epsilon: float = DEFAULT_EPSILON,
    max_iter: int = DEFAULT_MAX_ITER,
    incumbents: Sequence[tuple[float, tuple[float, ...], object]] = (),
    keep_trace: bool = False,
) -> EngineResult:
    """Core loop: epsilon-minimize an increasing function over the boundary.

    ``vertex_bound`` must lower-bound the objective over the vertex's whole
    upward box (+inf prunes the box); ``feasible_value`` evaluates a
    boundary point exactly and returns (value, payload); ``project`` maps a
    vertex to the boundary along the ray to the upper corner.

    Children inherit the parent's exact bound until popped, so each
    iteration costs one bound evaluation and one feasible evaluation.
    """
    if not 0.0 < epsilon <= 0.1:
        raise ValueError(f"epsilon must be in (0, 0.1], got {epsilon}")
    vset = VertexSet(upper_corner)
    origin = tuple(0.0 for _ in upper_corner)
    vset.add(origin, None)
    counter = itertools.count()
    heap: list[tuple[float, int, tuple[float, ...], bool]] = [
        (-math.inf, next(counter), origin, False)
    ]
    cbv, best_point, best_payload = math.inf, None, None
    for val, point, payload in incumbents:
        if val < cbv:
            cbv, best_point, best_payload = val, tuple(point), payload
    trace = PolyblockTrace()
    lower_bound = -math.inf
    iteration = 0

    def rel_gap(lb: float) -> float:
        if not math.isfinite(cbv):
            return math.inf
        return (cbv - lb) / max(abs(cbv), 1e-12)

    while iteration < max_iter:
        while heap:
            bound, _, v, exact = heapq.heappop(heap)
            if v not in vset or (exact and vset.bound(v) != bound):
                continue
            if not exact:
                true_bound = vertex_bound(v)
                # The inherited parent bound also covers this child's box,
                # so never let a fresh evaluation regress below it.
                inherited = vset.bound(v)
                if inherited is not None:
                    true_bound = max(true_bound, inherited)
                if not math.isfinite(true_bound) or (
                    math.isfinite(cbv) and true_bound >= cbv * (1.0 - epsilon)
                ):
                    vset.remove(v)
                    continue
                vset.set_bound(v, true_bound)
                heapq.heappush(heap, (true_bound, next(counter), v, True))
                continue
            break
        else:
            # Region exhausted: nothing better than cbv*(1-eps) remains.
            lower_bound = cbv if math.isfinite(cbv) else lower_bound
            break
        iteration += 1
        lower_bound = bound
        gap = rel_gap(lower_bound)
        projection = None
        if gap > epsilon:
            projection = project(v)
            value, payload = feasible_value(projection)
            if value < cbv:
                cbv, best_point, best_payload = value, projection, payload
                gap = rel_gap(lower_bound)
            children = replace_vertex(vset, v, projection)
            for child in children:
                heapq.heappush(heap, (bound, next(counter), child, False))
            if not children:
                vset.remove(v)
        if keep_trace:
            trace.append(TraceRow(iteration, cbv, lower_bound, v, projection))
        if gap <= epsilon:
            break
    if best_point is None:
        raise InfeasibleAllocationError("no feasible boundary point was found")
    final_gap = rel_gap(min(lower_bound, cbv))
    if final_gap > epsilon:
        raise ConvergenceError(
            f"outer approximation stopped after {iteration} iterations "
            f"with relative gap {final_gap}",
            best_gap=final_gap,
        )
    return EngineResult(
        best_point=best_point,
        best_value=cbv,
        best_payload=best_payload,
        lower_bound=min(lower_bound, cbv),
        gap=max(final_gap, 0.0),
        iterations=iteration,
        trace=trace,
    )


def default_upper_corner(m_count: int) -> tuple[float, ...]:
    """Global box corner: common ratio up to 1; sorted individual ratios
    are capped because ratio m cannot exceed the average of the ratios
    from m upward."""
    corner = [1.0]
    for m in range(1, m_count + 1):
        corner.append(min(1.0, 1.0 / (m_count + 1 - m)))
    return tuple(corner)


def _repair_point(point: Sequence[float], m_count: int) -> tuple[float, ...]:
    """Sort individual ratios ascending and renormalize the sum to one.

    Pairing larger ratios with larger (sorted) gains never increases the
    optimal completion time, so this is a repair, not a restriction.
    """
    w0 = max(0.0, float(point[0]))
    rest = sorted(max(0.0, float(x)) for x in point[1:])
    total = w0 + sum(rest)
    if total <= 0.0:
        raise ValueError("cannot repair an all-zero point")
    return (w0 / total, *[x / total for x in rest])


def _sorted_partial(point: Sequence[float]) -> tuple[float, ...]:
    return (float(point[0]), *sorted(float(x) for x in point[1:]))


def _polish_allocation(
    inst: ProblemInstance, start: Sequence[float], max_evals: int = 250
) -> tuple[float, tuple[float, ...], InnerSolution] | None:
    """Local simplex descent from ``start``; returns (T, omega, solution).

    Derivative free on purpose: the objective is piecewise smooth across
    timeline regime changes, where gradient steps chatter.
    """
    from scipy.optimize import minimize

    def objective(x) -> float:
        try:
            repaired = _repair_point([abs(float(c)) for c in x], inst.num_uavs)
            return solve_inner(inst, repaired).objective_T
        except (InfeasibleAllocationError, ConvergenceError, ValueError):
            return math.inf

    res = minimize(
        objective,
        list(start),
        method="Nelder-Mead",
        options={"maxfev": max_evals, "xatol": 1e-7, "fatol": 1e-10},
    )
    if not math.isfinite(res.fun):
        return None
    omega = _repair_point([abs(float(c)) for c in res.x], inst.num_uavs)
    try:
        sol = solve_inner(inst, omega)
    except (InfeasibleAllocationError, ConvergenceError):
        return None
    return sol.objective_T, omega, sol


def seed_allocations(inst: ProblemInstance) -> list[TaskAllocation]:
    """Feasible starting incumbents: full overlap, uniform splits."""
    m = inst.num_uavs
    seeds = [
        (1.0,) + (0.0,) * m,
        (0.0,) + (1.0 / m,) * m,
        (1.0 / (m + 1),) * (m + 1),
    ]
    return [TaskAllocation(s) for s in seeds]


def solve_polyblock(
    inst: ProblemInstance,
    epsilon: float = DEFAULT_EPSILON,
    *,
    max_iter: int = DEFAULT_MAX_ITER,
    extra_seeds: Sequence[TaskAllocation] = (),
) -> SolveReport:
    """Globally epsilon-optimal task allocation by outer approximation.

    Callers should consult ``necessity_check`` first and route to the
    non-overlap solver when overlap cannot help; this routine still works
    in that case but spends iterations proving the common ratio away.
    """
    report, _ = solve_polyblock_traced(
        inst, epsilon, max_iter=max_iter, extra_seeds=extra_seeds, keep_trace=False
    )
    return report


def solve_polyblock_traced(
    inst: ProblemInstance,
    epsilon: float = DEFAULT_EPSILON,
    *,
    max_iter: int = DEFAULT_MAX_ITER,
    keep_trace: bool = True,
    extra_seeds: Sequence[TaskAllocation] = (),
) -> tuple[SolveReport, PolyblockTrace]:
    """Like ``solve_polyblock`` but also returns the iteration trace."""
    m_count = inst.num_uavs
    upper = default_upper_corner(m_count)
    cache: dict[tuple[float, ...], tuple[float, InnerSolution | None]] = {}

    # Channel-occupancy bound over the box [v, upper]: the shared channel
    # carries every transmission back to back, so T is at least the sum of
    # the per-coordinate channel times omega_i * C * tau_i(omega_i) plus
    # the common sensing time.  Each summand is convex in its ratio, so a
    # tangent at the vertex plus the residual simplex mass priced at the
    # cheapest tangent slope underestimates T anywhere in the box.  The
    # cooperative term is relaxed to the whole fleet's pooled gain-weighted
    # energy; each UAV's individual term may use the full budget.
    gain_sum = sum(inst.gamma)
    gains = [gain_sum, *inst.gamma]

    def occupancy_bound(v: tuple[float, ...]) -> float:
        # v arrives with individual coordinates sorted ascending, matching
        # the ascending gains: the cheapest pairing over all reorderings,
        # hence still valid under the sort repair of feasible points.
        base, slopes = 0.0, []
        for i, (x, gain) in enumerate(zip(v, gains)):
            try:
                if x > _COORD_TOL:
                    tau = tau_from_energy(x, gain, inst.energy_budget, inst)
                    base += x * inst.data_volume * tau
                    slope = marginal_time(x, gain, inst.energy_budget, inst)
                else:
                    slope = inst.data_volume / (
                        inst.bandwidth * math.log2(1.0 + inst.p_max * gain)
                    )
            except InfeasibleAllocationError:
                return math.inf  # box starts beyond the Shannon floor
            if i == 0:
                base += x * inst.workload
                slope += inst.workload
            slopes.append(slope)
        residual = 1.0 - sum(v)
        if residual <= 0.0:
            return base
        open_slopes = [
            s for s, x, u in zip(slopes, v, upper) if x < u - _COORD_TOL
        ]
        if not open_slopes:
            return math.inf  # no room left for the residual mass
        return base + residual * min(open_slopes)

    # Dual channel-occupancy bound: summing the per-UAV energy budgets
    # with gain weights couples every transmission through one aggregate
    # constraint  omega_0*C*g(t_c) + sum_m omega_m*C*g(t_m) <= E*sum(gamma).
    # Pricing that constraint at lambda makes the per-unit channel cost of
    # every coordinate  C * min_{t >= floor} (t + lambda*g(t)), linear in
    # the ratios, so the box bound is again base + residual * cheapest
    # slope.  A fixed lambda grid keeps each bound a table lookup; any
    # lambda is valid, the grid only affects tightness.  Near optimal
    # allocations the marginal energy prices equalize across UAVs, which
    # makes this relaxation tight exactly where it matters.
    lambda_grid = [0.0] + [10.0 ** e for e in np.linspace(-4.0, 5.0, 55)]
    floors = [inst.coop_per_bit_floor()] + [
        inst.per_bit_floor(m) for m in range(1, m_count + 1)
    ]
    pooled_energy = inst.energy_budget * gain_sum

    def _kernel_slope_time(lam: float) -> float:
        """argmin_t (t + lam * g(t)): where the kernel slope is -1/lam."""
        target = -1.0 / lam

        def slope_minus_target(t: float) -> float:
            return energy_time_kernel_grad(t, inst.bandwidth) - target

        lo = hi = 1.0 / inst.bandwidth
        while slope_minus_target(lo) > 0.0:
            lo *= 0.5
        while slope_minus_target(hi) < 0.0:
            hi *= 2.0
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if slope_minus_target(mid) < 0.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    dual_rows = []  # per lambda: (unit costs per coordinate, lam * pooled energy)
    for lam in lambda_grid:
        t_lam = _kernel_slope_time(lam) if lam > 0.0 else 0.0
        costs = []
        for i, floor in enumerate(floors):
            t_star = max(floor, t_lam)
            cost = inst.data_volume * (
                t_star + lam * energy_time_kernel(t_star, inst.bandwidth)
            )
            if i == 0:
                cost += inst.workload
            costs.append(cost)
        dual_rows.append((costs, lam * pooled_energy))

    def dual_bound(v: tuple[float, ...]) -> float:
        residual = max(0.0, 1.0 - sum(v))
        best = -math.inf
        for costs, penalty in dual_rows:
            base = sum(c * x for c, x in zip(costs, v))
            if residual > 0.0:
                open_costs = [
                    c for c, x, u in zip(costs, v, upper) if x < u - _COORD_TOL
                ]
                if not open_costs:
                    return math.inf
                base += residual * min(open_costs)
            best = max(best, base - penalty)
        return best

    # Per-unit channel times at full power: nothing transmits faster.
    unit_times = [
        inst.data_volume / (inst.bandwidth * math.log2(1.0 + inst.p_max * g))
        for g in gains
    ]

    # Serial-tail LP bound.  The slot order is fixed: the UAVs in
    # ascending gain order, then the cooperative burst.  UAV m cannot
    # start before sensing beta*(omega_0 + omega_m), every later slot
    # serializes behind it, and pricing the pooled energy constraint
    #   omega_0*C*g(t_c) + sum_k omega_k*C*g(t_k) <= E*sum(gamma)
    # at lambda >= 0 makes each (m, lambda) pair an affine row in omega:
    #   T >= beta*(omega_0 + omega_m) + omega_0*c_0 + sum_{k>=m} omega_k*c_k
    #        + sum_{k<m} omega_k*lambda*C*ln2/B - lambda*E*sum(gamma)
    # with c_i = C*min_{t >= floor_i} (t + lambda*g(t)); coordinates before
    # slot m occupy no counted channel time but still burn energy at the
    # kernel's large-time limit.  Minimizing the max of all rows over the
    # box slice {omega >= v, omega <= upper, sorted, sum = 1} is one small
    # LP per vertex; the lambda rows are vertex independent.
    n_coords = m_count + 1
    tail_c = [0.0] * n_coords + [1.0]
    tail_chain = []
    for k in range(1, m_count):  # keep individual ratios ascending
        chain = [0.0] * (n_coords + 1)
        chain[k], chain[k + 1] = 1.0, -1.0
        tail_chain.append(chain)
    tail_A_eq = [[1.0] * n_coords + [0.0]]
    static_A, static_b = [], []
    for costs, penalty in dual_rows:
        lam = penalty / pooled_energy
        lam_floor = lam * inst.data_volume * math.log(2.0) / inst.bandwidth
        for m in range(1, m_count + 1):
            # costs[0] already carries the sensing term for omega_0.
            row = [costs[0]] + [lam_floor] * m_count
            row[m] = inst.workload + costs[m]
            for k in range(m + 1, m_count + 1):
                row[k] = costs[k]
            static_A.append(row + [-1.0])
            static_b.append(penalty)

    def serial_tail_bound(v: tuple[float, ...]) -> float:
        # lambda = 0 rows with energy-aware vertex units: per-unit channel
        # time never drops as a coordinate's mass grows (the budget
        # spreads thinner), so C*tau at the vertex mass is a valid
        # constant coefficient for the whole box.
        units = []
        for x, gain, floor_unit in zip(v, gains, unit_times):
            if x > _COORD_TOL:
                try:
                    tau = tau_from_energy(x, gain, inst.energy_budget, inst)
                except InfeasibleAllocationError:
                    return math.inf
                units.append(inst.data_volume * tau)
            else:
                units.append(floor_unit)
        rows = []
        for m in range(1, m_count + 1):
            row = [inst.workload + units[0]] + [0.0] * m_count
            row[m] = inst.workload + units[m]
            for k in range(m + 1, m_count + 1):
                row[k] = units[k]
            rows.append(row)
        res = linprog(
            tail_c,
            A_ub=[row + [-1.0] for row in rows] + static_A + tail_chain,
            b_ub=[0.0] * len(rows) + static_b + [0.0] * len(tail_chain),
            A_eq=tail_A_eq,
            b_eq=[1.0],
            bounds=[*zip(v, upper), (0.0, None)],
            method="highs",
        )
        if res.status == 2:
            return math.inf  # box has no unit-sum slice left
        if not res.success:
            # Fall back to evaluating the vertex-unit rows at the vertex.
            return max(sum(a * x for a, x in zip(row, v)) for row in rows)
        return float(res.fun)

    def sensing_bound(v: tuple[float, ...]) -> float:
        # The slowest UAV senses (omega_M + omega_0) * beta before anything
        # of its data can move, and sortedness forces omega_M to carry at
        # least the average individual share.
        w0, w_last = v[0], v[-1]
        return inst.workload * (w0 + max(w_last, (1.0 - w0) / m_count))

    def bound(v: tuple[float, ...]) -> float:
        key = _sorted_partial(v)
        cheap = max(
            occupancy_bound(key),
            dual_bound(key),
            serial_tail_bound(key),
            sensing_bound(key),
        )
        if not math.isfinite(cheap):
            return cheap
        if key not in cache:
            try:
                sol = solve_inner(inst, key, allow_partial=True)
                cache[key] = (sol.objective_T, sol)
            except InfeasibleAllocationError:
                cache[key] = (math.inf, None)
        return max(cache[key][0], cheap)

    def feasible(point: tuple[float, ...]) -> tuple[float, InnerSolution | None]:
        repaired = _repair_point(point, m_count)
        try:
            sol = solve_inner(inst, repaired, allow_partial=False)
        except InfeasibleAllocationError:
            return math.inf, None
        return sol.objective_T, (repaired, sol)

    seeds = [*seed_allocations(inst), *extra_seeds]
    if inst.workload > 0.0:
        # The no-overlap optimum is a cheap, often excellent incumbent.
        from .degenerate import solve_degenerate

        try:
            seeds.append(solve_degenerate(inst).allocation)
        except Exception:
            pass
    incumbents = []
    for alloc in seeds:
        try:
            sol = solve_inner(inst, alloc)
        except InfeasibleAllocationError:
            continue
        incumbents.append((sol.objective_T, alloc.omega, (alloc.omega, sol)))

    if incumbents:
        # When the origin's bound cannot already certify the best seed the
        # engine is in for real work; a local polish of the incumbent then
        # pays for itself many times over in pruning power.
        best_T, best_omega, _ = min(incumbents, key=lambda item: item[0])
        origin = tuple(0.0 for _ in upper)
        if bound(origin) < best_T * (1.0 - epsilon):
            polished = _polish_allocation(inst, best_omega)
            if polished is not None and polished[0] < best_T:
                T_pol, omega_pol, sol_pol = polished
                incumbents.append((T_pol, omega_pol, (omega_pol, sol_pol)))

    result = minimize_increasing(
        bound,
        feasible,
        lambda v: project_to_boundary(v, upper),
        upper,
        epsilon=epsilon,
        max_iter=max_iter,
        incumbents=incumbents,
        keep_trace=keep_trace,
    )
    omega, sol = result.best_payload
    alloc = TaskAllocation(omega)
    report = SolveReport(
        allocation=alloc,
        plan=sol.plan,
        timeline=evaluate_timeline(inst, alloc, sol.plan),
        scheme_name="proposed",
        iterations=result.iterations,
        bound_gap=result.gap,
    )
    return report, result.trace
