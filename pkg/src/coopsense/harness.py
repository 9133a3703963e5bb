"""Experiment plumbing: presets, routing solver, sweeps, oracle, CSV output.

The routing solver picks between the outer-approximation and the
no-overlap solver based on the overlap necessity test.  Sweeps vary one
instance parameter over an explicit value list, run the requested schemes
at every point, and persist one CSV row per (value, scheme) plus a mean
gap summary of each baseline against the proposed scheme.
"""

from __future__ import annotations

import csv
import dataclasses
import itertools
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Sequence

from .analysis import necessity_check, optimality_diagnostics
from .baselines import BASELINES
from .degenerate import solve_degenerate
from .errors import ConvergenceError, InfeasibleAllocationError
from .inner import solve_inner
from .model import (
    ProblemInstance,
    SolveReport,
    TaskAllocation,
    energy_consumption,
    evaluate_timeline,
    validate_solution,
)
from .polyblock import DEFAULT_EPSILON, solve_polyblock

SCHEMES = ("proposed", "uta_wc", "uta_c", "full_c", "opt_wc")
SWEEP_PARAMS = ("beta_s", "energy_budget", "p_max", "num_uavs")

PRESETS: dict[str, ProblemInstance] = {
    "paper-default": ProblemInstance.from_parameters(
        gamma=(9e3, 1.2e4, 1.5e4),
        data_volume=20e6,
        workload=2.0,
        bandwidth=1e5,
        p_max=0.01,
        energy_budget=1.0,
    ),
}

# Documented sweep grids for the figure-style experiments.
DEFAULT_SWEEP_VALUES = {
    "beta_s": [1.0 + 0.5 * k for k in range(19)],           # 1 .. 10
    "energy_budget": [0.05 * k for k in range(1, 21)],      # 0.05 .. 1
    "p_max": [0.002 * k for k in range(1, 11)],             # 2 .. 20 mW
    "num_uavs": [1, 2, 3, 4, 5],
}


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep description."""

    param: str
    values: tuple[float, ...]
    schemes: tuple[str, ...] = SCHEMES
    seed: int = 0

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise ValueError(f"unknown sweep parameter {self.param!r}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "schemes", tuple(self.schemes))


@dataclass(frozen=True)
class ResultRow:
    """Flat record of one solve inside a sweep."""

    param: str
    value: float
    scheme: str
    instance: ProblemInstance
    total_T: float
    omega: tuple[float, ...]
    energies: tuple[float, ...]
    t_c: float
    t_n: tuple[float, ...]
    iterations: int
    gap: float

    def __post_init__(self):
        numbers = [self.total_T, self.t_c, self.gap, *self.omega, *self.energies, *self.t_n]
        if any(not math.isfinite(x) for x in numbers):
            raise ValueError("result row contains non-finite numbers")


def solve_auto(inst: ProblemInstance, epsilon: float = DEFAULT_EPSILON) -> SolveReport:
    """Route to the right solver and attach advisory diagnostics.

    The no-overlap solver is used when the necessity test rules overlap
    out (and sensing takes time at all); otherwise the global
    outer-approximation solver runs.  The necessity test is a modelling
    shortcut rather than a watertight certificate, so on the no-overlap
    path the cheap overlapped allocations are still evaluated and the
    best candidate wins; this also guarantees the routed solver never
    loses to any fixed-allocation baseline.
    """
    verdict = necessity_check(inst)
    if not verdict.overlap_possible and inst.workload > 0.0:
        report = solve_degenerate(inst)
        m = inst.num_uavs
        for omega in ((1.0,) + (0.0,) * m, (1.0 / (m + 1),) * (m + 1)):
            try:
                sol = solve_inner(inst, omega)
            except InfeasibleAllocationError:
                continue
            if sol.objective_T < report.total_T:
                alloc = TaskAllocation(omega)
                report = SolveReport(
                    allocation=alloc,
                    plan=sol.plan,
                    timeline=evaluate_timeline(inst, alloc, sol.plan),
                    scheme_name="proposed",
                    iterations=report.iterations,
                    bound_gap=report.bound_gap,
                )
        report = dataclasses.replace(report, scheme_name="proposed")
    else:
        report = solve_polyblock(inst, epsilon)
    diagnostics = tuple(optimality_diagnostics(inst, report))
    return dataclasses.replace(report, diagnostics=diagnostics)


def extend_gains(base_gamma: Sequence[float], m: int) -> tuple[float, ...]:
    """Gain list for ``m`` UAVs derived from a base list.

    Takes the first ``m`` sorted gains, extrapolating linearly with the
    average spacing when more are needed than the base provides.
    """
    gains = sorted(float(g) for g in base_gamma)
    if m <= len(gains):
        return tuple(gains[:m])
    if len(gains) == 1:
        step = gains[0] * 0.25
    else:
        step = (gains[-1] - gains[0]) / (len(gains) - 1)
    while len(gains) < m:
        gains.append(gains[-1] + step)
    return tuple(gains)


def apply_sweep_value(base: ProblemInstance, param: str, value: float) -> ProblemInstance:
    if param == "beta_s":
        return dataclasses.replace(base, workload=float(value))
    if param == "energy_budget":
        return dataclasses.replace(base, energy_budget=float(value))
    if param == "p_max":
        return dataclasses.replace(base, p_max=float(value))
    if param == "num_uavs":
        m = int(round(value))
        if m < 1:
            raise ValueError("num_uavs must be at least 1")
        gains = extend_gains(base.gamma, m)
        return dataclasses.replace(
            base, gamma=gains, caller_order=tuple(range(m))
        )
    raise ValueError(f"unknown sweep parameter {param!r}")


def run_scheme(
    inst: ProblemInstance, scheme: str, epsilon: float = DEFAULT_EPSILON
) -> SolveReport:
    if scheme == "proposed":
        return solve_auto(inst, epsilon)
    try:
        return BASELINES[scheme](inst)
    except KeyError:
        raise ValueError(f"unknown scheme {scheme!r}") from None


def _row_from_report(
    param: str, value: float, inst: ProblemInstance, report: SolveReport
) -> ResultRow:
    energies = tuple(
        energy_consumption(inst, report.allocation, report.plan, m)
        for m in range(1, inst.num_uavs + 1)
    )
    return ResultRow(
        param=param,
        value=value,
        scheme=report.scheme_name if report.scheme_name in SCHEMES else "proposed",
        instance=inst,
        total_T=report.total_T,
        omega=report.allocation.omega,
        energies=energies,
        t_c=report.plan.t_c,
        t_n=report.plan.t_n,
        iterations=report.iterations,
        gap=report.bound_gap,
    )


@dataclass
class SweepResult:
    rows: list[ResultRow]
    skipped: list[tuple[float, str, str]] = field(default_factory=list)

    def mean_gaps(self) -> dict[str, float]:
        """Mean percentage excess of each baseline over the proposed scheme."""
        proposed = {
            r.value: r.total_T for r in self.rows if r.scheme == "proposed"
        }
        sums: dict[str, list[float]] = {}
        for r in self.rows:
            if r.scheme == "proposed" or r.value not in proposed:
                continue
            ref = proposed[r.value]
            sums.setdefault(r.scheme, []).append(100.0 * (r.total_T - ref) / ref)
        return {k: sum(v) / len(v) for k, v in sums.items() if v}


def run_sweep(
    spec: SweepSpec,
    base: ProblemInstance,
    epsilon: float = DEFAULT_EPSILON,
    csv_path: str | None = None,
) -> SweepResult:
    """Run every (value, scheme) point sequentially and optionally persist.

    Sequential execution in sorted order keeps output byte-identical for
    identical configs.  Points whose instance is infeasible for a scheme
    are recorded as skipped rather than aborting the sweep.
    """
    rows: list[ResultRow] = []
    skipped: list[tuple[float, str, str]] = []
    for value in spec.values:
        inst = apply_sweep_value(base, spec.param, value)
        for scheme in spec.schemes:
            try:
                report = run_scheme(inst, scheme, epsilon)
            except InfeasibleAllocationError as exc:
                skipped.append((value, scheme, str(exc)))
                continue
            row = _row_from_report(spec.param, value, inst, report)
            rows.append(row)
    rows.sort(key=lambda r: (r.value, SCHEMES.index(r.scheme)))
    result = SweepResult(rows=rows, skipped=skipped)
    if csv_path is not None:
        write_csv(result, csv_path)
    return result


def csv_header(m_max: int) -> list[str]:
    head = ["param", "value", "scheme", "T_total"]
    head += [f"omega_{m}" for m in range(0, m_max + 1)]
    head += [f"E_{m}" for m in range(1, m_max + 1)]
    head += ["t_c"]
    head += [f"t_n_{m}" for m in range(1, m_max + 1)]
    head += ["iters", "gap"]
    return head


def write_csv(result: SweepResult, path: str) -> None:
    """Atomic CSV write: fully written to a temp file, then renamed."""
    m_max = max((r.instance.num_uavs for r in result.rows), default=0)
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".csv.tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(csv_header(m_max))
            for r in result.rows:
                m = r.instance.num_uavs
                pad = [""] * (m_max - m)
                writer.writerow(
                    [
                        r.param,
                        repr(r.value),
                        r.scheme,
                        repr(r.total_T),
                        *[repr(x) for x in r.omega],
                        *pad,
                        *[repr(x) for x in r.energies],
                        *pad,
                        repr(r.t_c),
                        *[repr(x) for x in r.t_n],
                        *pad,
                        r.iterations,
                        repr(r.gap),
                    ]
                )
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def plan_from_row(row: ResultRow):
    """Rebuild the transmission plan a row describes.

    Powers follow from the persisted per-bit times; the cooperative energy
    split is the remainder of each UAV's total energy after its individual
    transmission.
    """
    from .model import TransmissionPlan

    inst = row.instance
    c_bits = inst.data_volume
    w0 = row.omega[0]
    t_n = row.t_n
    p_n = tuple(
        min(inst.power_for_time(t, m + 1), inst.p_max) for m, t in enumerate(t_n)
    )
    if w0 > 0.0 and row.t_c > 0.0:
        e_c = tuple(
            max(0.0, e - row.omega[m + 1] * c_bits * t_n[m] * p_n[m])
            for m, e in enumerate(row.energies)
        )
        p_c = tuple(e / (w0 * c_bits * row.t_c) for e in e_c)
        return TransmissionPlan(t_n=t_n, t_c=row.t_c, p_n=p_n, p_c=p_c, E_c=e_c)
    zeros = (0.0,) * inst.num_uavs
    return TransmissionPlan(t_n=t_n, t_c=0.0, p_n=p_n, p_c=zeros, E_c=zeros)


def check_row(row: ResultRow) -> list:
    """Re-validate a persisted row against its instance."""
    alloc = TaskAllocation(row.omega)
    return validate_solution(row.instance, alloc, plan_from_row(row))


def load_rows(csv_path: str, base: ProblemInstance) -> list[ResultRow]:
    """Read a sweep CSV back into rows, rebuilding each instance."""
    rows: list[ResultRow] = []
    with open(csv_path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        for record in reader:
            inst = apply_sweep_value(base, record["param"], float(record["value"]))
            m = inst.num_uavs
            rows.append(
                ResultRow(
                    param=record["param"],
                    value=float(record["value"]),
                    scheme=record["scheme"],
                    instance=inst,
                    total_T=float(record["T_total"]),
                    omega=tuple(
                        float(record[f"omega_{i}"]) for i in range(0, m + 1)
                    ),
                    energies=tuple(
                        float(record[f"E_{i}"]) for i in range(1, m + 1)
                    ),
                    t_c=float(record["t_c"]),
                    t_n=tuple(
                        float(record[f"t_n_{i}"]) for i in range(1, m + 1)
                    ),
                    iterations=int(record["iters"]),
                    gap=float(record["gap"]),
                )
            )
    return rows


def brute_force_oracle(
    inst: ProblemInstance, grid_step: float
) -> tuple[tuple[float, ...], float]:
    """Exhaustive ordered-simplex grid search; the validation reference.

    Enumerates every allocation on the simplex grid whose individual
    ratios are non-decreasing, inner-solves each, and returns the best
    (allocation, completion time).  Deterministic.
    """
    if inst.num_uavs > 3:
        raise ValueError("oracle limited to 3 UAVs")
    if not 0.005 <= grid_step <= 0.5:
        raise ValueError(f"grid step {grid_step} outside [0.005, 0.5]")
    n = round(1.0 / grid_step)
    if abs(n * grid_step - 1.0) > 1e-9:
        raise ValueError("grid step must divide 1 evenly")
    m = inst.num_uavs
    if (n + 1) ** m > 1_000_000:
        raise ValueError("grid too large")
    best_T, best_omega = math.inf, None
    for counts in itertools.product(range(n + 1), repeat=m):
        if any(a > b for a, b in zip(counts, counts[1:])):
            continue  # individual ratios must be non-decreasing
        total = sum(counts)
        if total > n:
            continue
        omega = ((n - total) / n, *[c / n for c in counts])
        try:
            sol = solve_inner(inst, omega)
        except (InfeasibleAllocationError, ConvergenceError):
            # Near-infeasible grid points may also defeat the inner
            # solver's iteration cap; either way they cannot be optimal.
            continue
        if sol.objective_T < best_T:
            best_T, best_omega = sol.objective_T, omega
    if best_omega is None:
        raise InfeasibleAllocationError("no grid point is feasible")
    return best_omega, best_T
