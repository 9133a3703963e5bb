"""HTTP service exposing the solver library.

Thin translation layer: pydantic models in, pydantic models out, domain
errors mapped to structured 422 responses with a machine-readable code
("infeasible" or "non_convergence") that the CLI turns into exit codes.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import harness
from ..analysis import necessity_check
from ..errors import ConvergenceError, InfeasibleAllocationError
from ..model import ProblemInstance, SolveReport, energy_consumption
from ..polyblock import solve_polyblock_traced
from . import schemas


def _instance_from(ref: schemas.InstanceRef) -> ProblemInstance:
    if ref.preset is not None:
        try:
            return harness.PRESETS[ref.preset]
        except KeyError:
            raise HTTPException(404, detail=f"unknown preset {ref.preset!r}")
    doc = ref.instance.model_dump()
    return ProblemInstance.from_json_dict(doc)


def _report_model(inst: ProblemInstance, report: SolveReport) -> schemas.ReportModel:
    plan = report.plan
    return schemas.ReportModel(
        scheme=report.scheme_name,
        total_T=report.total_T,
        omega=list(report.allocation.omega),
        plan=schemas.PlanModel(
            t_n=list(plan.t_n),
            t_c=plan.t_c,
            p_n=list(plan.p_n),
            p_c=list(plan.p_c),
            E_c=list(plan.E_c),
        ),
        energies=[
            energy_consumption(inst, report.allocation, plan, m)
            for m in range(1, inst.num_uavs + 1)
        ],
        iterations=report.iterations,
        gap=report.bound_gap,
        diagnostics=[
            schemas.DiagnosticModel(
                name=d.name, passed=d.passed, residual=d.residual, detail=d.detail
            )
            for d in report.diagnostics
        ],
    )


def _domain_error(exc: Exception) -> HTTPException:
    if isinstance(exc, InfeasibleAllocationError):
        return HTTPException(422, detail={"code": "infeasible", "message": str(exc)})
    if isinstance(exc, ConvergenceError):
        return HTTPException(
            422,
            detail={
                "code": "non_convergence",
                "message": str(exc),
                "best_gap": exc.best_gap,
            },
        )
    raise exc


def create_app() -> FastAPI:
    app = FastAPI(title="coopsense", version="1.0.0")

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse()

    @app.get("/presets", response_model=schemas.PresetsResponse)
    def presets():
        return schemas.PresetsResponse(
            presets={
                name: schemas.InstanceModel(**inst.to_json_dict())
                for name, inst in harness.PRESETS.items()
            }
        )

    @app.post("/solve", response_model=schemas.SolveResponse)
    def solve(req: schemas.SolveRequest):
        inst = _instance_from(req)
        try:
            report = harness.run_scheme(inst, req.scheme, req.epsilon)
        except (InfeasibleAllocationError, ConvergenceError) as exc:
            raise _domain_error(exc)
        verdict = necessity_check(inst)
        return schemas.SolveResponse(
            report=_report_model(inst, report),
            necessity=schemas.NecessityModel(
                x_star=verdict.x_star,
                threshold=verdict.threshold,
                overlap_possible=verdict.overlap_possible,
            ),
        )

    @app.post("/sweep", response_model=schemas.SweepResponse)
    def sweep(req: schemas.SweepRequest):
        inst = _instance_from(req)
        spec = harness.SweepSpec(
            param=req.sweep.param,
            values=tuple(req.sweep.values),
            schemes=tuple(req.sweep.schemes),
            seed=req.sweep.seed,
        )
        try:
            result = harness.run_sweep(spec, inst, epsilon=req.epsilon)
        except (InfeasibleAllocationError, ConvergenceError) as exc:
            raise _domain_error(exc)
        return schemas.SweepResponse(
            rows=[
                schemas.SweepRowModel(
                    param=r.param,
                    value=r.value,
                    scheme=r.scheme,
                    total_T=r.total_T,
                    omega=list(r.omega),
                    energies=list(r.energies),
                    t_c=r.t_c,
                    t_n=list(r.t_n),
                    iterations=r.iterations,
                    gap=r.gap,
                )
                for r in result.rows
            ],
            mean_gaps_percent=result.mean_gaps(),
            skipped=[[repr(v), s, msg] for v, s, msg in result.skipped],
        )

    @app.post("/check", response_model=schemas.CheckResponse)
    def check(req: schemas.CheckRequest):
        base = _instance_from(req)
        out = []
        all_passed = True
        for i, row in enumerate(req.rows):
            inst = harness.apply_sweep_value(base, row.param, row.value)
            result_row = harness.ResultRow(
                param=row.param,
                value=row.value,
                scheme=row.scheme,
                instance=inst,
                total_T=row.total_T,
                omega=tuple(row.omega),
                energies=tuple(row.energies),
                t_c=row.t_c,
                t_n=tuple(row.t_n),
                iterations=row.iterations,
                gap=row.gap,
            )
            violations = harness.check_row(result_row)
            if violations:
                all_passed = False
            out.append(
                schemas.RowCheckModel(
                    index=i,
                    violations=[
                        schemas.DiagnosticModel(
                            name=v.name,
                            passed=v.passed,
                            residual=v.residual,
                            detail=v.detail,
                        )
                        for v in violations
                    ],
                )
            )
        return schemas.CheckResponse(all_passed=all_passed, rows=out)

    @app.post("/oracle", response_model=schemas.OracleResponse)
    def oracle(req: schemas.OracleRequest):
        inst = _instance_from(req)
        try:
            omega, total = harness.brute_force_oracle(inst, req.grid_step)
        except InfeasibleAllocationError as exc:
            raise _domain_error(exc)
        except ValueError as exc:
            raise HTTPException(422, detail={"code": "bad_request", "message": str(exc)})
        return schemas.OracleResponse(omega=list(omega), total_T=total)

    @app.post("/trace", response_model=schemas.TraceResponse)
    def trace(req: schemas.TraceRequest):
        inst = _instance_from(req)
        try:
            report, tr = solve_polyblock_traced(inst, req.epsilon)
        except (InfeasibleAllocationError, ConvergenceError) as exc:
            raise _domain_error(exc)
        return schemas.TraceResponse(
            report=_report_model(inst, report),
            rows=[
                schemas.TraceRowModel(
                    iteration=r.iteration,
                    cbv=r.cbv,
                    lower_bound=r.lower_bound,
                    vertex=list(r.vertex),
                    projection=list(r.projection) if r.projection else None,
                )
                for r in tr.rows
            ],
        )

    return app


app = create_app()
