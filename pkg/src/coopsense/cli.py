"""Command-line client for the solver service.

By default the commands talk to an in-process copy of the HTTP service
(no network, same request/response contract); ``--server URL`` points
them at a running instance instead.  Configuration is a JSON document
with optional keys ``instance``, ``sweep``, ``epsilon``, ``seed``.

Exit codes: 0 success, 2 infeasible instance, 3 solver non-convergence.
"""

from __future__ import annotations

import json
import sys

import click
import httpx

from . import harness
from .service.app import create_app

EXIT_INFEASIBLE = 2
EXIT_NON_CONVERGENCE = 3


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from starlette.testclient import TestClient

    return TestClient(create_app(), base_url="http://service")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def _instance_ref(config: dict, preset: str | None) -> dict:
    if preset is not None:
        return {"preset": preset}
    if "instance" in config:
        return {"instance": config["instance"]}
    return {"preset": "paper-default"}


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    if response.status_code == 422:
        detail = response.json().get("detail")
        if isinstance(detail, dict):
            code = detail.get("code")
            click.echo(f"error: {detail.get('message')}", err=True)
            if code == "infeasible":
                sys.exit(EXIT_INFEASIBLE)
            if code == "non_convergence":
                sys.exit(EXIT_NON_CONVERGENCE)
        click.echo(f"error: {response.text}", err=True)
        sys.exit(1)
    response.raise_for_status()
    return response.json()


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config with instance/sweep/epsilon/seed keys.")
@click.option("--preset", default=None, help="Named preset instance.")
@click.option("--server", default=None, help="Base URL of a running service.")
@click.pass_context
def main(ctx, config_path, preset, server):
    """Mission completion time solver for cooperative sensing fleets."""
    config = _load_config(config_path)
    ctx.obj = {
        "config": config,
        "ref": _instance_ref(config, preset),
        "epsilon": config.get("epsilon", 1e-3),
        "server": server,
    }


@main.command()
@click.option("--epsilon", type=float, default=None)
@click.option("--scheme", default="proposed",
              type=click.Choice(list(harness.SCHEMES)))
@click.pass_obj
def solve(obj, epsilon, scheme):
    """Solve one instance and print the full report as JSON."""
    payload = dict(obj["ref"])
    payload["epsilon"] = epsilon if epsilon is not None else obj["epsilon"]
    payload["scheme"] = scheme
    with _client(obj["server"]) as client:
        doc = _post(client, "/solve", payload)
    click.echo(json.dumps(doc, indent=2, sort_keys=True))


@main.command()
@click.argument("name", type=click.Choice([s for s in harness.SCHEMES if s != "proposed"]))
@click.pass_obj
def baseline(obj, name):
    """Solve one instance with a fixed-allocation baseline scheme."""
    payload = dict(obj["ref"])
    payload["epsilon"] = obj["epsilon"]
    payload["scheme"] = name
    with _client(obj["server"]) as client:
        doc = _post(client, "/solve", payload)
    click.echo(json.dumps(doc, indent=2, sort_keys=True))


@main.command()
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="CSV output path (written atomically).")
@click.option("--param", default=None, type=click.Choice(list(harness.SWEEP_PARAMS)))
@click.option("--epsilon", type=float, default=None)
@click.pass_obj
def sweep(obj, out_path, param, epsilon):
    """Run a parameter sweep and persist one CSV row per (value, scheme)."""
    config = obj["config"]
    sweep_cfg = dict(config.get("sweep", {}))
    if param is not None:
        sweep_cfg["param"] = param
    if "param" not in sweep_cfg:
        raise click.UsageError("sweep needs --param or a 'sweep.param' config key")
    sweep_cfg.setdefault("values", harness.DEFAULT_SWEEP_VALUES[sweep_cfg["param"]])
    sweep_cfg.setdefault("schemes", list(harness.SCHEMES))
    sweep_cfg.setdefault("seed", config.get("seed", 0))
    payload = dict(obj["ref"])
    payload["sweep"] = sweep_cfg
    payload["epsilon"] = epsilon if epsilon is not None else obj["epsilon"]
    with _client(obj["server"]) as client:
        doc = _post(client, "/sweep", payload)
    base = _base_instance(obj)
    rows = [
        harness.ResultRow(
            param=r["param"],
            value=r["value"],
            scheme=r["scheme"],
            instance=harness.apply_sweep_value(base, r["param"], r["value"]),
            total_T=r["total_T"],
            omega=tuple(r["omega"]),
            energies=tuple(r["energies"]),
            t_c=r["t_c"],
            t_n=tuple(r["t_n"]),
            iterations=r["iterations"],
            gap=r["gap"],
        )
        for r in doc["rows"]
    ]
    harness.write_csv(harness.SweepResult(rows=rows), out_path)
    for scheme_name, gap in sorted(doc["mean_gaps_percent"].items()):
        click.echo(f"mean gap vs proposed: {scheme_name} {gap:+.2f}%")
    for item in doc.get("skipped", []):
        click.echo(f"skipped: {item}", err=True)
    click.echo(f"wrote {len(rows)} rows to {out_path}")


def _base_instance(obj):
    from .model import ProblemInstance

    ref = obj["ref"]
    if "preset" in ref:
        return harness.PRESETS[ref["preset"]]
    return ProblemInstance.from_json_dict(ref["instance"])


@main.command()
@click.argument("solution_file", type=click.Path(exists=True))
@click.pass_obj
def check(obj, solution_file):
    """Validate every row of a persisted sweep CSV."""
    base = _base_instance(obj)
    rows = harness.load_rows(solution_file, base)
    payload = dict(obj["ref"])
    payload["rows"] = [
        {
            "param": r.param,
            "value": r.value,
            "scheme": r.scheme,
            "total_T": r.total_T,
            "omega": list(r.omega),
            "energies": list(r.energies),
            "t_c": r.t_c,
            "t_n": list(r.t_n),
            "iterations": r.iterations,
            "gap": r.gap,
        }
        for r in rows
    ]
    with _client(obj["server"]) as client:
        doc = _post(client, "/check", payload)
    for row in doc["rows"]:
        for violation in row["violations"]:
            click.echo(
                f"row {row['index']}: {violation['name']} "
                f"residual={violation['residual']}", err=True,
            )
    if doc["all_passed"]:
        click.echo(f"all {len(rows)} rows passed validation")
    else:
        click.echo("validation failed", err=True)
        sys.exit(1)


@main.command()
@click.option("--grid-step", type=float, default=0.02, show_default=True)
@click.pass_obj
def oracle(obj, grid_step):
    """Brute-force grid search over the allocation simplex."""
    payload = dict(obj["ref"])
    payload["grid_step"] = grid_step
    with _client(obj["server"]) as client:
        doc = _post(client, "/oracle", payload)
    click.echo(json.dumps(doc, indent=2, sort_keys=True))


@main.command()
@click.option("--epsilon", type=float, default=None)
@click.pass_obj
def trace(obj, epsilon):
    """Print the outer-approximation iteration log."""
    payload = dict(obj["ref"])
    payload["epsilon"] = epsilon if epsilon is not None else obj["epsilon"]
    with _client(obj["server"]) as client:
        doc = _post(client, "/trace", payload)
    click.echo("iteration,cbv,lower_bound")
    for row in doc["rows"]:
        click.echo(f"{row['iteration']},{row['cbv']!r},{row['lower_bound']!r}")
    report = doc["report"]
    click.echo(f"final T={report['total_T']} gap={report['gap']}")


if __name__ == "__main__":
    main()
