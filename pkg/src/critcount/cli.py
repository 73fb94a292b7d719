"""Command line front end.

Each subcommand reads the same scenario document the HTTP service
accepts.  By default the work runs in-process; with --server the
document is posted to a running service instead and the response is
relayed, so scripts behave the same either way.

Exit codes for verify/analyze: 0 when every relation holds, 1 when any
scenario is a confirmed violation, 2 when any scenario is degenerate
(and none violated), 3 on errors.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from .errors import CritcountError
from .harness import (
    DEGENERATE,
    VIOLATED,
    ScenarioSpec,
    analyze_scenario,
    oracle_for,
    solve_scenario,
    sweep_parameter,
)
from .oracle import oracle_critical_points

ERROR_EXIT = 3


def _read_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _emit(payload: dict | list, output: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


def _post(server: str, endpoint: str, payload: dict) -> dict:
    import httpx

    resp = httpx.post(f"{server.rstrip('/')}{endpoint}", json=payload, timeout=600.0)
    if resp.status_code >= 400:
        raise click.ClickException(f"server returned {resp.status_code}: {resp.text}")
    return resp.json()


def _fail(exc: Exception) -> None:
    kind = getattr(exc, "kind", exc.__class__.__name__)
    click.echo(f"error [{kind}]: {exc}", err=True)
    sys.exit(ERROR_EXIT)


@click.group()
def main() -> None:
    """Critical point counting laboratory for planar Dirichlet problems."""


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write JSON here.")
@click.option("--server", help="Forward to a running service at this base URL.")
@click.option("--include-values", is_flag=True, help="Include the nodal solution values.")
def solve(config: str, output: str | None, server: str | None, include_values: bool) -> None:
    """Solve the Dirichlet problem for one scenario."""
    doc = _read_json(config)
    try:
        if server:
            doc = {**doc, "include_values": include_values}
            _emit(_post(server, "/solve", doc), output)
            return
        spec = ScenarioSpec.from_dict(doc)
        result = solve_scenario(spec)
        payload = {
            "name": spec.name,
            "family": result.family,
            "mesh": {
                "num_vertices": result.mesh.num_vertices,
                "num_triangles": result.mesh.num_triangles,
                "h": result.mesh.h,
            },
            "newton": {
                "converged": result.newton.converged,
                "iterations": result.newton.iterations,
                "residual_norms": list(result.newton.residual_norms),
            },
            "value_range": [float(np.min(result.values)), float(np.max(result.values))],
        }
        if include_values:
            payload["values"] = result.values.tolist()
        _emit(payload, output)
    except (CritcountError, ValueError, OSError) as exc:
        _fail(exc)


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write JSON here.")
@click.option("--server", help="Forward to a running service at this base URL.")
def oracle(config: str, output: str | None, server: str | None) -> None:
    """Closed-form critical points for a linear scenario."""
    doc = _read_json(config)
    try:
        if server:
            _emit(_post(server, "/oracle", doc), output)
            return
        spec = ScenarioSpec.from_dict(doc)
        if spec.family != "LAPLACE":
            raise ValueError("closed-form solutions exist only for LAPLACE")
        report = oracle_critical_points(oracle_for(spec))
        _emit(json.loads(report.to_json()), output)
    except (CritcountError, ValueError, OSError) as exc:
        _fail(exc)


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write JSON here.")
@click.option("--server", help="Forward to a running service at this base URL.")
def analyze(config: str, output: str | None, server: str | None) -> None:
    """Full pipeline on one scenario; exit code reflects the verdict."""
    doc = _read_json(config)
    try:
        if server:
            payload = _post(server, "/analyze", doc)
        else:
            payload = analyze_scenario(ScenarioSpec.from_dict(doc)).to_dict()
    except (CritcountError, ValueError, OSError) as exc:
        _fail(exc)
        return
    _emit(payload, output)
    verdict = payload["verdict"]
    click.echo(f"{payload['scenario'].get('name', 'scenario')}: {verdict}", err=True)
    if verdict == VIOLATED:
        sys.exit(1)
    if verdict == DEGENERATE:
        sys.exit(2)


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write JSON here.")
@click.option("--server", help="Forward to a running service at this base URL.")
def verify(config: str, output: str | None, server: str | None) -> None:
    """Run a suite of scenarios and aggregate the verdicts.

    CONFIG holds either one scenario or {"scenarios": [...]}.
    """
    doc = _read_json(config)
    scenario_docs = doc["scenarios"] if "scenarios" in doc else [doc]
    try:
        if server:
            payload = _post(server, "/verify", {"scenarios": scenario_docs})
            reports = payload["reports"]
            code = payload["exit_code"]
        else:
            reports = []
            for sdoc in scenario_docs:
                reports.append(analyze_scenario(ScenarioSpec.from_dict(sdoc)).to_dict())
            code = 0
            if any(r["verdict"] == VIOLATED for r in reports):
                code = 1
            elif any(r["verdict"] == DEGENERATE for r in reports):
                code = 2
    except (CritcountError, ValueError, OSError) as exc:
        _fail(exc)
        return
    for r in reports:
        name = r["scenario"].get("name", "scenario")
        line = f"{name}: {r['verdict']}"
        if r.get("relation"):
            line += f" (relation {r['relation']}, sum_m {r['sum_m']})"
        click.echo(line)
    if output:
        _emit({"reports": reports, "exit_code": code}, output)
    sys.exit(code)


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write JSON here.")
@click.option("--server", help="Forward to a running service at this base URL.")
def sweep(config: str, output: str | None, server: str | None) -> None:
    """Vary one parameter of a base scenario.

    CONFIG: {"base": <scenario>, "parameter": "h", "values": [...]}.
    """
    doc = _read_json(config)
    try:
        if server:
            payload = _post(server, "/sweep", doc)
        else:
            base = ScenarioSpec.from_dict(doc["base"])
            results = sweep_parameter(base, doc["parameter"], doc["values"])
            payload = {"parameter": doc["parameter"], "results": results}
    except (CritcountError, ValueError, KeyError, OSError) as exc:
        _fail(exc)
        return
    _emit(payload, output)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
