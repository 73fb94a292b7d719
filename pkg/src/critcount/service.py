"""HTTP service exposing the verification pipeline.

Endpoints accept the same scenario document the command line reads, so
a config file can be posted unchanged.  Domain errors map to 422 with
the error kind; anything else is a plain 500.
"""

from __future__ import annotations

import json

from typing import Literal

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .errors import CritcountError
from .harness import (
    ScenarioSpec,
    analyze_scenario,
    oracle_for,
    run_suite,
    solve_scenario,
    sweep_parameter,
)
from .oracle import oracle_critical_points


class DomainModel(BaseModel):
    kind: Literal["disk", "annulus"]
    outer_radius: float = Field(gt=0)
    inner_radius: float | None = Field(default=None, gt=0)


class BoundaryModel(BaseModel):
    cos: list[float] = Field(default_factory=list)
    sin: list[float] = Field(default_factory=list)
    inner_value: float | None = None


class ToleranceModel(BaseModel):
    grad_tol: float | None = Field(default=None, gt=0)
    merge_radius: float | None = Field(default=None, gt=0)


class ScenarioModel(BaseModel):
    name: str = "scenario"
    domain: DomainModel
    h: float = Field(gt=0)
    boundary: BoundaryModel
    family: str = "LAPLACE"
    tolerances: ToleranceModel | None = None

    def to_spec(self) -> ScenarioSpec:
        tol = self.tolerances or ToleranceModel()
        return ScenarioSpec(
            name=self.name,
            domain_kind=self.domain.kind,
            outer_radius=self.domain.outer_radius,
            inner_radius=self.domain.inner_radius,
            h=self.h,
            cos_coeffs=tuple(self.boundary.cos),
            sin_coeffs=tuple(self.boundary.sin),
            inner_value=self.boundary.inner_value,
            family=self.family,
            grad_tol=tol.grad_tol,
            merge_radius=tol.merge_radius,
        )


class SolveRequest(ScenarioModel):
    include_values: bool = False


class SuiteRequest(BaseModel):
    scenarios: list[ScenarioModel]


class SweepRequest(BaseModel):
    base: ScenarioModel
    parameter: str
    values: list[float]


def create_app() -> FastAPI:
    app = FastAPI(title="critcount", version=__version__)

    @app.exception_handler(CritcountError)
    async def _domain_error(request: Request, exc: CritcountError):
        payload = {"kind": exc.kind, "message": str(exc)}
        if hasattr(exc, "partition"):
            payload["partition"] = exc.partition
        return JSONResponse(status_code=422, content=payload)

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=422, content={"kind": "VALUE", "message": str(exc)}
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/solve")
    def solve(req: SolveRequest):
        result = solve_scenario(req.to_spec())
        out = {
            "name": req.name,
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
        if req.include_values:
            out["values"] = result.values.tolist()
        return out

    @app.post("/oracle")
    def oracle(req: ScenarioModel):
        spec = req.to_spec()
        if spec.family != "LAPLACE":
            return JSONResponse(
                status_code=422,
                content={
                    "kind": "VALUE",
                    "message": "closed-form solutions exist only for LAPLACE",
                },
            )
        report = oracle_critical_points(oracle_for(spec))
        return json.loads(report.to_json())

    @app.post("/analyze")
    def analyze(req: ScenarioModel):
        return analyze_scenario(req.to_spec()).to_dict()

    @app.post("/verify")
    def verify(req: SuiteRequest):
        reports, code = run_suite([s.to_spec() for s in req.scenarios])
        return {"reports": [r.to_dict() for r in reports], "exit_code": code}

    @app.post("/sweep")
    def sweep(req: SweepRequest):
        results = sweep_parameter(req.base.to_spec(), req.parameter, req.values)
        return {"parameter": req.parameter, "results": results}

    return app


app = create_app()
