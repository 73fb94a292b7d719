"""End-to-end scenario evaluation.

A scenario bundles a domain, boundary data, and a coefficient family.
The pipeline solves the Dirichlet problem, extracts interior critical
points with multiplicities, measures the component structure of the
critical levels, and then evaluates the counting relation that the
boundary data's extremum pattern selects.  The outcome is one of

    HOLDS       the predicted count matches the measured one
    VIOLATED    the counts disagree and nothing about the run is suspect
    DEGENERATE  some reading was unreliable (critical point too close to
                the boundary, winding that never settled, critical
                values that refuse to group, a profile or level too
                degenerate to classify)

For the linear family a closed-form solution is available, and a
violation is only reported when that independent route confirms the
measured counts; otherwise the disagreement itself is flagged.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

import numpy as np

from .boundary import (
    BoundaryExtremaSummary,
    BoundaryProfile,
    ScenarioClass,
    classify_scenario,
    count_extrema,
)
from .critical import (
    INTERIOR_EXTREMUM,
    NEAR_BOUNDARY,
    WINDING_UNCERTAIN,
    CriticalPointReport,
    extract_critical_points,
)
from .errors import CritcountError, SplitLevelsError
from .levelset import (
    SUB,
    SUPER,
    check_counting_identity,
    critical_clusters,
    default_band_delta,
    level_components,
)
from .mesh import MeshedDomain, build_annulus_mesh, build_disk_mesh
from .oracle import (
    OracleReport,
    annulus_harmonic,
    disk_harmonic,
    oracle_critical_points,
)
from .solver import (
    LAPLACE,
    MINIMAL_SURFACE,
    SolveResult,
    boundary_values_from_profile,
    family_by_name,
    solve_dirichlet,
)

HOLDS = "HOLDS"
VIOLATED = "VIOLATED"
DEGENERATE = "DEGENERATE"

SPLIT_LEVELS = "SPLIT_LEVELS"
DEGENERATE_CLASS = "DEGENERATE_CLASS"
BOUNDARY_CRITICAL = "BOUNDARY_CRITICAL"
ORACLE_DISAGREEMENT = "ORACLE_DISAGREEMENT"

DEGENERACY_FLAGS = frozenset(
    {
        SPLIT_LEVELS,
        DEGENERATE_CLASS,
        BOUNDARY_CRITICAL,
        ORACLE_DISAGREEMENT,
        NEAR_BOUNDARY,
        WINDING_UNCERTAIN,
        INTERIOR_EXTREMUM,
    }
)

INEQ_1_3 = "INEQ_1_3"
EQ_1_4 = "EQ_1_4"
INEQ_1_6 = "INEQ_1_6"
EQ_1_7_OR_1_8 = "EQ_1_7_OR_1_8"
INEQ_1_9 = "INEQ_1_9"
EQ_1_10_OR_1_11 = "EQ_1_10_OR_1_11"
COR_2_5 = "COR_2_5"
COR_3_6 = "COR_3_6"
COR_3_7 = "COR_3_7"
COR_4_6 = "COR_4_6"

RELATION_IDS = (
    INEQ_1_3,
    EQ_1_4,
    INEQ_1_6,
    EQ_1_7_OR_1_8,
    INEQ_1_9,
    EQ_1_10_OR_1_11,
    COR_2_5,
    COR_3_6,
    COR_3_7,
    COR_4_6,
)

EQUALITY_RELATIONS = frozenset(
    {EQ_1_4, EQ_1_7_OR_1_8, EQ_1_10_OR_1_11, COR_2_5, COR_3_6, COR_3_7, COR_4_6}
)


@dataclass(frozen=True)
class ScenarioSpec:
    """Serializable description of one verification run."""

    name: str
    domain_kind: str
    outer_radius: float
    h: float
    cos_coeffs: tuple[float, ...]
    sin_coeffs: tuple[float, ...] = ()
    inner_radius: float | None = None
    inner_value: float | None = None
    family: str = LAPLACE
    grad_tol: float | None = None
    merge_radius: float | None = None

    def __post_init__(self) -> None:
        if self.domain_kind not in ("disk", "annulus"):
            raise ValueError(f"unknown domain kind {self.domain_kind!r}")
        if self.domain_kind == "annulus":
            if self.inner_radius is None or self.inner_value is None:
                raise ValueError(
                    "an annulus scenario needs inner_radius and inner_value"
                )
            if not 0.0 < self.inner_radius < self.outer_radius:
                raise ValueError("inner_radius must sit strictly inside outer_radius")
        elif self.inner_radius is not None or self.inner_value is not None:
            raise ValueError("inner_radius and inner_value only apply to an annulus")
        if self.family not in (LAPLACE, MINIMAL_SURFACE):
            raise ValueError(f"scenario family must be one of LAPLACE, MINIMAL_SURFACE")

    def profile(self) -> BoundaryProfile:
        return BoundaryProfile(self.cos_coeffs, self.sin_coeffs)

    def build_mesh(self) -> MeshedDomain:
        if self.domain_kind == "disk":
            return build_disk_mesh(self.outer_radius, self.h)
        if self.domain_kind == "annulus":
            if self.inner_radius is None:
                raise ValueError("an annulus needs inner_radius")
            return build_annulus_mesh(self.inner_radius, self.outer_radius, self.h)
        raise ValueError(f"unknown domain kind {self.domain_kind!r}")

    def to_dict(self) -> dict:
        domain: dict = {"kind": self.domain_kind, "outer_radius": self.outer_radius}
        if self.domain_kind == "annulus":
            domain["inner_radius"] = self.inner_radius
        boundary: dict = {"cos": list(self.cos_coeffs), "sin": list(self.sin_coeffs)}
        if self.inner_value is not None:
            boundary["inner_value"] = self.inner_value
        out: dict = {
            "name": self.name,
            "domain": domain,
            "h": self.h,
            "boundary": boundary,
            "family": self.family,
        }
        tolerances = {}
        if self.grad_tol is not None:
            tolerances["grad_tol"] = self.grad_tol
        if self.merge_radius is not None:
            tolerances["merge_radius"] = self.merge_radius
        if tolerances:
            out["tolerances"] = tolerances
        return out

    @staticmethod
    def from_dict(data: dict) -> "ScenarioSpec":
        domain = data["domain"]
        boundary = data["boundary"]
        tolerances = data.get("tolerances", {})
        return ScenarioSpec(
            name=data.get("name", "scenario"),
            domain_kind=domain["kind"],
            outer_radius=float(domain["outer_radius"]),
            inner_radius=(
                float(domain["inner_radius"]) if "inner_radius" in domain else None
            ),
            h=float(data["h"]),
            cos_coeffs=tuple(float(c) for c in boundary.get("cos", [])),
            sin_coeffs=tuple(float(s) for s in boundary.get("sin", [])),
            inner_value=(
                float(boundary["inner_value"]) if "inner_value" in boundary else None
            ),
            family=data.get("family", LAPLACE),
            grad_tol=(
                float(tolerances["grad_tol"]) if "grad_tol" in tolerances else None
            ),
            merge_radius=(
                float(tolerances["merge_radius"])
                if "merge_radius" in tolerances
                else None
            ),
        )

    @staticmethod
    def from_json(text: str) -> "ScenarioSpec":
        return ScenarioSpec.from_dict(json.loads(text))


def select_relation(scenario_class: ScenarioClass, summary: BoundaryExtremaSummary) -> str:
    """Pick the counting relation that the extremum pattern promises."""
    if scenario_class == ScenarioClass.SIMPLY_CONNECTED:
        if summary.n_local_max == 1:
            return COR_2_5
        if summary.all_extrema_global:
            return EQ_1_4
        return INEQ_1_3
    if scenario_class == ScenarioClass.PSI_GE_H:
        if summary.n_local_max == 1:
            return COR_3_6
        if summary.all_extrema_global:
            return EQ_1_7_OR_1_8
        return INEQ_1_6
    if scenario_class == ScenarioClass.PSI_LE_H:
        return COR_3_7
    if summary.n_local_max == 1:
        return COR_4_6
    if summary.all_extrema_global:
        return EQ_1_10_OR_1_11
    return INEQ_1_9


def evaluate_relation(
    relation: str, summary: BoundaryExtremaSummary, report: CriticalPointReport
) -> tuple[bool, str]:
    """Check the selected relation against the measured multiplicities.

    Returns (holds, statement), where the statement spells out the
    comparison with the numbers filled in.
    """
    sum_m = report.sum_multiplicity
    interior = [r for r in report.records if r.is_interior]
    n_records = len(interior)
    if relation == INEQ_1_3:
        n = summary.n_local_max
        return sum_m + 1 <= n, f"sum_m + 1 = {sum_m + 1} <= N_local_max = {n}"
    if relation == EQ_1_4:
        n = summary.n_global_max
        return sum_m + 1 == n, f"sum_m + 1 = {sum_m + 1} == N_global_max = {n}"
    if relation == COR_2_5:
        return n_records == 0, f"interior critical points = {n_records} == 0"
    if relation == INEQ_1_6 or relation == INEQ_1_9:
        n = summary.n_local_max
        return sum_m <= n, f"sum_m = {sum_m} <= N_local_max = {n}"
    if relation == EQ_1_7_OR_1_8 or relation == EQ_1_10_OR_1_11:
        n = summary.n_global_max
        ok = sum_m in (n, n - 1)
        return ok, f"sum_m = {sum_m} in {{{n}, {n - 1}}} (N_global_max = {n})"
    if relation == COR_3_6 or relation == COR_4_6:
        ok = n_records == 0 or (n_records == 1 and interior[0].multiplicity == 1)
        return ok, (
            f"interior critical points = {n_records}, "
            "at most one simple saddle expected"
        )
    if relation == COR_3_7:
        if summary.n_local_min == 1:
            ok = n_records == 0 or (n_records == 1 and interior[0].multiplicity <= 1)
            return ok, (
                f"interior critical points = {n_records}, "
                "at most one simple saddle expected (single minimum)"
            )
        if summary.all_extrema_global:
            n = summary.n_global_min
            ok = sum_m in (n, n - 1)
            return ok, f"sum_m = {sum_m} in {{{n}, {n - 1}}} (N_global_min = {n})"
        n = summary.n_local_min
        return sum_m <= n, f"sum_m = {sum_m} <= N_local_min = {n}"
    raise ValueError(f"unknown relation {relation!r}")


def group_records_by_value(records, tol: float) -> list[list[int]]:
    """Indices of records grouped by critical value, single linkage."""
    if not records:
        return []
    order = sorted(range(len(records)), key=lambda i: records[i].value)
    groups = [[order[0]]]
    for i in order[1:]:
        if records[i].value - records[groups[-1][-1]].value <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _level_entry(
    mesh: MeshedDomain,
    values: np.ndarray,
    records: list,
    band_delta: float,
) -> dict:
    level = float(np.mean([r.value for r in records]))
    sum_m = sum(r.multiplicity for r in records)
    pts = np.array([[r.x, r.y] for r in records])
    superset = level_components(mesh, values, level, SUPER, band_delta)
    subset = level_components(mesh, values, level, SUB, band_delta)
    clusters = critical_clusters(mesh, values, level, pts, band_delta)
    entry = {
        "level": level,
        "sum_m": sum_m,
        "q": clusters.q,
        "m1": superset.n_components,
        "m2": subset.n_components,
    }
    if mesh.kind == "disk":
        # the component-counting identity is specific to simply connected
        # domains; on an annulus the collar changes the bookkeeping
        identity = check_counting_identity(
            superset.n_components, subset.n_components, sum_m, clusters.q
        )
        entry["identity"] = identity.to_dict()
    else:
        entry["case_check"] = _annulus_case_check(subset, sum_m, clusters.q)
    return entry


def _annulus_case_check(subset, sum_m: int, q: int) -> dict:
    """Structure of the sublevel components on an annulus at a critical
    level: with only the expected collar around the inner circle absent
    from the outer contact (case 1), the simply connected components
    meeting the outer circle admit an exact count."""
    collars = [
        c for c in subset.components if c.touches_inner and not c.touches_outer
    ]
    islands = [
        c for c in subset.components if not c.touches_inner and not c.touches_outer
    ]
    spanning = [c for c in subset.components if c.touches_inner and c.touches_outer]
    case1 = (
        len(islands) == 0
        and len(spanning) == 0
        and len(collars) == 1
        and collars[0].euler_characteristic == 0
    )
    out = {"case": 1 if case1 else 2}
    if case1:
        count = sum(
            1 for c in subset.components if c.simply_connected and c.touches_outer
        )
        out["sc_meeting_outer"] = count
        out["expected"] = sum_m + q - 1
        out["matches"] = count == sum_m + q - 1
    return out


def _compare_with_oracle(
    oracle: OracleReport, report: CriticalPointReport, h: float
) -> dict:
    """Position and multiplicity match between the closed-form critical
    points and the measured ones."""
    fe = [r for r in report.records if r.is_interior]
    used = set()
    pairs = []
    matched = True
    for pt in oracle.interior:
        best, best_d = None, np.inf
        for i, r in enumerate(fe):
            if i in used:
                continue
            d = float(np.hypot(r.x - pt.x, r.y - pt.y))
            if d < best_d:
                best, best_d = i, d
        if best is None or best_d > 5.0 * h:
            matched = False
            pairs.append({"oracle": [pt.x, pt.y], "matched": None, "distance": None})
            continue
        used.add(best)
        r = fe[best]
        ok = r.multiplicity == pt.multiplicity
        matched = matched and ok
        pairs.append(
            {
                "oracle": [pt.x, pt.y],
                "matched": [r.x, r.y],
                "distance": best_d,
                "oracle_multiplicity": pt.multiplicity,
                "measured_multiplicity": r.multiplicity,
                "multiplicity_match": ok,
            }
        )
    unmatched_fe = [i for i in range(len(fe)) if i not in used]
    if unmatched_fe:
        matched = False
    return {
        "checked": True,
        "matched": matched,
        "oracle_sum_m": oracle.sum_multiplicity,
        "measured_sum_m": report.sum_multiplicity,
        "boundary_roots": len(oracle.boundary),
        "pairs": pairs,
        "unmatched_measured": [
            {"x": fe[i].x, "y": fe[i].y, "multiplicity": fe[i].multiplicity}
            for i in unmatched_fe
        ],
    }


@dataclass
class VerdictReport:
    scenario: dict
    scenario_class: str | None
    relation: str | None
    n_local_max: int | None
    n_global_max: int | None
    sum_m: int | None
    q_per_level: list = field(default_factory=list)
    verdict: str = DEGENERATE
    flags: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    statement: str | None = None

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "class": self.scenario_class,
            "relation": self.relation,
            "N_local_max": self.n_local_max,
            "N_global_max": self.n_global_max,
            "sum_m": self.sum_m,
            "q_per_level": self.q_per_level,
            "verdict": self.verdict,
            "flags": self.flags,
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def oracle_for(spec: ScenarioSpec):
    profile = spec.profile()
    if spec.domain_kind == "disk":
        return disk_harmonic(profile, spec.outer_radius)
    return annulus_harmonic(
        profile, spec.inner_radius, spec.outer_radius, spec.inner_value
    )


def solve_scenario(spec: ScenarioSpec) -> SolveResult:
    mesh = spec.build_mesh()
    profile = spec.profile()
    bv = boundary_values_from_profile(mesh, profile, spec.inner_value)
    return solve_dirichlet(mesh, bv, family_by_name(spec.family))


def analyze_scenario(spec: ScenarioSpec) -> VerdictReport:
    """Run the full pipeline on one scenario and report the verdict."""
    report = VerdictReport(scenario=spec.to_dict(), scenario_class=None, relation=None,
                           n_local_max=None, n_global_max=None, sum_m=None)
    profile = spec.profile()
    try:
        summary = count_extrema(profile)
        scenario_class = classify_scenario(
            spec.domain_kind, summary, inner_value=spec.inner_value
        )
    except CritcountError as exc:
        report.flags = [DEGENERATE_CLASS]
        report.verdict = DEGENERATE
        report.provenance = {"h": spec.h, "tolerances": {}, "oracle_agreement": {"checked": False},
                             "error": {"kind": exc.kind, "message": str(exc)}}
        return report

    report.scenario_class = scenario_class.value
    report.n_local_max = summary.n_local_max
    report.n_global_max = summary.n_global_max
    relation = select_relation(scenario_class, summary)
    report.relation = relation

    solved = solve_scenario(spec)
    mesh = solved.mesh
    cp = extract_critical_points(
        solved, grad_tol=spec.grad_tol, merge_radius=spec.merge_radius
    )
    report.sum_m = cp.sum_multiplicity

    flags = set()
    for r in cp.records:
        flags.update(r.flags)

    band_delta = default_band_delta(solved.values)
    group_tol = 10.0 * band_delta
    interior = [r for r in cp.records if r.is_interior]
    groups = group_records_by_value(interior, group_tol)
    if len(groups) > 1 and relation in EQUALITY_RELATIONS:
        flags.add(SPLIT_LEVELS)

    q_per_level = []
    for g in groups:
        try:
            q_per_level.append(
                _level_entry(mesh, solved.values, [interior[i] for i in g], band_delta)
            )
        except SplitLevelsError:
            flags.add(SPLIT_LEVELS)
    report.q_per_level = q_per_level

    oracle_agreement: dict = {"checked": False}
    oracle_report = None
    if spec.family == LAPLACE:
        oracle_report = oracle_critical_points(oracle_for(spec))
        oracle_agreement = _compare_with_oracle(oracle_report, cp, mesh.h)
        if oracle_report.boundary:
            flags.add(BOUNDARY_CRITICAL)
        if not oracle_agreement["matched"]:
            flags.add(ORACLE_DISAGREEMENT)

    holds, statement = evaluate_relation(relation, summary, cp)
    report.statement = statement

    degeneracy = sorted(flags & DEGENERACY_FLAGS)
    if degeneracy:
        report.verdict = DEGENERATE
    elif holds:
        report.verdict = HOLDS
    else:
        # a violation of the linear theory needs the closed-form solution
        # to agree before it is believed
        if oracle_report is not None and oracle_agreement["matched"]:
            report.verdict = VIOLATED
        elif oracle_report is None:
            report.verdict = VIOLATED
        else:
            flags.add(ORACLE_DISAGREEMENT)
            report.verdict = DEGENERATE

    report.flags = sorted(flags)
    report.provenance = {
        "h": mesh.h,
        "tolerances": {
            "grad_tol": cp.grad_tol,
            "merge_radius": cp.merge_radius,
            "band_delta": band_delta,
            "value_group_tol": group_tol,
            "newton_tol": 1e-10,
            "oracle_boundary_tol": 1e-8,
        },
        "oracle_agreement": oracle_agreement,
        "statement": statement,
        "records": [r.to_dict() for r in cp.records],
        "dropped_candidates": [[p[0], p[1]] for p in cp.dropped],
        "extrema": {
            "n_local_max": summary.n_local_max,
            "n_global_max": summary.n_global_max,
            "n_local_min": summary.n_local_min,
            "n_global_min": summary.n_global_min,
            "z_min": summary.z_min,
            "z_max": summary.z_max,
        },
        "newton": {
            "converged": solved.newton.converged,
            "iterations": solved.newton.iterations,
            "residual_norms": list(solved.newton.residual_norms),
            "step_sizes": list(solved.newton.step_sizes),
        },
        "mesh": {
            "num_vertices": mesh.num_vertices,
            "num_triangles": mesh.num_triangles,
        },
    }
    return report


def verdict_exit_code(reports: list[VerdictReport]) -> int:
    if any(r.verdict == VIOLATED for r in reports):
        return 1
    if any(r.verdict == DEGENERATE for r in reports):
        return 2
    return 0


def run_suite(specs: list[ScenarioSpec]) -> tuple[list[VerdictReport], int]:
    reports = [analyze_scenario(s) for s in specs]
    return reports, verdict_exit_code(reports)


def sweep_parameter(
    base: ScenarioSpec, parameter: str, values: list[float]
) -> list[dict]:
    """Re-run one scenario while varying a single numeric parameter."""
    allowed = {"h", "outer_radius", "inner_radius", "inner_value", "grad_tol", "merge_radius"}
    if parameter not in allowed:
        raise ValueError(f"parameter must be one of {sorted(allowed)}")
    out = []
    for v in values:
        spec = dataclasses.replace(
            base, **{parameter: float(v), "name": f"{base.name}[{parameter}={v}]"}
        )
        rep = analyze_scenario(spec)
        out.append(
            {
                "value": float(v),
                "verdict": rep.verdict,
                "sum_m": rep.sum_m,
                "relation": rep.relation,
                "flags": rep.flags,
            }
        )
    return out
