"""Scenario harness: relation selection, evaluation, verdicts, sweeps."""

import dataclasses
import json

import pytest

from critcount.boundary import ScenarioClass
from critcount.critical import CriticalPointRecord, CriticalPointReport
from critcount.harness import (
    DEGENERATE,
    HOLDS,
    VIOLATED,
    ScenarioSpec,
    analyze_scenario,
    evaluate_relation,
    group_records_by_value,
    run_suite,
    select_relation,
    sweep_parameter,
    verdict_exit_code,
)


def make_spec(**overrides):
    base = dict(
        name="tiny",
        domain_kind="disk",
        outer_radius=1.0,
        inner_radius=None,
        h=0.1,
        cos_coeffs=(0.0, 0.0, 1.0),
        sin_coeffs=(0.0, 0.0, 0.0),
        inner_value=None,
        family="LAPLACE",
    )
    base.update(overrides)
    return ScenarioSpec(**base)


@dataclasses.dataclass
class Counts:
    n_local_max: int
    n_global_max: int
    n_local_min: int = 1
    n_global_min: int = 1
    all_extrema_global: bool = False


def test_select_relation_disk():
    assert select_relation(ScenarioClass.SIMPLY_CONNECTED, Counts(1, 1)) == "COR_2_5"
    assert (
        select_relation(ScenarioClass.SIMPLY_CONNECTED, Counts(2, 2, 2, 2, True))
        == "EQ_1_4"
    )
    assert select_relation(ScenarioClass.SIMPLY_CONNECTED, Counts(2, 1)) == "INEQ_1_3"


def test_select_relation_annulus():
    assert select_relation(ScenarioClass.PSI_GE_H, Counts(1, 1)) == "COR_3_6"
    assert (
        select_relation(ScenarioClass.PSI_GE_H, Counts(2, 2, 2, 2, True))
        == "EQ_1_7_OR_1_8"
    )
    assert select_relation(ScenarioClass.PSI_GE_H, Counts(2, 1)) == "INEQ_1_6"
    assert select_relation(ScenarioClass.PSI_LE_H, Counts(2, 2)) == "COR_3_7"
    assert select_relation(ScenarioClass.H_BETWEEN, Counts(1, 1)) == "COR_4_6"
    assert (
        select_relation(ScenarioClass.H_BETWEEN, Counts(2, 2, 2, 2, True))
        == "EQ_1_10_OR_1_11"
    )
    assert select_relation(ScenarioClass.H_BETWEEN, Counts(3, 1)) == "INEQ_1_9"


def fake_report(*mults):
    records = tuple(
        CriticalPointRecord(
            x=0.1 * i,
            y=0.0,
            multiplicity=m,
            degree=-m,
            value=0.0,
            grad_norm=0.0,
            probe_radius=0.1,
            radial_sign_changes=2 * (1 + m),
            cluster_size=1,
            flags=(),
        )
        for i, m in enumerate(mults)
    )
    return CriticalPointReport(records, (), 1e-3, 0.3)


def test_evaluate_relation_truth_table():
    ok, _ = evaluate_relation("INEQ_1_3", Counts(2, 1), fake_report(1))
    assert ok
    ok, _ = evaluate_relation("INEQ_1_3", Counts(2, 1), fake_report(1, 1))
    assert not ok
    ok, _ = evaluate_relation("EQ_1_4", Counts(3, 3, 3, 3, True), fake_report(2))
    assert ok
    ok, _ = evaluate_relation("EQ_1_4", Counts(3, 3, 3, 3, True), fake_report(1))
    assert not ok
    ok, _ = evaluate_relation("EQ_1_7_OR_1_8", Counts(2, 2, 2, 2, True), fake_report(1))
    assert ok
    ok, _ = evaluate_relation("EQ_1_7_OR_1_8", Counts(2, 2, 2, 2, True), fake_report())
    assert not ok
    ok, _ = evaluate_relation("COR_2_5", Counts(1, 1), fake_report())
    assert ok
    ok, _ = evaluate_relation("COR_2_5", Counts(1, 1), fake_report(1))
    assert not ok
    ok, _ = evaluate_relation("COR_3_6", Counts(1, 1), fake_report(1))
    assert ok
    ok, _ = evaluate_relation("COR_3_6", Counts(1, 1), fake_report(2))
    assert not ok


def test_spec_round_trip():
    spec = make_spec(name="rt", domain_kind="annulus", inner_radius=0.5, inner_value=0.2)
    again = ScenarioSpec.from_dict(spec.to_dict())
    assert again == spec
    again = ScenarioSpec.from_json(json.dumps(spec.to_dict()))
    assert again == spec


def test_spec_validation():
    with pytest.raises(ValueError):
        ScenarioSpec.from_dict({"name": "x", "domain": {"kind": "square"}})
    with pytest.raises(ValueError):
        make_spec(family="HEAT")
    with pytest.raises(ValueError):
        make_spec(domain_kind="annulus", inner_radius=None, inner_value=0.0)


class Rec:
    def __init__(self, value):
        self.value = value


def test_group_records_by_value():
    records = [Rec(0.0), Rec(1e-9), Rec(0.5)]
    groups = group_records_by_value(records, 1e-6)
    assert [[records[i].value for i in g] for g in groups] == [[0.0, 1e-9], [0.5]]


def test_analyze_tiny_saddle():
    report = analyze_scenario(make_spec())
    data = report.to_dict()
    assert data["verdict"] == HOLDS
    assert data["relation"] == "EQ_1_4"
    assert data["sum_m"] == 1
    assert data["flags"] == []
    assert set(data.keys()) == {
        "scenario",
        "class",
        "relation",
        "N_local_max",
        "N_global_max",
        "sum_m",
        "q_per_level",
        "verdict",
        "flags",
        "provenance",
    }


def test_analyze_is_deterministic():
    a = analyze_scenario(make_spec()).to_json()
    b = analyze_scenario(make_spec()).to_json()
    assert a == b


def test_oracle_disagreement_goes_degenerate():
    # an absurdly small gradient gate finds nothing; the oracle still
    # sees the saddle, so the mismatch must surface as a degeneracy
    report = analyze_scenario(make_spec(grad_tol=1e-15))
    data = report.to_dict()
    assert data["verdict"] == DEGENERATE
    assert "ORACLE_DISAGREEMENT" in data["flags"]
    assert verdict_exit_code([report]) == 2


def test_violated_beats_degenerate_in_exit_code():
    holds = analyze_scenario(make_spec())
    degenerate = analyze_scenario(make_spec(grad_tol=1e-15))
    violated = analyze_scenario(
        make_spec(
            name="b2",
            domain_kind="annulus",
            outer_radius=2.0,
            inner_radius=1.0,
            h=0.1,
            cos_coeffs=(2.0, 0.0, 1.0),
            inner_value=0.0,
        )
    )
    assert violated.verdict == VIOLATED
    assert verdict_exit_code([holds]) == 0
    assert verdict_exit_code([holds, degenerate]) == 2
    assert verdict_exit_code([holds, degenerate, violated]) == 1


def test_run_suite():
    reports, code = run_suite([make_spec(), make_spec(name="other")])
    assert [r.scenario for r in reports] == ["tiny", "other"]
    assert code == 0


def test_sweep_parameter():
    entries = sweep_parameter(make_spec(), "h", [0.1, 0.08])
    assert len(entries) == 2
    assert [e["value"] for e in entries] == [0.1, 0.08]
    assert all(e["verdict"] == HOLDS for e in entries)
    with pytest.raises(ValueError):
        sweep_parameter(make_spec(), "radius_of_convergence", [1.0])


def test_provenance_contents():
    data = analyze_scenario(make_spec()).to_dict()
    prov = data["provenance"]
    assert prov["oracle_agreement"]["checked"] is True
    assert prov["oracle_agreement"]["matched"] is True
    assert prov["mesh"]["num_vertices"] > 0
    assert prov["newton"]["converged"] is True
    assert isinstance(prov["statement"], str)
