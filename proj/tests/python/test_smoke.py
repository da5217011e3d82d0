import os
from pathlib import Path

import pytest

import adha

FIXTURES = Path(os.environ.get("ADHA_FIXTURE_DIR", Path(__file__).resolve().parents[2] / "fixtures"))


@pytest.fixture(scope="module")
def medical():
    return (
        adha.load_program(str(FIXTURES / "medical.program.json")),
        adha.load_architecture(str(FIXTURES / "medical.arch.json")),
        adha.load_profile(str(FIXTURES / "medical.profile.json")),
    )


def test_layout_round_trip():
    layout = adha.Layout.parse("{A,B}|{C}")
    assert str(layout) == "{A,B}|{C}"
    assert adha.Layout.parse(str(layout)) == layout
    with pytest.raises(adha.InputError):
        adha.Layout.parse("{A,B")


def test_fixture_is_valid(medical):
    program, arch, _ = medical
    assert adha.validate_program(program, arch) == []
    assert program.field_names[:3] == ["V1", "V2", "V3"]


def test_ods_aosu(medical):
    program, arch, _ = medical
    assert str(adha.ods(program, arch, "s5", "cpu")) == "{V1}|{V2}|{V3}|{U1,U2,U3}|{S}|{T}|{interpT}"
    best, cost = adha.brute_force_ods(program, arch, "s5", "cpu")
    assert str(best) == "{V1}|{V2}|{V3}|{U1,U2,U3}|{S}|{T}|{interpT}"
    assert cost == pytest.approx(adha.exec_cost(program, arch, "s5", best, "cpu")["total_ns"])


def test_plan_structure(medical):
    program, arch, profile = medical
    plan = adha.plan(program, arch, profile)
    assert [r["device"] for r in plan["runs"]] == ["cpu", "gpu"]
    assert plan["remaps"][0]["moved"] == ["V1", "V2", "V3"]
    assert "moved {V1,V2,V3}" in adha.explain(program, arch, profile)
    assert len(adha.run_nodes(program, arch, profile)) == 56


def test_profile_precedence(medical):
    program, arch, _ = medical
    layout = adha.ods(program, arch, "s1", "cpu")
    profile = adha.TuningProfile()
    profile.add("s1", "cpu", str(layout), 42.0)
    hit = adha.exec_cost(program, arch, "s1", layout, "cpu", profile)
    assert hit["source"] == "profile" and hit["total_ns"] == 42.0
    assert adha.exec_cost(program, arch, "s1", layout, "cpu")["source"] == "model"


def test_simulator_prefers_clustered_gather(medical):
    program, _, _ = medical
    aos = adha.Layout.parse("{V1}|{V2}|{V3}|{U1,U2,U3}|{S}|{T}|{interpT}")
    soa = adha.Layout.parse("{V1}|{V2}|{V3}|{U1}|{U2}|{U3}|{S}|{T}|{interpT}")
    assert adha.simulate_misses(program, "s5", aos, iters=1024) < adha.simulate_misses(
        program, "s5", soa, iters=1024
    )
