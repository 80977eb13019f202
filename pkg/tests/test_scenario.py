import pytest

from datagravity.engines.placement import PlacementOptimizer
from datagravity.utils.errors import ScenarioError
from datagravity.utils.scenario import (
    Scenario,
    dump_scenario,
    load_profile,
    parse_scenario,
    parse_scenario_text,
    to_pj,
)
from datagravity.utils.types import ComputeKernel, TechProfile

MINIMAL = """
version: 1
profile:
  label: ddr5
  e_compute_pj: 1.31
  alpha: 2.03125e-7
  beta: 2.0
"""


def test_minimal_profile_only_file(write_scenario):
    scenario = parse_scenario(write_scenario(MINIMAL))
    assert scenario.objects == []
    assert scenario.kernels == []
    assert scenario.region is None
    assert scenario.profile.label == "ddr5"
    assert scenario.profile.e_compute == pytest.approx(1.31e-12, rel=1e-12)
    assert scenario.profile.bits_per_access == 64


def test_load_profile(write_scenario):
    profile = load_profile(write_scenario(MINIMAL))
    assert isinstance(profile, TechProfile)
    assert profile.alpha == 2.03125e-7


def test_two_object_scenario(two_object_scenario):
    scenario = parse_scenario(two_object_scenario)
    assert [obj.id for obj in scenario.objects] == ["left", "right"]
    assert scenario.kernels[0].traffic == {"left": 1.0, "right": 3.0}
    problem = scenario.placement_problem()
    assert problem.slot_positions().shape == (2, 3)


def test_missing_file_is_reported(tmp_path):
    with pytest.raises(ScenarioError, match="cannot read scenario file"):
        parse_scenario(tmp_path / "absent.yaml")


def test_empty_file():
    with pytest.raises(ScenarioError, match="empty scenario file"):
        parse_scenario_text("")


def test_malformed_yaml_reports_line():
    with pytest.raises(ScenarioError) as info:
        parse_scenario_text("version: 1\nprofile: [unclosed\n")
    assert info.value.line is not None


def test_unknown_key_reports_name_and_line():
    text = MINIMAL.lstrip() + "  colour: blue\n"
    with pytest.raises(ScenarioError) as info:
        parse_scenario_text(text)
    assert info.value.key == "colour"
    assert info.value.line == 7
    assert "[key 'colour', line 7]" in str(info.value)


def test_all_missing_keys_reported_together():
    with pytest.raises(ScenarioError) as info:
        parse_scenario_text("version: 1\nprofile:\n  label: x\n  beta: 2.0\n")
    assert "e_compute_pj, alpha" in str(info.value)
    assert info.value.key == "e_compute_pj"


def test_unsupported_version():
    with pytest.raises(ScenarioError) as info:
        parse_scenario_text(MINIMAL.replace("version: 1", "version: 2"))
    assert info.value.key == "version"
    assert info.value.line == 2


def test_unknown_object_reference_names_both_ids():
    text = MINIMAL + """
objects:
  - {id: table, position: [0, 0, 0], entropy_per_access: 64, access_frequency: 10}
kernels:
  - id: scan
    traffic: {table: 5, index: 2}
"""
    with pytest.raises(ScenarioError) as info:
        parse_scenario_text(text)
    message = str(info.value)
    assert "'scan'" in message and "'index'" in message
    assert info.value.line == 13


def test_exponent_strings_are_numbers():
    text = MINIMAL.replace("alpha: 2.03125e-7", "alpha: 1e-6")
    assert parse_scenario_text(text).profile.alpha == 1e-6


def test_invalid_beta_is_a_scenario_error():
    with pytest.raises(ScenarioError, match="beta"):
        parse_scenario_text(MINIMAL.replace("beta: 2.0", "beta: 0.8"))


def test_duplicate_key():
    with pytest.raises(ScenarioError, match="duplicate key"):
        parse_scenario_text(MINIMAL + "profile: {}\n")


def test_slots_need_region():
    with pytest.raises(ScenarioError, match="slots need a region"):
        parse_scenario_text(MINIMAL + "slots:\n  - [0, 0, 0]\n")


def test_placement_needs_region_and_kernels(write_scenario):
    scenario = parse_scenario(write_scenario(MINIMAL))
    with pytest.raises(ScenarioError, match="region"):
        scenario.placement_problem()


def test_slot_outside_region_rejected_when_building_problem(two_object_scenario):
    scenario = parse_scenario(two_object_scenario)
    moved = scenario.model_copy(update={"slots": [(9.0, 0.0, 0.0)]})
    with pytest.raises(ScenarioError, match="outside the region"):
        moved.placement_problem()


@pytest.mark.parametrize("seed", range(25))
def test_round_trip_over_random_scenarios(seed):
    problem = PlacementOptimizer.random_problem(seed, n_objects=1 + seed % 5, n_kernels=seed % 4, n_slots=seed % 3)
    scenario = Scenario.from_problem(problem)
    assert parse_scenario_text(dump_scenario(scenario)) == scenario


def test_round_trip_keeps_kernel_start_positions(two_object_scenario):
    scenario = parse_scenario(two_object_scenario)
    kernel = ComputeKernel(id="probe", traffic={"left": 2.0}, position=(0.5, 0.25, -0.125))
    extended = scenario.model_copy(update={"kernels": scenario.kernels + [kernel]})
    assert parse_scenario_text(dump_scenario(extended)) == extended


@pytest.mark.parametrize("joules", [1.31e-12, 2e-17, 4e-12, 1300e-12, 3.7e-12])
def test_picojoule_conversion(joules):
    assert to_pj(joules) == pytest.approx(joules / 1e-12, rel=1e-15)


def test_unit_picojoule_round_trips_exactly():
    assert to_pj(1e-12) == 1.0
