"""Scenario validation, normalization and file round-trips."""

import pytest

from conftest import make_scenario, noise_off_calibration
from inspectsim.domain import (
    Calibration,
    Item,
    Person,
    Scenario,
    ScenarioError,
    Switches,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
    validate_scenario,
)
from inspectsim.policy import InspectionPolicy, PolicyKind


def test_empty_person_pool_rejected():
    scenario = Scenario(items=[Item(id="i1", size_loc=100)], persons=[])
    with pytest.raises(ScenarioError, match="empty person pool"):
        validate_scenario(scenario)


def test_empty_item_list_rejected():
    scenario = Scenario(items=[], persons=[Person(id="p1")])
    with pytest.raises(ScenarioError, match="empty item list"):
        validate_scenario(scenario)


def test_valid_scenario_with_20_replications_passes():
    scenario = make_scenario(replications=20)
    assert scenario.replications == 20
    # Validation is idempotent once normalized.
    assert validate_scenario(scenario) == scenario


def test_zero_complexity_error_names_the_item():
    scenario = Scenario(
        items=[Item(id="good", size_loc=100), Item(id="bad", size_loc=100, complexity=0.0)],
        persons=[Person(id="p1")],
    )
    with pytest.raises(ScenarioError, match="item bad") as excinfo:
        validate_scenario(scenario)
    assert excinfo.value.field == "complexity"


@pytest.mark.parametrize("field,value", [("size_loc", 0), ("size_loc", -5)])
def test_nonpositive_size_rejected(field, value):
    scenario = Scenario(items=[Item(id="i1", size_loc=value)], persons=[Person(id="p1")])
    with pytest.raises(ScenarioError, match="size_loc"):
        validate_scenario(scenario)


def test_duplicate_ids_rejected():
    scenario = Scenario(
        items=[Item(id="i1", size_loc=10), Item(id="i1", size_loc=20)],
        persons=[Person(id="p1")],
    )
    with pytest.raises(ScenarioError, match="duplicate item id"):
        validate_scenario(scenario)


def test_person_defaults_filled_from_calibration():
    scenario = Scenario(
        items=[Item(id="i1", size_loc=100)],
        persons=[Person(id="p1")],
        calibration=Calibration(nominal_coding_productivity=30.0, nominal_inspection_rate=80.0),
        policy=InspectionPolicy(kind=PolicyKind.NONE),
    )
    validated = validate_scenario(scenario)
    person = validated.persons[0]
    assert person.coding_productivity == 30.0
    assert person.inspection_productivity == 80.0
    assert person.experience_coding == validated.calibration.learning_midpoint
    assert person.fatigue_sigma == pytest.approx(0.08)


def test_policy_defaults_filled_from_calibration():
    scenario = make_scenario(n_persons=5, policy_kind=PolicyKind.DENSITY_THRESHOLD)
    scenario.policy.threshold = None
    scenario.policy.team_size = None
    validated = validate_scenario(scenario)
    assert validated.policy.threshold == scenario.calibration.inspection_threshold_density
    assert validated.policy.team_size == scenario.calibration.team_size


def test_team_size_must_leave_room_for_the_author():
    scenario = Scenario(
        items=[Item(id="i1", size_loc=100)],
        persons=[Person(id=f"p{k}") for k in range(20)],
        policy=InspectionPolicy(kind=PolicyKind.ALL, team_size=20),
    )
    with pytest.raises(ScenarioError, match="team of 20"):
        validate_scenario(scenario)
    # With inspections off the same team size is irrelevant and passes.
    scenario.switches = Switches(inspection_on=False)
    validate_scenario(scenario)


def test_rework_injection_rate_must_converge():
    with pytest.raises(ScenarioError, match="rework_injection_rate"):
        make_scenario(calibration=noise_off_calibration(rework_injection_rate=1.0))


def test_invalid_distribution_spec_reported():
    calib = Calibration(distribution_table={"fatigue": {"dist": "exotic"}})
    scenario = Scenario(
        items=[Item(id="i1", size_loc=100)], persons=[Person(id="p1")], calibration=calib
    )
    with pytest.raises(ScenarioError, match="distribution_table.fatigue"):
        validate_scenario(scenario)


def test_serialization_round_trip_is_identity(tmp_path):
    scenario = make_scenario(n_items=4, n_persons=3, noise=True, replications=5)
    path = tmp_path / "scenario.json"
    save_scenario(scenario, path)
    loaded = validate_scenario(load_scenario(path))
    assert loaded == scenario


def test_round_trip_preserves_policy_and_switches():
    scenario = make_scenario(n_persons=4)
    scenario.policy = InspectionPolicy(
        kind=PolicyKind.SIZE_THRESHOLD, threshold=250.0, team_size=1
    )
    scenario.switches.test_on = False
    scenario = validate_scenario(scenario)
    again = validate_scenario(scenario_from_dict(scenario_to_dict(scenario)))
    assert again.policy.kind == PolicyKind.SIZE_THRESHOLD
    assert again.policy.threshold == 250.0
    assert again.switches.test_on is False
    assert again == scenario


def test_unknown_fields_rejected():
    data = scenario_to_dict(make_scenario())
    data["surprise"] = 1
    with pytest.raises(ScenarioError, match="unknown field"):
        scenario_from_dict(data)
    data.pop("surprise")
    data["calibration"]["typo_field"] = 3
    with pytest.raises(ScenarioError, match="typo_field"):
        scenario_from_dict(data)


def test_seed_bounds():
    scenario = make_scenario()
    scenario.seed = -1
    with pytest.raises(ScenarioError, match="seed"):
        validate_scenario(scenario)
    scenario.seed = 2**64
    with pytest.raises(ScenarioError, match="seed"):
        validate_scenario(scenario)


def test_replications_must_be_positive_int():
    scenario = make_scenario()
    scenario.replications = 0
    with pytest.raises(ScenarioError, match="replications"):
        validate_scenario(scenario)
