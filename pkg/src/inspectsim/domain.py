"""Entity and configuration types shared by the simulator.

Follows the item / person / process split: items carry size, complexity and
a latent defect ledger; persons carry skills, productivities, experience and
a personal defect generation factor; everything project-wide (rates,
densities, learning and pressure parameters, the distribution store) lives
in ``Calibration``.

Units are fixed package-wide: effort in person-hours, durations in hours,
sizes in LOC, defect densities per KLOC.
"""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

from inspectsim import distributions
from inspectsim.policy import InspectionPolicy, PolicyKind


class Phase(str, Enum):
    QUEUED = "queued"
    CODING = "coding"
    AWAITING_INSPECTION = "awaiting_inspection"
    IN_INSPECTION = "in_inspection"
    IN_REWORK = "in_rework"
    AWAITING_TEST = "awaiting_test"
    IN_TEST = "in_test"
    DONE = "done"


# Legal phase successors.  Skips only happen where a switch or policy
# deactivates the intermediate stages.
ALLOWED_TRANSITIONS: dict[Phase, set[Phase]] = {
    Phase.QUEUED: {Phase.CODING},
    Phase.CODING: {Phase.AWAITING_INSPECTION, Phase.AWAITING_TEST, Phase.DONE},
    Phase.AWAITING_INSPECTION: {Phase.IN_INSPECTION},
    Phase.IN_INSPECTION: {Phase.IN_REWORK, Phase.AWAITING_TEST, Phase.DONE},
    Phase.IN_REWORK: {Phase.AWAITING_TEST, Phase.DONE},
    Phase.AWAITING_TEST: {Phase.IN_TEST},
    Phase.IN_TEST: {Phase.DONE},
    Phase.DONE: set(),
}


class PersonStatus(str, Enum):
    IN_POOL = "in_pool"
    ASSIGNED = "assigned"


class ScenarioError(ValueError):
    """First violated invariant of a scenario, with entity id and field."""

    def __init__(self, entity: str, fld: str, message: str):
        self.entity = entity
        self.field = fld
        self.message = message
        super().__init__(f"{entity}: {fld}: {message}" if fld else f"{entity}: {message}")


@dataclass
class Item:
    """A code unit moving through the process.

    Only ``id``, ``size_loc`` and ``complexity`` are scenario inputs; the
    remaining fields are run state reset by the engine per replication.
    """

    id: str
    size_loc: int
    complexity: float = 1.0
    latent_defects: int = 0
    found_in_inspection: int = 0
    found_in_test: int = 0
    injected_coding: int = 0
    injected_rework: int = 0
    phase: Phase = Phase.QUEUED
    effort_by_phase: dict[str, float] = field(default_factory=dict)
    completion_time: float | None = None

    @property
    def size_kloc(self) -> float:
        return self.size_loc / 1000.0


@dataclass
class Person:
    """A staff member.  ``None`` productivities and fatigue dispersion are
    filled from the calibration during validation."""

    id: str
    coding_skill: float = 1.0
    inspection_skill: float = 1.0
    coding_productivity: float | None = None
    inspection_productivity: float | None = None
    defect_factor: float = 1.0
    experience_coding: float | None = None
    experience_inspection: float | None = None
    fatigue_sigma: float | None = None
    status: PersonStatus = PersonStatus.IN_POOL


def default_distribution_table() -> dict[str, dict[str, Any]]:
    return {
        "fatigue": {"dist": "lognormal", "sigma": 0.08},
        "injection_noise": {"dist": "lognormal", "sigma": 0.3},
        "design_delay": {"dist": "uniform", "low": 0.0, "high": 8.0},
    }


@dataclass
class Calibration:
    """Project-wide quantitative constants.

    The functional forms they feed (multiplicative factor composition,
    per-defect binomial detection, logistic learning, clamped power-law
    pressure) are this package's modeling choices; the constants below are
    the defaults a scenario can override and are not measurements.
    """

    base_defect_density: float = 44.2  # defects/KLOC at nominal factors
    nominal_coding_productivity: float = 25.0  # LOC/hour
    nominal_inspection_rate: float = 100.0  # LOC/hour reading speed
    base_detection_prob: float = 0.45  # per-inspector, per-defect at nominal skill
    rework_fix_effort: float = 0.5  # hours per defect
    rework_injection_rate: float = 0.1  # new defects per fixed defect
    test_removal_rate: float = 0.88  # defects removed per test hour
    target_defect_density: float = 1.5  # defects/KLOC remaining after test
    inspection_threshold_density: float = 35.0  # defects/KLOC selection rule
    team_size: int = 3  # inspectors per inspection
    # Logistic learning: multiplier runs from skill_floor to skill_ceiling,
    # crossing the midpoint at learning_midpoint KLOC of experience.
    skill_floor: float = 0.7
    skill_ceiling: float = 1.3
    learning_rate: float = 0.5  # steepness per KLOC
    learning_midpoint: float = 5.0  # KLOC
    # Time pressure: productivity multiplier clamp(ratio^exponent, floor,
    # ceiling); defect injection penalty uses its own exponent and clamps.
    pressure_exponent: float = 0.5
    pressure_floor: float = 0.8
    pressure_ceiling: float = 1.3
    injection_pressure_exponent: float = 0.25
    injection_pressure_floor: float = 1.0
    injection_pressure_ceiling: float = 1.25
    planned_duration: float | None = None  # hours; None disables pressure
    distribution_table: dict[str, dict[str, Any]] = field(
        default_factory=default_distribution_table
    )


@dataclass
class Switches:
    inspection_on: bool = True
    design_on: bool = True
    test_on: bool = True


@dataclass
class Scenario:
    items: list[Item]
    persons: list[Person]
    calibration: Calibration = field(default_factory=Calibration)
    policy: InspectionPolicy = field(default_factory=InspectionPolicy)
    switches: Switches = field(default_factory=Switches)
    seed: int = 0
    replications: int = 1


@dataclass
class ItemLedger:
    """Per-item defect audit row of a finished run."""

    item_id: str
    size_loc: int
    injected_coding: int
    injected_rework: int
    found_inspection: int
    found_test: int
    remaining: int
    inspected: bool
    completion_time: float
    effort_by_phase: dict[str, float]


@dataclass
class RunResult:
    total_effort: float
    duration: float
    defects_coded: int
    defects_found_inspection: int
    defects_after_inspection: int
    defects_found_test: int
    defects_remaining: int
    per_item_trace: list[ItemLedger]
    per_phase_effort: dict[str, float]

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _positive(entity: str, fld: str, value: float) -> None:
    if not (value > 0):
        raise ScenarioError(entity, fld, f"must be > 0, got {value}")


def _non_negative(entity: str, fld: str, value: float) -> None:
    if not (value >= 0):
        raise ScenarioError(entity, fld, f"must be >= 0, got {value}")


def validate_scenario(scenario: Scenario) -> Scenario:
    """Validate all type invariants and normalize defaulted fields.

    Returns a deep copy with ``None`` person fields filled from the
    calibration and policy defaults resolved.  Raises ``ScenarioError``
    naming the first violated invariant.
    """
    s = copy.deepcopy(scenario)
    if not s.items:
        raise ScenarioError("scenario", "items", "empty item list")
    if not s.persons:
        raise ScenarioError("scenario", "persons", "empty person pool")
    if not isinstance(s.replications, int) or s.replications < 1:
        raise ScenarioError("scenario", "replications", "must be an integer >= 1")
    if not isinstance(s.seed, int) or s.seed < 0 or s.seed >= 2**64:
        raise ScenarioError("scenario", "seed", "must be an integer in [0, 2^64)")

    c = s.calibration
    for fld in (
        "base_defect_density",
        "nominal_coding_productivity",
        "nominal_inspection_rate",
        "rework_fix_effort",
        "test_removal_rate",
        "target_defect_density",
        "inspection_threshold_density",
    ):
        _positive("calibration", fld, getattr(c, fld))
    if not (0 < c.base_detection_prob <= 1):
        raise ScenarioError("calibration", "base_detection_prob", "must be in (0, 1]")
    if not (0 <= c.rework_injection_rate < 1):
        raise ScenarioError(
            "calibration", "rework_injection_rate", "must be in [0, 1) so fixing converges"
        )
    if not (isinstance(c.team_size, int) and c.team_size >= 1):
        raise ScenarioError("calibration", "team_size", "must be an integer >= 1")
    if not (0 < c.skill_floor <= c.skill_ceiling):
        raise ScenarioError("calibration", "skill_floor", "need 0 < skill_floor <= skill_ceiling")
    _positive("calibration", "learning_rate", c.learning_rate)
    _non_negative("calibration", "learning_midpoint", c.learning_midpoint)
    if not (c.pressure_floor <= 1.0 <= c.pressure_ceiling):
        raise ScenarioError("calibration", "pressure_floor", "clamps must bracket 1.0")
    if not (c.injection_pressure_floor <= 1.0 <= c.injection_pressure_ceiling):
        raise ScenarioError("calibration", "injection_pressure_floor", "clamps must bracket 1.0")
    if c.planned_duration is not None:
        _positive("calibration", "planned_duration", c.planned_duration)

    table = dict(default_distribution_table())
    for name, spec in (c.distribution_table or {}).items():
        try:
            table[name] = distributions.validate_spec(name, spec)
        except distributions.DistributionError as exc:
            raise ScenarioError("calibration", f"distribution_table.{name}", str(exc)) from exc
    c.distribution_table = table

    seen_item_ids: set[str] = set()
    for item in s.items:
        ent = f"item {item.id}"
        if item.id in seen_item_ids:
            raise ScenarioError(ent, "id", "duplicate item id")
        seen_item_ids.add(item.id)
        if not isinstance(item.size_loc, int) or item.size_loc <= 0:
            raise ScenarioError(ent, "size_loc", f"must be a positive integer, got {item.size_loc}")
        _positive(ent, "complexity", item.complexity)
        for fld in ("latent_defects", "found_in_inspection", "found_in_test"):
            _non_negative(ent, fld, getattr(item, fld))

    fatigue_sigma_default = float(table["fatigue"].get("sigma", 0.0))
    seen_person_ids: set[str] = set()
    for person in s.persons:
        ent = f"person {person.id}"
        if person.id in seen_person_ids:
            raise ScenarioError(ent, "id", "duplicate person id")
        seen_person_ids.add(person.id)
        if person.coding_productivity is None:
            person.coding_productivity = c.nominal_coding_productivity
        if person.inspection_productivity is None:
            person.inspection_productivity = c.nominal_inspection_rate
        if person.experience_coding is None:
            person.experience_coding = c.learning_midpoint
        if person.experience_inspection is None:
            person.experience_inspection = c.learning_midpoint
        if person.fatigue_sigma is None:
            person.fatigue_sigma = fatigue_sigma_default
        for fld in (
            "coding_skill",
            "inspection_skill",
            "coding_productivity",
            "inspection_productivity",
            "defect_factor",
        ):
            _positive(ent, fld, getattr(person, fld))
        _non_negative(ent, "experience_coding", person.experience_coding)
        _non_negative(ent, "experience_inspection", person.experience_inspection)
        _non_negative(ent, "fatigue_sigma", person.fatigue_sigma)
        person.status = PersonStatus.IN_POOL

    p = s.policy
    if not isinstance(p.kind, PolicyKind):
        raise ScenarioError("policy", "kind", f"unknown kind {p.kind!r}")
    if p.team_size is None:
        p.team_size = c.team_size
    if not (isinstance(p.team_size, int) and p.team_size >= 1):
        raise ScenarioError("policy", "team_size", "must be an integer >= 1")
    if p.kind == PolicyKind.DENSITY_THRESHOLD and p.threshold is None:
        p.threshold = c.inspection_threshold_density
    if p.kind in (PolicyKind.DENSITY_THRESHOLD, PolicyKind.SIZE_THRESHOLD):
        if p.threshold is None or not (p.threshold > 0):
            raise ScenarioError("policy", "threshold", "must be > 0 for threshold policies")
    may_inspect = s.switches.inspection_on and p.kind != PolicyKind.NONE
    if may_inspect and p.team_size >= len(s.persons):
        raise ScenarioError(
            "policy",
            "team_size",
            f"team of {p.team_size} with the author excluded needs more than "
            f"{len(s.persons)} persons",
        )
    return s


# --- scenario file round-trip -------------------------------------------

_ITEM_FIELDS = ("id", "size_loc", "complexity")
_PERSON_FIELDS = (
    "id",
    "coding_skill",
    "inspection_skill",
    "coding_productivity",
    "inspection_productivity",
    "defect_factor",
    "experience_coding",
    "experience_inspection",
    "fatigue_sigma",
)
_TOP_FIELDS = ("items", "persons", "calibration", "policy", "switches", "seed", "replications")


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    return {
        "items": [
            {"id": i.id, "size_loc": i.size_loc, "complexity": i.complexity} for i in s.items
        ],
        "persons": [{f: getattr(p, f) for f in _PERSON_FIELDS} for p in s.persons],
        "calibration": {
            k: v for k, v in asdict(s.calibration).items()
        },
        "policy": {
            "kind": s.policy.kind.value,
            "threshold": s.policy.threshold,
            "team_size": s.policy.team_size,
        },
        "switches": asdict(s.switches),
        "seed": s.seed,
        "replications": s.replications,
    }


def _check_keys(entity: str, data: dict[str, Any], allowed: tuple[str, ...]) -> None:
    for key in data:
        if key not in allowed:
            raise ScenarioError(entity, key, "unknown field")


def scenario_from_dict(data: dict[str, Any]) -> Scenario:
    """Build a Scenario from the file/wire representation (strict keys)."""
    if not isinstance(data, dict):
        raise ScenarioError("scenario", "", "scenario must be an object")
    _check_keys("scenario", data, _TOP_FIELDS)
    try:
        items = []
        for idx, raw in enumerate(data.get("items", [])):
            _check_keys(f"items[{idx}]", raw, _ITEM_FIELDS)
            items.append(
                Item(
                    id=str(raw["id"]),
                    size_loc=raw["size_loc"],
                    complexity=float(raw.get("complexity", 1.0)),
                )
            )
        persons = []
        for idx, raw in enumerate(data.get("persons", [])):
            _check_keys(f"persons[{idx}]", raw, _PERSON_FIELDS)
            kwargs = {k: raw[k] for k in _PERSON_FIELDS if k in raw}
            kwargs["id"] = str(kwargs["id"])
            persons.append(Person(**kwargs))
        calib_data = dict(data.get("calibration", {}))
        _check_keys("calibration", calib_data, tuple(Calibration.__dataclass_fields__))
        calibration = Calibration(**calib_data)
        policy_data = dict(data.get("policy", {}))
        _check_keys("policy", policy_data, ("kind", "threshold", "team_size"))
        policy = InspectionPolicy(
            kind=PolicyKind(policy_data.get("kind", "all")),
            threshold=policy_data.get("threshold"),
            team_size=policy_data.get("team_size"),
        )
        switches_data = dict(data.get("switches", {}))
        _check_keys("switches", switches_data, ("inspection_on", "design_on", "test_on"))
        switches = Switches(**{k: bool(v) for k, v in switches_data.items()})
    except KeyError as exc:
        raise ScenarioError("scenario", str(exc.args[0]), "missing required field") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError("scenario", "", f"malformed scenario: {exc}") from exc
    return Scenario(
        items=items,
        persons=persons,
        calibration=calibration,
        policy=policy,
        switches=switches,
        seed=int(data.get("seed", 0)),
        replications=int(data.get("replications", 1)),
    )


def save_scenario(s: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2, sort_keys=True) + "\n")


def load_scenario(path: str | Path) -> Scenario:
    return scenario_from_dict(json.loads(Path(path).read_text()))
