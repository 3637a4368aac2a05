"""Shared scenario builders for the test suite."""

from __future__ import annotations

import numpy as np

from inspectsim.domain import Calibration, Item, Person, Scenario, Switches, validate_scenario
from inspectsim.policy import InspectionPolicy, PolicyKind

NOISE_OFF_TABLE = {
    "fatigue": {"dist": "lognormal", "sigma": 0.0},
    "injection_noise": {"dist": "lognormal", "sigma": 0.0},
    "design_delay": {"dist": "constant", "value": 0.0},
}


def noise_off_calibration(**overrides) -> Calibration:
    """Calibration with every stochastic multiplier degenerate at 1."""
    return Calibration(distribution_table=dict(NOISE_OFF_TABLE), **overrides)


def make_scenario(
    n_items: int = 3,
    n_persons: int = 3,
    size_loc: int = 500,
    policy_kind: PolicyKind = PolicyKind.ALL,
    team_size: int = 1,
    noise: bool = False,
    calibration: Calibration | None = None,
    switches: Switches | None = None,
    seed: int = 7,
    replications: int = 1,
) -> Scenario:
    calib = calibration or (Calibration() if noise else noise_off_calibration())
    scenario = Scenario(
        items=[Item(id=f"i{k + 1}", size_loc=size_loc) for k in range(n_items)],
        persons=[Person(id=f"p{k + 1}") for k in range(n_persons)],
        calibration=calib,
        policy=InspectionPolicy(kind=policy_kind, team_size=team_size),
        switches=switches or Switches(design_on=False),
        seed=seed,
        replications=replications,
    )
    return validate_scenario(scenario)


def random_scenario(rng: np.random.Generator) -> Scenario:
    """Valid randomized scenario for ledger/property sweeps."""
    n_items = int(rng.integers(1, 9))
    n_persons = int(rng.integers(1, 6))
    items = [
        Item(
            id=f"i{k}",
            size_loc=int(rng.integers(20, 1500)),
            complexity=float(rng.uniform(0.5, 1.5)),
        )
        for k in range(n_items)
    ]
    persons = [
        Person(
            id=f"p{k}",
            coding_skill=float(rng.uniform(0.6, 1.6)),
            inspection_skill=float(rng.uniform(0.6, 1.6)),
            defect_factor=float(rng.uniform(0.5, 1.8)),
            experience_coding=float(rng.uniform(0.0, 12.0)),
            experience_inspection=float(rng.uniform(0.0, 12.0)),
            fatigue_sigma=float(rng.uniform(0.0, 0.3)),
        )
        for k in range(n_persons)
    ]
    kind = PolicyKind(
        str(rng.choice(["none", "all", "density_threshold", "size_threshold"]))
    )
    if n_persons < 2:
        kind = PolicyKind.NONE
    team_size = int(rng.integers(1, n_persons)) if n_persons >= 2 else 1
    threshold = (
        float(rng.uniform(5.0, 400.0))
        if kind == PolicyKind.SIZE_THRESHOLD
        else float(rng.uniform(10.0, 60.0))
    )
    calib = Calibration(
        base_defect_density=float(rng.uniform(5.0, 80.0)),
        base_detection_prob=float(rng.uniform(0.05, 0.95)),
        rework_injection_rate=float(rng.uniform(0.0, 0.4)),
        test_removal_rate=float(rng.uniform(0.2, 2.0)),
        target_defect_density=float(rng.uniform(0.5, 10.0)),
        planned_duration=float(rng.uniform(10.0, 400.0)) if rng.random() < 0.3 else None,
        distribution_table={
            "fatigue": {"dist": "lognormal", "sigma": float(rng.uniform(0.0, 0.2))},
            "injection_noise": {"dist": "lognormal", "sigma": float(rng.uniform(0.0, 0.5))},
            "design_delay": {"dist": "uniform", "low": 0.0, "high": float(rng.uniform(0.0, 10.0))},
        },
    )
    scenario = Scenario(
        items=items,
        persons=persons,
        calibration=calib,
        policy=InspectionPolicy(kind=kind, threshold=threshold, team_size=team_size),
        switches=Switches(
            inspection_on=bool(rng.random() < 0.8),
            design_on=bool(rng.random() < 0.5),
            test_on=bool(rng.random() < 0.8),
        ),
        seed=int(rng.integers(0, 2**32)),
        replications=1,
    )
    return validate_scenario(scenario)
