"""Quantitative sub-process models.

How long activities take and how many defects are injected, found and
re-injected.  Everything composes multiplicatively out of item attributes,
person attributes, learning, time pressure and unbiased noise, so that with
all noise switched off each operation reduces exactly to its closed formula.
Defect counts are integers drawn per defect, which keeps the per-item ledger
exactly conserved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from inspectsim import distributions
from inspectsim.domain import Calibration, Item, Person


@dataclass
class PressureState:
    """Schedule position at the moment an activity starts.

    ``planned_remaining`` is what the plan says is left, ``projected_remaining``
    what the current backlog projects; both in hours.
    """

    planned_remaining: float
    projected_remaining: float


#: Neutral schedule position (ratio 1): no pressure effects.
NEUTRAL_PRESSURE = PressureState(planned_remaining=1.0, projected_remaining=1.0)


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(x, lo), hi)


def skill_multiplier(experience_kloc: float, calib: Calibration) -> float:
    """Logistic learning curve over cumulative KLOC processed.

    Rises from ``skill_floor`` to ``skill_ceiling`` with midpoint at
    ``learning_midpoint`` KLOC; monotone and bounded.
    """
    span = calib.skill_ceiling - calib.skill_floor
    z = -calib.learning_rate * (experience_kloc - calib.learning_midpoint)
    return calib.skill_floor + span / (1.0 + math.exp(z))


def learning_update(person: Person, kloc: float, activity: str) -> Person:
    """Add a completed task's KLOC to the matching experience counter."""
    if activity == "coding":
        person.experience_coding += kloc
    elif activity == "inspection":
        person.experience_inspection += kloc
    else:
        raise ValueError(f"no experience counter for activity {activity!r}")
    return person


def coding_multiplier(person: Person, calib: Calibration) -> float:
    """Static coding skill combined with the learning curve."""
    return person.coding_skill * skill_multiplier(person.experience_coding, calib)


def inspection_multiplier(person: Person, calib: Calibration) -> float:
    """Static inspection skill combined with the learning curve."""
    return person.inspection_skill * skill_multiplier(person.experience_inspection, calib)


def pressure_factor(state: PressureState, calib: Calibration) -> float:
    """Productivity multiplier under schedule pressure.

    ratio = projected/planned remaining time; being behind (ratio > 1)
    speeds people up, capped by the calibration clamps.  A spent plan
    (planned_remaining == 0) means maximum pressure.
    """
    if state.planned_remaining <= 0:
        return calib.pressure_ceiling
    ratio = state.projected_remaining / state.planned_remaining
    return _clamp(ratio**calib.pressure_exponent, calib.pressure_floor, calib.pressure_ceiling)


def injection_pressure_penalty(state: PressureState, calib: Calibration) -> float:
    """Defect-injection multiplier under schedule pressure (never below 1)."""
    if state.planned_remaining <= 0:
        return calib.injection_pressure_ceiling
    ratio = state.projected_remaining / state.planned_remaining
    return _clamp(
        ratio**calib.injection_pressure_exponent,
        calib.injection_pressure_floor,
        calib.injection_pressure_ceiling,
    )


def fatigue_sample(person: Person, rng: np.random.Generator) -> float:
    """Per-task mean-1 lognormal multiplier for day-form effects."""
    return distributions.unit_lognormal(rng, person.fatigue_sigma or 0.0)


def coding_duration(
    item: Item,
    person: Person,
    calib: Calibration,
    pressure: PressureState,
    rng: np.random.Generator,
) -> float:
    """Hours a given person needs to code a given item.

    work = size * complexity; the effective rate is the person's coding
    productivity scaled by skill/learning, pressure and the fatigue draw.
    """
    rate = (
        person.coding_productivity
        * coding_multiplier(person, calib)
        * pressure_factor(pressure, calib)
        * fatigue_sample(person, rng)
    )
    return (item.size_loc * item.complexity) / rate


def defects_injected(
    item: Item,
    person: Person,
    calib: Calibration,
    pressure: PressureState,
    rng: np.random.Generator,
) -> int:
    """Defects produced while coding an item (rounded to a count)."""
    noise = distributions.sample(calib.distribution_table["injection_noise"], rng)
    expected = (
        item.size_kloc
        * calib.base_defect_density
        * item.complexity
        * person.defect_factor
        * injection_pressure_penalty(pressure, calib)
        * noise
    )
    return max(0, int(round(float(expected))))


def detection_probability(person: Person, calib: Calibration) -> float:
    """Per-defect detection probability of one inspector, clamped to [0, 1]."""
    return _clamp(calib.base_detection_prob * inspection_multiplier(person, calib), 0.0, 1.0)


def team_detection(
    latent: int, team: list[Person], calib: Calibration, rng: np.random.Generator
) -> int:
    """Defects found by a team reading one item.

    Each latent defect is found independently with probability
    1 - prod(1 - p_i) over the team, so the draw is binomial.  Sampling is
    done as per-defect uniforms against the team probability, which couples
    the draws across policy variants sharing the same substream.
    """
    if latent <= 0:
        return 0
    miss = 1.0
    for person in team:
        miss *= 1.0 - detection_probability(person, calib)
    p_team = 1.0 - miss
    return int(np.count_nonzero(rng.random(latent) < p_team))


def inspection_duration(
    item: Item, team: list[Person], calib: Calibration, rng: np.random.Generator
) -> tuple[float, list[float]]:
    """Elapsed hours and per-inspector reading hours for one inspection.

    Inspectors prepare in parallel: elapsed time is the slowest reader,
    effort charged is the sum of individual reading times.
    """
    hours = []
    for person in team:
        rate = (
            person.inspection_productivity
            * inspection_multiplier(person, calib)
            * fatigue_sample(person, rng)
        )
        hours.append(item.size_loc / rate)
    return max(hours), hours


def rework(
    found: int, person: Person, calib: Calibration, rng: np.random.Generator
) -> tuple[float, int]:
    """Hours to fix the found defects and the count injected while fixing."""
    if found <= 0:
        return 0.0, 0
    hours = found * calib.rework_fix_effort / coding_multiplier(person, calib)
    new_defects = int(np.count_nonzero(rng.random(found) < calib.rework_injection_rate))
    return hours, new_defects


def test_plan(item: Item, calib: Calibration) -> tuple[float, int, int]:
    """Test hours, defects removed and defects remaining for an item.

    Test continues until the item's defect density is at or below the
    target, so the remaining count is the integer floor of the target for
    the item's size (or the latent count if already lower).  Deterministic
    given the latent count: the final quality level never varies across
    policies.  The returned hours cover testing only; final-pass fixing is
    charged separately at ``rework_fix_effort`` per removed defect with no
    re-injection.
    """
    latent = item.latent_defects
    cap = math.floor(calib.target_defect_density * item.size_loc / 1000.0)
    remaining = min(latent, cap)
    removed = latent - remaining
    hours = removed / calib.test_removal_rate
    return hours, removed, remaining
