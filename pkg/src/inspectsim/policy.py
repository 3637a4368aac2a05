"""Inspection selection policies and team formation rules.

A policy decides which freshly coded items go to inspection and how many
inspectors read each one.  The density policy reads the item's true latent
count, which a real project would not know; it serves as an omniscient
baseline for what optimal selection could buy.  A size-based proxy policy is
available for the realistic variant.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover - import cycle guard, typing only
    from inspectsim.domain import Item
    from inspectsim.engine import PoolRequest, StaffPool


class PolicyKind(str, Enum):
    NONE = "none"
    ALL = "all"
    DENSITY_THRESHOLD = "density_threshold"
    SIZE_THRESHOLD = "size_threshold"


@dataclass
class InspectionPolicy:
    """Selection rule plus team size.

    ``threshold`` is defects/KLOC for the density rule and minimum LOC for
    the size rule; it is ignored by ``none`` and ``all``.  ``None`` fields
    are filled from the calibration during scenario validation.
    """

    kind: PolicyKind = PolicyKind.ALL
    threshold: float | None = None
    team_size: int | None = None


def select_for_inspection(item: "Item", policy: InspectionPolicy) -> bool:
    """Decide whether a coded item is inspected under ``policy``.

    The density rule is strictly "larger than": an item sitting exactly at
    the threshold is not selected.
    """
    kind = policy.kind
    if kind == PolicyKind.NONE:
        return False
    if kind == PolicyKind.ALL:
        return True
    if kind == PolicyKind.DENSITY_THRESHOLD:
        density = item.latent_defects / (item.size_loc / 1000.0)
        return density > policy.threshold
    if kind == PolicyKind.SIZE_THRESHOLD:
        return item.size_loc >= policy.threshold
    raise ValueError(f"unknown policy kind {kind!r}")


def form_team(
    pool: "StaffPool", time: float, team_size: int, author_id: str, **tag: object
) -> "PoolRequest":
    """Queue a FCFS request for ``team_size`` inspectors excluding the author.

    The request waits in the pool until enough non-author staff are free;
    impossible requests (team larger than the non-author staff) fault
    immediately.
    """
    return pool.request(time, n=team_size, exclude=frozenset({author_id}), **tag)
