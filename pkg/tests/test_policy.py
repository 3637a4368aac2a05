"""Selection rules and team formation."""

import pytest

from inspectsim.domain import Item, Person
from inspectsim.engine import StaffPool, UnsatisfiableRequest
from inspectsim.policy import (
    InspectionPolicy,
    PolicyKind,
    form_team,
    select_for_inspection,
)


def _item(size_loc: int, latent: int) -> Item:
    return Item(id="x", size_loc=size_loc, latent_defects=latent)


def test_density_threshold_above_selects():
    policy = InspectionPolicy(kind=PolicyKind.DENSITY_THRESHOLD, threshold=35.0, team_size=1)
    assert select_for_inspection(_item(1000, 40), policy) is True


def test_density_threshold_is_strictly_larger_than():
    policy = InspectionPolicy(kind=PolicyKind.DENSITY_THRESHOLD, threshold=35.0, team_size=1)
    assert select_for_inspection(_item(1000, 35), policy) is False


def test_none_policy_never_selects():
    policy = InspectionPolicy(kind=PolicyKind.NONE)
    assert select_for_inspection(_item(100, 1000), policy) is False


def test_all_policy_always_selects():
    policy = InspectionPolicy(kind=PolicyKind.ALL)
    assert select_for_inspection(_item(100, 0), policy) is True


def test_size_threshold_uses_loc():
    policy = InspectionPolicy(kind=PolicyKind.SIZE_THRESHOLD, threshold=300, team_size=1)
    assert select_for_inspection(_item(300, 0), policy) is True
    assert select_for_inspection(_item(299, 50), policy) is False


@pytest.mark.parametrize("scale", [2, 10, 1000])
def test_density_selection_invariant_under_rescaling(scale):
    policy = InspectionPolicy(kind=PolicyKind.DENSITY_THRESHOLD, threshold=35.0, team_size=1)
    base = select_for_inspection(_item(700, 30), policy)
    assert select_for_inspection(_item(700 * scale, 30 * scale), policy) == base


def test_form_team_excludes_the_author():
    author, other = Person(id="author"), Person(id="p2")
    pool = StaffPool([author, other])
    form_team(pool, 0.0, team_size=1, author_id="author")
    grants = pool.drain(0.0)
    assert len(grants) == 1
    _, persons = grants[0]
    assert [p.id for p in persons] == ["p2"]


def test_form_team_takes_longest_waiting_non_authors():
    persons = [Person(id=f"p{k:02d}") for k in range(20)]
    pool = StaffPool(persons)
    form_team(pool, 0.0, team_size=10, author_id="p00")
    (_, team), = pool.drain(0.0)
    assert [p.id for p in team] == [f"p{k:02d}" for k in range(1, 11)]


def test_form_team_waits_while_exclusion_blocks_it():
    persons = [Person(id="author"), Person(id="p2"), Person(id="p3")]
    pool = StaffPool(persons)
    pool.request(0.0, n=2)  # occupies author and p2
    (_, busy), = pool.drain(0.0)
    form_team(pool, 1.0, team_size=2, author_id="author")
    assert pool.drain(1.0) == []  # only p3 eligible right now: the team waits
    pool.release(2.0, busy)
    (_, team), = pool.drain(2.0)
    assert sorted(p.id for p in team) == ["p2", "p3"]


def test_form_team_larger_than_non_author_staff_faults():
    persons = [Person(id=f"p{k}") for k in range(3)]
    pool = StaffPool(persons)
    with pytest.raises(UnsatisfiableRequest):
        form_team(pool, 0.0, team_size=3, author_id="p0")
