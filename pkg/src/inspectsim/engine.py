"""Deterministic discrete-event kernel.

A binary-heap event queue ordered by (time, schedule sequence) drives a
single run: items are routed through design delay, coding, optional
inspection, rework and test; persons are drawn from a staff pool in strict
first-come-first-served order and temporarily batched with their item into a
compound unit for the duration of an activity.

Randomness comes from substreams keyed by (scenario seed, replication,
purpose, item index).  Two consequences: identical inputs reproduce results
bit for bit, and policy variants of the same scenario consume identical
draws for the activities they share (common random numbers).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable

import numpy as np

from inspectsim import distributions, process
from inspectsim.domain import (
    ALLOWED_TRANSITIONS,
    Calibration,
    Item,
    ItemLedger,
    Person,
    PersonStatus,
    Phase,
    RunResult,
    Scenario,
)
from inspectsim.policy import PolicyKind, select_for_inspection
from inspectsim.process import PressureState


class EngineError(RuntimeError):
    """Model bug: scheduling in the past, double unbatch, illegal transition."""


class UnsatisfiableRequest(EngineError):
    """A staff request that no future pool state can satisfy."""


class DeadlockError(EngineError):
    """No pending events but unfinished items remain."""


class EventKind(str, Enum):
    ITEM_ROUTED = "item_routed"
    TASK_READY = "task_ready"
    TASK_COMPLETE = "task_complete"
    PERSON_RELEASED = "person_released"
    SIMULATION_END = "simulation_end"


class Activity(str, Enum):
    CODING = "coding"
    INSPECTION = "inspection"
    REWORK = "rework"
    TEST = "test"


@dataclass
class Event:
    time: float
    seq: int
    kind: EventKind
    item_id: str = ""
    person_ids: tuple[str, ...] = ()
    activity: str = ""
    data: dict[str, Any] = field(default_factory=dict)


class EventQueue:
    """Priority queue popping in (time, seq) lexicographic order.

    seq increases monotonically at schedule time, so simultaneous events pop
    in the order they were scheduled and every run is totally ordered.
    """

    def __init__(self) -> None:
        self._heap: list[tuple[float, int, Event]] = []
        self._seq = 0
        self.clock = 0.0

    def __len__(self) -> int:
        return len(self._heap)

    def schedule(
        self,
        time: float,
        kind: EventKind,
        item_id: str = "",
        person_ids: Iterable[str] = (),
        activity: str = "",
        **data: Any,
    ) -> Event:
        if time < self.clock:
            raise EngineError(
                f"scheduling in the past: t={time} < clock={self.clock} ({kind.value})"
            )
        event = Event(time, self._seq, kind, item_id, tuple(person_ids), activity, data)
        self._seq += 1
        heapq.heappush(self._heap, (event.time, event.seq, event))
        return event

    def pop(self) -> Event:
        if not self._heap:
            raise EngineError("pop from empty event queue")
        _, _, event = heapq.heappop(self._heap)
        if event.time < self.clock:
            raise EngineError("event queue lost clock monotonicity")
        self.clock = event.time
        return event


@dataclass
class PoolRequest:
    req_id: int
    time: float
    n: int
    exclude: frozenset[str]
    specific: str | None
    tag: dict[str, Any]


class StaffPool:
    """Ordered pool of available persons plus a FIFO queue of requests.

    Persons wait in release order and are handed out longest-waiting first.
    Requests are served in arrival order; a later request is granted ahead of
    an earlier one only while the earlier one is unsatisfiable (waiting for
    specific or excluded staff).
    """

    def __init__(self, persons: list[Person], log: list[tuple] | None = None):
        self.persons = {p.id: p for p in persons}
        if len(self.persons) != len(persons):
            raise EngineError("duplicate person ids in pool")
        self.available: list[Person] = list(persons)
        self.pending: list[PoolRequest] = []
        self.assigned: set[str] = set()
        self._next_req = 0
        self.log = log
        if log is not None:
            log.append(("init", 0.0, tuple(p.id for p in persons)))

    def _check_conservation(self) -> None:
        if len(self.available) + len(self.assigned) != len(self.persons):
            raise EngineError("person conservation violated")

    def request(
        self,
        time: float,
        n: int = 1,
        exclude: frozenset[str] = frozenset(),
        specific: str | None = None,
        **tag: Any,
    ) -> PoolRequest:
        if n < 1:
            raise EngineError(f"staff request for {n} persons")
        if specific is not None:
            if specific not in self.persons:
                raise UnsatisfiableRequest(f"unknown person {specific!r}")
        elif n > len(self.persons) - len(exclude & set(self.persons)):
            raise UnsatisfiableRequest(
                f"request for {n} persons exceeds eligible staff of "
                f"{len(self.persons) - len(exclude & set(self.persons))}"
            )
        req = PoolRequest(self._next_req, time, n, frozenset(exclude), specific, tag)
        self._next_req += 1
        self.pending.append(req)
        if self.log is not None:
            self.log.append(("request", time, req.req_id, n, tuple(sorted(req.exclude)), specific))
        return req

    def release(self, time: float, persons: Iterable[Person]) -> None:
        persons = list(persons)
        for p in persons:
            if p.id not in self.assigned:
                raise EngineError(f"release of unassigned person {p.id!r}")
            self.assigned.discard(p.id)
            p.status = PersonStatus.IN_POOL
            self.available.append(p)
        if self.log is not None and persons:
            self.log.append(("release", time, tuple(p.id for p in persons)))
        self._check_conservation()

    def satisfiable(self, req: PoolRequest) -> bool:
        if req.specific is not None:
            return any(p.id == req.specific for p in self.available)
        eligible = sum(1 for p in self.available if p.id not in req.exclude)
        return eligible >= req.n

    def _take(self, req: PoolRequest) -> list[Person]:
        taken: list[Person] = []
        rest: list[Person] = []
        for p in self.available:
            want = (
                p.id == req.specific
                if req.specific is not None
                else len(taken) < req.n and p.id not in req.exclude
            )
            if want and (req.specific is None or not taken):
                taken.append(p)
            else:
                rest.append(p)
        self.available = rest
        for p in taken:
            p.status = PersonStatus.ASSIGNED
            self.assigned.add(p.id)
        self._check_conservation()
        return taken

    def drain(self, time: float) -> list[tuple[PoolRequest, list[Person]]]:
        """Grant every currently satisfiable pending request in arrival order."""
        grants: list[tuple[PoolRequest, list[Person]]] = []
        remaining: list[PoolRequest] = []
        for req in self.pending:
            if self.satisfiable(req):
                persons = self._take(req)
                grants.append((req, persons))
                if self.log is not None:
                    self.log.append(("grant", time, req.req_id, tuple(p.id for p in persons)))
            else:
                remaining.append(req)
        self.pending = remaining
        return grants


class CompoundUnit:
    """An item batched with its assigned person(s) for one activity."""

    def __init__(self, item: Item, persons: list[Person], activity: Activity):
        if not persons:
            raise EngineError("compound unit needs at least one person")
        ids = [p.id for p in persons]
        if len(set(ids)) != len(ids):
            raise EngineError(f"duplicate person in compound unit: {ids}")
        for p in persons:
            if p.status != PersonStatus.ASSIGNED:
                raise EngineError(f"person {p.id!r} not assigned to the unit")
        self.item = item
        self.persons = persons
        self.activity = activity
        self._open = True

    def unbatch(self, pool: StaffPool, time: float) -> tuple[Item, list[Person]]:
        """Dissolve the unit, returning persons to the pool in batch order."""
        if not self._open:
            raise EngineError("double unbatch of compound unit")
        self._open = False
        pool.release(time, self.persons)
        return self.item, self.persons


# Substream purposes; part of the reproducibility contract, do not reorder.
DESIGN_STREAM = 0
CODING_FATIGUE_STREAM = 1
INJECTION_STREAM = 2
DETECTION_STREAM = 3
INSPECTION_FATIGUE_STREAM = 4
REWORK_INJECTION_STREAM = 5


def substream(seed: int, replication: int, purpose: int, index: int) -> np.random.Generator:
    """Independent generator keyed by (seed, replication, purpose, entity)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(replication, purpose, index))
    return np.random.default_rng(ss)


class _Run:
    def __init__(self, scenario: Scenario, replication: int, traced: bool):
        self.scenario = scenario
        self.calib: Calibration = scenario.calibration
        self.replication = replication
        self.traced = traced
        self.items: list[Item] = [
            replace(
                it,
                latent_defects=0,
                found_in_inspection=0,
                found_in_test=0,
                injected_coding=0,
                injected_rework=0,
                phase=Phase.QUEUED,
                effort_by_phase={},
                completion_time=None,
            )
            for it in scenario.items
        ]
        self.item_index = {it.id: i for i, it in enumerate(self.items)}
        self.persons: list[Person] = [replace(p, status=PersonStatus.IN_POOL) for p in scenario.persons]
        self.pool_log: list[tuple] | None = [] if traced else None
        self.pool = StaffPool(self.persons, log=self.pool_log)
        self.queue = EventQueue()
        self.trace: list[Event] = []
        self.coder: dict[str, Person] = {}
        self.inspected: dict[str, bool] = {it.id: False for it in self.items}
        self.done_count = 0
        self.end_time = 0.0
        # Nominal total work for the crude pressure projection.
        self._nominal_hours = {
            it.id: it.size_loc * it.complexity / self.calib.nominal_coding_productivity
            for it in self.items
        }

    # --- helpers ---------------------------------------------------------

    def _rng(self, purpose: int, item: Item) -> np.random.Generator:
        return substream(self.scenario.seed, self.replication, purpose, self.item_index[item.id])

    def _set_phase(self, item: Item, phase: Phase) -> None:
        if phase not in ALLOWED_TRANSITIONS[item.phase]:
            raise EngineError(f"illegal phase transition {item.phase.value} -> {phase.value}")
        item.phase = phase

    def _charge(self, item: Item, activity: Activity, hours: float) -> None:
        item.effort_by_phase[activity.value] = item.effort_by_phase.get(activity.value, 0.0) + hours

    def _pressure_state(self, now: float) -> PressureState:
        if self.calib.planned_duration is None:
            return process.NEUTRAL_PRESSURE
        backlog = sum(
            self._nominal_hours[it.id] for it in self.items if it.phase != Phase.DONE
        )
        projected = backlog / len(self.persons)
        planned = max(self.calib.planned_duration - now, 0.0)
        return PressureState(planned_remaining=planned, projected_remaining=projected)

    # --- event handlers ---------------------------------------------------

    def _seed_initial_events(self) -> None:
        design_spec = self.calib.distribution_table["design_delay"]
        for item in self.items:
            if self.scenario.switches.design_on:
                delay = max(0.0, distributions.sample(design_spec, self._rng(DESIGN_STREAM, item)))
            else:
                delay = 0.0
            self.queue.schedule(delay, EventKind.ITEM_ROUTED, item_id=item.id, stage="coding")

    def _route(self, item: Item, now: float, stage: str) -> None:
        if stage == "coding":
            self.pool.request(now, n=1, item_id=item.id, activity=Activity.CODING)
        elif stage == "inspection":
            self._set_phase(item, Phase.AWAITING_INSPECTION)
            self.pool.request(
                now,
                n=self.scenario.policy.team_size,
                exclude=frozenset({self.coder[item.id].id}),
                item_id=item.id,
                activity=Activity.INSPECTION,
            )
        elif stage == "rework":
            self._set_phase(item, Phase.IN_REWORK)
            self.pool.request(
                now, specific=self.coder[item.id].id, item_id=item.id, activity=Activity.REWORK
            )
        elif stage == "test":
            self._set_phase(item, Phase.AWAITING_TEST)
            self.pool.request(now, n=1, item_id=item.id, activity=Activity.TEST)
        elif stage == "done":
            self._finish(item, now)
            return
        else:
            raise EngineError(f"unknown stage {stage!r}")
        self._drain(now)

    def _drain(self, now: float) -> None:
        for req, persons in self.pool.drain(now):
            item = self.items[self.item_index[req.tag["item_id"]]]
            activity: Activity = req.tag["activity"]
            cu = CompoundUnit(item, persons, activity)
            self.queue.schedule(
                now,
                EventKind.TASK_READY,
                item_id=item.id,
                person_ids=[p.id for p in persons],
                activity=activity.value,
                cu=cu,
            )

    def _after_coding_stage(self, item: Item) -> str:
        policy = self.scenario.policy
        if (
            self.scenario.switches.inspection_on
            and policy.kind != PolicyKind.NONE
            and select_for_inspection(item, policy)
        ):
            return "inspection"
        return "test" if self.scenario.switches.test_on else "done"

    def _start_task(self, event: Event, now: float) -> None:
        cu: CompoundUnit = event.data["cu"]
        item = cu.item
        calib = self.calib
        if cu.activity == Activity.CODING:
            self._set_phase(item, Phase.CODING)
            person = cu.persons[0]
            pressure = self._pressure_state(now)
            hours = process.coding_duration(
                item, person, calib, pressure, self._rng(CODING_FATIGUE_STREAM, item)
            )
            injected = process.defects_injected(
                item, person, calib, pressure, self._rng(INJECTION_STREAM, item)
            )
            data = {"cu": cu, "injected": injected, "effort": hours}
        elif cu.activity == Activity.INSPECTION:
            self._set_phase(item, Phase.IN_INSPECTION)
            elapsed, per_person = process.inspection_duration(
                item, cu.persons, calib, self._rng(INSPECTION_FATIGUE_STREAM, item)
            )
            found = process.team_detection(
                item.latent_defects, cu.persons, calib, self._rng(DETECTION_STREAM, item)
            )
            hours = elapsed
            data = {"cu": cu, "found": found, "effort": sum(per_person)}
        elif cu.activity == Activity.REWORK:
            person = cu.persons[0]
            hours, new_defects = process.rework(
                item.found_in_inspection, person, calib, self._rng(REWORK_INJECTION_STREAM, item)
            )
            data = {"cu": cu, "new_defects": new_defects, "effort": hours}
        elif cu.activity == Activity.TEST:
            self._set_phase(item, Phase.IN_TEST)
            test_hours, removed, remaining = process.test_plan(item, calib)
            hours = test_hours + removed * calib.rework_fix_effort
            data = {"cu": cu, "removed": removed, "remaining": remaining, "effort": hours}
        else:  # pragma: no cover - enum is closed
            raise EngineError(f"unknown activity {cu.activity!r}")
        self.queue.schedule(
            now + hours,
            EventKind.TASK_COMPLETE,
            item_id=item.id,
            person_ids=[p.id for p in cu.persons],
            activity=cu.activity.value,
            **data,
        )

    def _complete_task(self, event: Event, now: float) -> None:
        cu: CompoundUnit = event.data["cu"]
        item = cu.item
        kloc = item.size_kloc
        self._charge(item, cu.activity, event.data["effort"])
        if cu.activity == Activity.CODING:
            injected = event.data["injected"]
            item.injected_coding = injected
            item.latent_defects += injected
            person = cu.persons[0]
            process.learning_update(person, kloc, "coding")
            self.coder[item.id] = person
            next_stage = self._after_coding_stage(item)
        elif cu.activity == Activity.INSPECTION:
            found = event.data["found"]
            item.found_in_inspection = found
            self.inspected[item.id] = True
            for person in cu.persons:
                process.learning_update(person, kloc, "inspection")
            if found > 0:
                next_stage = "rework"
            else:
                next_stage = "test" if self.scenario.switches.test_on else "done"
        elif cu.activity == Activity.REWORK:
            new_defects = event.data["new_defects"]
            item.injected_rework = new_defects
            item.latent_defects += new_defects - item.found_in_inspection
            next_stage = "test" if self.scenario.switches.test_on else "done"
        elif cu.activity == Activity.TEST:
            item.found_in_test = event.data["removed"]
            item.latent_defects = event.data["remaining"]
            next_stage = "done"
        else:  # pragma: no cover
            raise EngineError(f"unknown activity {cu.activity!r}")
        _, persons = cu.unbatch(self.pool, now)
        self.queue.schedule(
            now, EventKind.PERSON_RELEASED, item_id=item.id, person_ids=[p.id for p in persons]
        )
        self.queue.schedule(now, EventKind.ITEM_ROUTED, item_id=item.id, stage=next_stage)

    def _finish(self, item: Item, now: float) -> None:
        self._set_phase(item, Phase.DONE)
        item.completion_time = now
        self.done_count += 1
        if self.done_count == len(self.items):
            self.end_time = now
            self.queue.schedule(now, EventKind.SIMULATION_END)

    # --- main loop --------------------------------------------------------

    def execute(self) -> RunResult:
        self._seed_initial_events()
        while len(self.queue):
            event = self.queue.pop()
            if self.traced:
                self.trace.append(event)
            now = event.time
            if event.kind == EventKind.ITEM_ROUTED:
                item = self.items[self.item_index[event.item_id]]
                self._route(item, now, event.data["stage"])
            elif event.kind == EventKind.TASK_READY:
                self._start_task(event, now)
            elif event.kind == EventKind.TASK_COMPLETE:
                self._complete_task(event, now)
            elif event.kind == EventKind.PERSON_RELEASED:
                self._drain(now)
            elif event.kind == EventKind.SIMULATION_END:
                pass
        if self.done_count != len(self.items):
            stuck = [(it.id, it.phase.value) for it in self.items if it.phase != Phase.DONE]
            raise DeadlockError(
                f"no pending events but {len(stuck)} items unfinished: {stuck[:5]}; "
                f"pending staff requests: {len(self.pool.pending)}"
            )
        return self._result()

    def _result(self) -> RunResult:
        per_phase: dict[str, float] = {}
        ledgers: list[ItemLedger] = []
        for item in self.items:
            injected = item.injected_coding + item.injected_rework
            resolved = item.found_in_inspection + item.found_in_test + item.latent_defects
            if injected != resolved:
                raise EngineError(
                    f"defect ledger broken for item {item.id}: "
                    f"injected {injected} != resolved {resolved}"
                )
            if self.scenario.switches.test_on and (
                item.latent_defects > self.calib.target_defect_density * item.size_kloc
            ):
                raise EngineError(f"item {item.id} finished above the target defect density")
            for phase, hours in item.effort_by_phase.items():
                per_phase[phase] = per_phase.get(phase, 0.0) + hours
            ledgers.append(
                ItemLedger(
                    item_id=item.id,
                    size_loc=item.size_loc,
                    injected_coding=item.injected_coding,
                    injected_rework=item.injected_rework,
                    found_inspection=item.found_in_inspection,
                    found_test=item.found_in_test,
                    remaining=item.latent_defects,
                    inspected=self.inspected[item.id],
                    completion_time=item.completion_time,
                    effort_by_phase=dict(item.effort_by_phase),
                )
            )
        coded = sum(l.injected_coding for l in ledgers)
        found_insp = sum(l.found_inspection for l in ledgers)
        reinjected = sum(l.injected_rework for l in ledgers)
        return RunResult(
            total_effort=sum(per_phase.values()),
            duration=self.end_time,
            defects_coded=coded,
            defects_found_inspection=found_insp,
            defects_after_inspection=coded - found_insp + reinjected,
            defects_found_test=sum(l.found_test for l in ledgers),
            defects_remaining=sum(l.remaining for l in ledgers),
            per_item_trace=ledgers,
            per_phase_effort=per_phase,
        )


def run(scenario: Scenario, replication_index: int = 0) -> RunResult:
    """Execute one replication of a validated scenario."""
    return _Run(scenario, replication_index, traced=False).execute()


def run_traced(
    scenario: Scenario, replication_index: int = 0
) -> tuple[RunResult, list[Event], list[tuple]]:
    """Like ``run`` but also returns the event trace and the staff-pool log."""
    r = _Run(scenario, replication_index, traced=True)
    result = r.execute()
    return result, r.trace, r.pool_log or []


def trace_rows(events: list[Event]) -> list[tuple]:
    """Flatten a trace into (time, seq, kind, item_id, person_ids, activity) rows."""
    return [
        (e.time, e.seq, e.kind.value, e.item_id, ";".join(e.person_ids), e.activity)
        for e in events
    ]
