"""Replication harness, the two planning studies, and result emission.

``policy_comparison`` answers "are inspections worth it and for which
items"; ``team_size_sweep`` answers "how many inspectors per item".  Both
run every variant against identical item/person rosters and the same seeded
substreams, so differences are attributable to the policy alone.  Emitted
files are byte-stable for identical inputs.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from inspectsim import engine
from inspectsim.domain import (
    Calibration,
    Item,
    Person,
    RunResult,
    Scenario,
    ScenarioError,
    Switches,
    validate_scenario,
)
from inspectsim.policy import InspectionPolicy, PolicyKind

METRICS = (
    "total_effort",
    "duration",
    "defects_coded",
    "defects_found_inspection",
    "defects_after_inspection",
    "defects_found_test",
    "defects_remaining",
)


@dataclass
class MetricStats:
    mean: float
    std: float
    min: float
    max: float


@dataclass
class Aggregate:
    """Per-metric statistics over the replications of one scenario."""

    metrics: dict[str, MetricStats]
    replications: int

    def mean(self, metric: str) -> float:
        return self.metrics[metric].mean

    def to_dict(self) -> dict:
        return {
            "replications": self.replications,
            "metrics": {k: asdict(v) for k, v in self.metrics.items()},
        }


def aggregate_runs(results: Sequence[RunResult]) -> Aggregate:
    if not results:
        raise ValueError("cannot aggregate zero runs")
    metrics: dict[str, MetricStats] = {}
    for name in METRICS:
        values = np.array([float(getattr(r, name)) for r in results])
        std = float(values.std(ddof=1)) if len(values) > 1 else 0.0
        metrics[name] = MetricStats(
            mean=float(values.mean()), std=std, min=float(values.min()), max=float(values.max())
        )
    return Aggregate(metrics=metrics, replications=len(results))


def run_replications(scenario: Scenario) -> Aggregate:
    """Run all seeded replications of a scenario and aggregate the metrics."""
    results = []
    for rep in range(scenario.replications):
        try:
            results.append(engine.run(scenario, rep))
        except engine.EngineError as exc:
            raise engine.EngineError(f"replication {rep}: {exc}") from exc
    return aggregate_runs(results)


# --- policy comparison ----------------------------------------------------


@dataclass
class ComparisonRow:
    variant: str
    policy_kind: str
    aggregate: Aggregate


@dataclass
class Comparison:
    rows: list[ComparisonRow]
    seed: int
    replications: int
    total_size_loc: int

    def row(self, variant: str) -> ComparisonRow:
        return next(r for r in self.rows if r.variant == variant)

    def to_dict(self) -> dict:
        return {
            "kind": "comparison",
            "seed": self.seed,
            "replications": self.replications,
            "total_size_loc": self.total_size_loc,
            "rows": [
                {
                    "variant": r.variant,
                    "policy_kind": r.policy_kind,
                    **r.aggregate.to_dict(),
                }
                for r in self.rows
            ],
        }


def policy_comparison(base: Scenario) -> Comparison:
    """Run the no/all/density-threshold policy variants on shared draws."""
    base = validate_scenario(base)
    threshold = base.calibration.inspection_threshold_density
    variants = [
        ("no_inspections", InspectionPolicy(kind=PolicyKind.NONE, team_size=base.policy.team_size)),
        ("all_inspected", InspectionPolicy(kind=PolicyKind.ALL, team_size=base.policy.team_size)),
        (
            "density_threshold",
            InspectionPolicy(
                kind=PolicyKind.DENSITY_THRESHOLD,
                threshold=threshold,
                team_size=base.policy.team_size,
            ),
        ),
    ]
    rows = []
    for name, policy in variants:
        scenario = replace(base, policy=policy)
        rows.append(
            ComparisonRow(
                variant=name, policy_kind=policy.kind.value, aggregate=run_replications(scenario)
            )
        )
    return Comparison(
        rows=rows,
        seed=base.seed,
        replications=base.replications,
        total_size_loc=sum(i.size_loc for i in base.items),
    )


# --- team size sweep ------------------------------------------------------


@dataclass
class SweepPoint:
    team_size: int
    defects_found: float
    defects_missed: float
    total_effort: float
    duration: float
    aggregate: Aggregate


@dataclass
class Sweep:
    points: list[SweepPoint]
    seed: int
    replications: int

    def to_dict(self) -> dict:
        return {
            "kind": "sweep",
            "seed": self.seed,
            "replications": self.replications,
            "points": [
                {
                    "team_size": p.team_size,
                    "defects_found": p.defects_found,
                    "defects_missed": p.defects_missed,
                    "total_effort": p.total_effort,
                    "duration": p.duration,
                    **p.aggregate.to_dict(),
                }
                for p in self.points
            ],
        }


def team_size_sweep(base: Scenario, sizes: Iterable[int] | None = None) -> Sweep:
    """Vary the inspection team size and collect the four planning series."""
    base = validate_scenario(base)
    if base.policy.kind in (PolicyKind.NONE,):
        raise ScenarioError("policy", "kind", "sweep needs an inspecting policy (all or threshold)")
    sizes = list(sizes) if sizes is not None else list(range(1, 11))
    for n in sizes:
        if n >= len(base.persons):
            raise ScenarioError(
                "policy", "team_size", f"sweep size {n} needs more than {len(base.persons)} persons"
            )
    points = []
    for n in sizes:
        scenario = replace(base, policy=replace(base.policy, team_size=n))
        agg = run_replications(scenario)
        found = agg.mean("defects_found_inspection")
        points.append(
            SweepPoint(
                team_size=n,
                defects_found=found,
                defects_missed=agg.mean("defects_coded") - found,
                total_effort=agg.mean("total_effort"),
                duration=agg.mean("duration"),
                aggregate=agg,
            )
        )
    return Sweep(points=points, seed=base.seed, replications=base.replications)


# --- emission -------------------------------------------------------------


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _write_summary(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def emit_aggregate(agg: Aggregate, out_dir: str | Path) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [
        (name, st.mean, st.std, st.min, st.max)
        for name, st in agg.metrics.items()
    ]
    _write_csv(out / "results.csv", ("metric", "mean", "std", "min", "max"), rows)
    payload = {"kind": "single", **agg.to_dict()}
    _write_summary(out / "summary.json", payload)
    return payload


COMPARISON_COLUMNS = (
    "variant",
    "size_loc",
    "defects_coded",
    "defects_found_inspection",
    "defects_after_inspection",
    "defects_remaining",
    "total_effort",
    "duration",
)


def emit_comparison(comp: Comparison, out_dir: str | Path) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [
        (
            r.variant,
            comp.total_size_loc,
            r.aggregate.mean("defects_coded"),
            r.aggregate.mean("defects_found_inspection"),
            r.aggregate.mean("defects_after_inspection"),
            r.aggregate.mean("defects_remaining"),
            r.aggregate.mean("total_effort"),
            r.aggregate.mean("duration"),
        )
        for r in comp.rows
    ]
    _write_csv(out / "results.csv", COMPARISON_COLUMNS, rows)
    payload = comp.to_dict()
    _write_summary(out / "summary.json", payload)
    return payload


SWEEP_COLUMNS = ("team_size", "defects_found", "defects_missed", "total_effort", "duration")


def emit_sweep(sweep: Sweep, out_dir: str | Path) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [
        (p.team_size, p.defects_found, p.defects_missed, p.total_effort, p.duration)
        for p in sweep.points
    ]
    _write_csv(out / "results.csv", SWEEP_COLUMNS, rows)
    payload = sweep.to_dict()
    _write_summary(out / "summary.json", payload)
    return payload


def emit_trace(rows: list[tuple], out_dir: str | Path, name: str) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    _write_csv(path, ("time", "seq", "kind", "item_id", "person_ids", "activity"), rows)
    return path


def run_study(
    scenario: Scenario,
    study: str,
    out_dir: str | Path | None = None,
    sweep_sizes: Iterable[int] | None = None,
    trace: bool = False,
) -> dict:
    """Execute a study kind and optionally emit its files.

    This is the single execution path shared by the CLI and the run
    service, which keeps their emitted bytes identical for the same
    scenario and seed.
    """
    scenario = validate_scenario(scenario)
    if study == "single":
        agg = run_replications(scenario)
        result = emit_aggregate(agg, out_dir) if out_dir else {"kind": "single", **agg.to_dict()}
    elif study == "comparison":
        comp = policy_comparison(scenario)
        result = emit_comparison(comp, out_dir) if out_dir else comp.to_dict()
    elif study == "sweep":
        sweep = team_size_sweep(scenario, sweep_sizes)
        result = emit_sweep(sweep, out_dir) if out_dir else sweep.to_dict()
    else:
        raise ValueError(f"unknown study kind {study!r}")
    if trace and out_dir:
        for rep in range(scenario.replications):
            _, events, _ = engine.run_traced(scenario, rep)
            emit_trace(engine.trace_rows(events), out_dir, f"trace_rep{rep:03d}.csv")
    return result


# --- preset scenarios -------------------------------------------------------

DEFAULT_PRESET_SEED = 4711
_PRESET_ITEM_COUNT = 100
_PRESET_TOTAL_LOC = 25_669
_PRESET_STAFF = 20
# Sizes are clipped below the smallest LOC at which the density target keeps
# a defect (target 1.5/KLOC keeps one from 667 LOC), so the remaining-defect
# count is exactly zero for every item and policy variants tie exactly.
_PRESET_MIN_LOC = 40
_PRESET_MAX_LOC = 650

_ITEMGEN_STREAM = 1001
_ROSTER_STREAM = 1002


def _preset_sizes(rng: np.random.Generator) -> list[int]:
    """100 lognormal sizes (median 200 LOC) rescaled to the fixed total."""
    raw = rng.lognormal(mean=math.log(200.0), sigma=0.6, size=_PRESET_ITEM_COUNT)
    sizes = raw * (_PRESET_TOTAL_LOC / raw.sum())
    for _ in range(60):
        sizes = np.clip(sizes, _PRESET_MIN_LOC, _PRESET_MAX_LOC)
        gap = _PRESET_TOTAL_LOC - sizes.sum()
        if abs(gap) < 1e-9:
            break
        free = (sizes < _PRESET_MAX_LOC) if gap > 0 else (sizes > _PRESET_MIN_LOC)
        sizes[free] += gap * sizes[free] / sizes[free].sum()
    floors = np.floor(sizes).astype(int)
    shortfall = _PRESET_TOTAL_LOC - int(floors.sum())
    order = sorted(range(len(sizes)), key=lambda i: (-(sizes[i] - floors[i]), i))
    for i in order:
        if shortfall == 0:
            break
        if floors[i] < _PRESET_MAX_LOC:
            floors[i] += 1
            shortfall -= 1
    assert int(floors.sum()) == _PRESET_TOTAL_LOC
    assert floors.min() >= _PRESET_MIN_LOC - 1 and floors.max() <= _PRESET_MAX_LOC
    return [int(v) for v in floors]


def _preset_roster(rng: np.random.Generator) -> list[Person]:
    persons = []
    for i in range(_PRESET_STAFF):
        sigma_skill = 0.15
        persons.append(
            Person(
                id=f"p{i + 1:02d}",
                coding_skill=float(rng.lognormal(-0.5 * sigma_skill**2, sigma_skill)),
                inspection_skill=float(rng.lognormal(-0.5 * sigma_skill**2, sigma_skill)),
                defect_factor=float(rng.lognormal(-0.5 * 0.2**2, 0.2)),
                experience_coding=float(rng.uniform(2.0, 8.0)),
                experience_inspection=float(rng.uniform(2.0, 8.0)),
            )
        )
    return persons


def build_project_scenario(
    seed: int = DEFAULT_PRESET_SEED,
    policy: InspectionPolicy | None = None,
    replications: int = 20,
) -> Scenario:
    """Project at the scale of the published comparison: 100 items totaling
    25,669 LOC and a 20-person team, 20 replications."""
    itemgen = engine.substream(seed, 0, _ITEMGEN_STREAM, 0)
    rostergen = engine.substream(seed, 0, _ROSTER_STREAM, 0)
    items = [
        Item(id=f"i{idx + 1:03d}", size_loc=size)
        for idx, size in enumerate(_preset_sizes(itemgen))
    ]
    scenario = Scenario(
        items=items,
        persons=_preset_roster(rostergen),
        calibration=Calibration(),
        policy=policy or InspectionPolicy(kind=PolicyKind.ALL, team_size=3),
        switches=Switches(),
        seed=seed,
        replications=replications,
    )
    return validate_scenario(scenario)


@dataclass
class Preset:
    name: str
    description: str
    study: str
    build: Callable[[], Scenario] = field(repr=False)

    def scenario(self) -> Scenario:
        return self.build()


PRESETS: dict[str, Preset] = {
    "table1-policy-comparison": Preset(
        name="table1-policy-comparison",
        description=(
            "Compare no inspections vs inspecting everything vs inspecting items "
            "above 35 defects/KLOC on a 100-item, 20-person project."
        ),
        study="comparison",
        build=build_project_scenario,
    ),
    "fig3-team-sweep": Preset(
        name="fig3-team-sweep",
        description=(
            "Sweep the inspection team size from 1 to 10 on the same project "
            "and chart found/missed defects, effort and duration."
        ),
        study="sweep",
        build=build_project_scenario,
    ),
}
