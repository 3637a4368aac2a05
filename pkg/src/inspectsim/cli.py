"""Command-line interface.

Study commands (simulate/compare/sweep) execute locally and write the same
files the service emits.  ``serve`` starts the HTTP service; ``submit`` and
``status`` are thin clients for a running service.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from inspectsim import experiment
from inspectsim.domain import (
    ScenarioError,
    load_scenario,
    save_scenario,
    scenario_to_dict,
    validate_scenario,
)
from inspectsim.policy import InspectionPolicy, PolicyKind


def _parse_sizes(text: str) -> list[int]:
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",") if part]


def _load(args: argparse.Namespace):
    scenario = load_scenario(args.scenario)
    if getattr(args, "seed", None) is not None:
        scenario.seed = args.seed
    if getattr(args, "replications", None) is not None:
        scenario.replications = args.replications
    if getattr(args, "policy", None) is not None:
        scenario.policy = InspectionPolicy(
            kind=PolicyKind(args.policy),
            threshold=args.threshold if args.threshold is not None else scenario.policy.threshold,
            team_size=args.team_size if args.team_size is not None else scenario.policy.team_size,
        )
    else:
        if getattr(args, "team_size", None) is not None:
            scenario.policy.team_size = args.team_size
        if getattr(args, "threshold", None) is not None:
            scenario.policy.threshold = args.threshold
    return validate_scenario(scenario)


def _study(args: argparse.Namespace, study: str, sizes=None) -> int:
    scenario = _load(args)
    out_dir = Path(args.out)
    results = experiment.run_study(
        scenario, study, out_dir=out_dir, sweep_sizes=sizes, trace=args.trace
    )
    print(f"wrote {out_dir / 'results.csv'} and {out_dir / 'summary.json'}")
    if study == "comparison":
        for row in results["rows"]:
            print(
                f"  {row['variant']:18s} effort {row['metrics']['total_effort']['mean']:10.2f}  "
                f"duration {row['metrics']['duration']['mean']:8.2f}"
            )
    elif study == "sweep":
        for point in results["points"]:
            print(
                f"  team {point['team_size']:2d}  found {point['defects_found']:8.2f}  "
                f"effort {point['total_effort']:10.2f}"
            )
    else:
        for name, stats in results["metrics"].items():
            print(f"  {name:26s} mean {stats['mean']:10.2f}  std {stats['std']:8.2f}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    return _study(args, "single")


def cmd_compare(args: argparse.Namespace) -> int:
    return _study(args, "comparison")


def cmd_sweep(args: argparse.Namespace) -> int:
    return _study(args, "sweep", sizes=_parse_sizes(args.sizes))


def cmd_preset(args: argparse.Namespace) -> int:
    if args.name is None:
        for preset in experiment.PRESETS.values():
            print(f"{preset.name:26s} [{preset.study}] {preset.description}")
        return 0
    if args.name not in experiment.PRESETS:
        print(f"unknown preset {args.name!r}", file=sys.stderr)
        return 2
    scenario = experiment.PRESETS[args.name].scenario()
    if args.out:
        save_scenario(scenario, args.out)
        print(f"wrote {args.out}")
    else:
        json.dump(scenario_to_dict(scenario), sys.stdout, indent=2, sort_keys=True)
        print()
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from inspectsim.service import create_app

    app = create_app(data_dir=args.data_dir, workers=args.workers)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_submit(args: argparse.Namespace) -> int:
    import httpx

    scenario = validate_scenario(load_scenario(args.scenario))
    payload = {
        "scenario": scenario_to_dict(scenario),
        "study": args.study,
        "label": args.label,
    }
    response = httpx.post(f"{args.url}/api/runs", json=payload, timeout=30.0)
    if response.status_code != 200:
        print(f"rejected ({response.status_code}): {response.text}", file=sys.stderr)
        return 1
    print(response.json()["id"])
    return 0


def cmd_status(args: argparse.Namespace) -> int:
    import httpx

    response = httpx.get(f"{args.url}/api/runs/{args.id}", timeout=30.0)
    if response.status_code != 200:
        print(f"error ({response.status_code}): {response.text}", file=sys.stderr)
        return 1
    record = response.json()
    print(record["state"])
    if record["state"] == "failed":
        print(record.get("error", ""), file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inspectsim",
        description="Discrete-event what-if simulator for planning code inspections",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_study_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("scenario", help="scenario file (JSON)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--replications", type=int, default=None)
        p.add_argument("--out", default="results", help="output directory")
        p.add_argument("--trace", action="store_true", help="emit per-replication event traces")

    p = sub.add_parser("simulate", help="run one scenario's replications")
    add_study_args(p)
    p.add_argument("--policy", choices=[k.value for k in PolicyKind], default=None)
    p.add_argument("--team-size", dest="team_size", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="policy comparison study")
    add_study_args(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="inspection team size sweep")
    add_study_args(p)
    p.add_argument("--sizes", default="1..10", help='e.g. "1..10" or "2,3,4"')
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("preset", help="list presets or write one as a scenario file")
    p.add_argument("--name", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("serve", help="start the HTTP run service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--workers", type=int, default=None, help="run worker count")
    p.add_argument("--data-dir", dest="data_dir", default=os.environ.get("INSPECTSIM_DATA_DIR"))
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("submit", help="submit a scenario to a running service")
    p.add_argument("scenario")
    p.add_argument("--study", choices=["single", "comparison", "sweep"], default="single")
    p.add_argument("--label", default=None)
    p.add_argument("--url", default="http://127.0.0.1:8000")
    p.set_defaults(func=cmd_submit)

    p = sub.add_parser("status", help="query a submitted run")
    p.add_argument("id")
    p.add_argument("--url", default="http://127.0.0.1:8000")
    p.set_defaults(func=cmd_status)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"file not found: {exc.filename}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
