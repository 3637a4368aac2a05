"""CLI subcommands: studies, presets, serve/submit/status round trip."""

import filecmp
import json
import socket
import threading
import time

import pytest

from conftest import make_scenario
from inspectsim.cli import main, _parse_sizes
from inspectsim.domain import save_scenario


@pytest.fixture()
def scenario_file(tmp_path):
    path = tmp_path / "scenario.json"
    save_scenario(
        make_scenario(n_items=8, n_persons=4, noise=True, team_size=2, replications=2, seed=13),
        path,
    )
    return path


def test_parse_sizes_forms():
    assert _parse_sizes("1..10") == list(range(1, 11))
    assert _parse_sizes("2,3,4") == [2, 3, 4]


def test_preset_listing_and_export(tmp_path, capsys):
    assert main(["preset"]) == 0
    out = capsys.readouterr().out
    assert "table1-policy-comparison" in out and "fig3-team-sweep" in out
    target = tmp_path / "preset.json"
    assert main(["preset", "--name", "table1-policy-comparison", "--out", str(target)]) == 0
    data = json.loads(target.read_text())
    assert len(data["items"]) == 100
    assert main(["preset", "--name", "nope"]) == 2


def test_simulate_writes_results(scenario_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["simulate", str(scenario_file), "--out", str(out)]) == 0
    assert (out / "results.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["kind"] == "single"
    assert summary["replications"] == 2
    assert "total_effort" in capsys.readouterr().out


def test_simulate_policy_overrides(scenario_file, tmp_path):
    out = tmp_path / "none"
    assert main(
        ["simulate", str(scenario_file), "--policy", "none", "--replications", "1",
         "--out", str(out)]
    ) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["metrics"]["defects_found_inspection"]["mean"] == 0.0


def test_compare_is_byte_deterministic(scenario_file, tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["compare", str(scenario_file), "--out", str(out_a)]) == 0
    assert main(["compare", str(scenario_file), "--out", str(out_b)]) == 0
    assert filecmp.cmp(out_a / "results.csv", out_b / "results.csv", shallow=False)
    assert filecmp.cmp(out_a / "summary.json", out_b / "summary.json", shallow=False)


def test_sweep_with_explicit_sizes(scenario_file, tmp_path):
    out = tmp_path / "sweep"
    assert main(["sweep", str(scenario_file), "--sizes", "1,2", "--out", str(out)]) == 0
    lines = (out / "results.csv").read_text().splitlines()
    assert len(lines) == 3


def test_trace_flag_emits_event_log(scenario_file, tmp_path):
    out = tmp_path / "traced"
    assert main(
        ["simulate", str(scenario_file), "--replications", "1", "--trace", "--out", str(out)]
    ) == 0
    assert (out / "trace_rep000.csv").exists()


def test_invalid_scenario_file_is_a_clean_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"items": [], "persons": []}))
    assert main(["simulate", str(bad), "--out", str(tmp_path / "x")]) == 2
    assert "invalid scenario" in capsys.readouterr().err
    assert main(["simulate", str(tmp_path / "missing.json"), "--out", str(tmp_path / "y")]) == 2


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def test_submit_and_status_against_live_service(scenario_file, tmp_path, capsys):
    import uvicorn

    from inspectsim.service import create_app

    port = _free_port()
    app = create_app(data_dir=tmp_path / "data", workers=1)
    config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    try:
        deadline = time.monotonic() + 15
        while not server.started:
            if time.monotonic() > deadline:
                raise TimeoutError("service did not start")
            time.sleep(0.05)
        url = f"http://127.0.0.1:{port}"
        assert main(["submit", str(scenario_file), "--study", "single", "--url", url]) == 0
        run_id = capsys.readouterr().out.strip()
        assert run_id
        deadline = time.monotonic() + 30
        state = "pending"
        while state not in ("done", "failed") and time.monotonic() < deadline:
            assert main(["status", run_id, "--url", url]) == 0
            state = capsys.readouterr().out.strip().splitlines()[-1]
            time.sleep(0.05)
        assert state == "done"
        assert main(["status", "bogus", "--url", url]) == 1
    finally:
        server.should_exit = True
        thread.join(timeout=10)
