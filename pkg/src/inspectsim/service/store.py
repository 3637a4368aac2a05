"""Directory-per-run persistence for the service.

Each run owns ``<data_dir>/runs/<id>/`` holding ``record.json`` plus the
files the experiment module emits (``results.csv``, ``summary.json``).  A
small ``index.json`` caches the listing; when it is missing or stale the
store rebuilds it from the record files, so records survive restarts.
State transitions are serialized per store by a lock.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional


@dataclass
class RunRecord:
    id: str
    study: str
    scenario: dict[str, Any]
    label: Optional[str] = None
    sweep_sizes: Optional[list[int]] = None
    state: str = "pending"
    submitted_at: float = 0.0
    started_at: Optional[float] = None
    finished_at: Optional[float] = None
    error: Optional[str] = None
    results: Optional[dict[str, Any]] = field(default=None)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


class UnknownRunError(KeyError):
    pass


class RunStore:
    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        self.runs_dir = self.root / "runs"
        self.runs_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._records: dict[str, RunRecord] = {}
        self._load()

    # --- loading / persistence -------------------------------------------

    def _load(self) -> None:
        for record_path in sorted(self.runs_dir.glob("*/record.json")):
            try:
                raw = json.loads(record_path.read_text())
                record = RunRecord(**raw)
            except (ValueError, TypeError):
                continue
            # A run interrupted by a restart can never finish.
            if record.state in ("pending", "running"):
                record.state = "failed"
                record.error = "interrupted by service restart"
                record.finished_at = record.finished_at or time.time()
                self._write(record)
            self._records[record.id] = record
        self._write_index()

    def _run_dir(self, run_id: str) -> Path:
        return self.runs_dir / run_id

    def _write(self, record: RunRecord) -> None:
        path = self._run_dir(record.id)
        path.mkdir(parents=True, exist_ok=True)
        (path / "record.json").write_text(
            json.dumps(record.to_dict(), indent=2, sort_keys=True) + "\n"
        )

    def _write_index(self) -> None:
        index = [
            {
                "id": r.id,
                "study": r.study,
                "label": r.label,
                "state": r.state,
                "submitted_at": r.submitted_at,
                "finished_at": r.finished_at,
            }
            for r in sorted(self._records.values(), key=lambda r: r.submitted_at)
        ]
        (self.root / "index.json").write_text(json.dumps(index, indent=2) + "\n")

    # --- API ----------------------------------------------------------------

    def create(
        self,
        scenario: dict[str, Any],
        study: str,
        label: Optional[str] = None,
        sweep_sizes: Optional[list[int]] = None,
    ) -> RunRecord:
        record = RunRecord(
            id=uuid.uuid4().hex[:12],
            study=study,
            scenario=scenario,
            label=label,
            sweep_sizes=sweep_sizes,
            submitted_at=time.time(),
        )
        with self._lock:
            self._records[record.id] = record
            self._write(record)
            self._write_index()
        return record

    def get(self, run_id: str) -> RunRecord:
        with self._lock:
            if run_id not in self._records:
                raise UnknownRunError(run_id)
            return self._records[run_id]

    def list(
        self, state: Optional[str] = None, study: Optional[str] = None
    ) -> list[RunRecord]:
        with self._lock:
            records = sorted(self._records.values(), key=lambda r: r.submitted_at)
        if state:
            records = [r for r in records if r.state == state]
        if study:
            records = [r for r in records if r.study == study]
        return records

    def run_dir(self, run_id: str) -> Path:
        self.get(run_id)
        return self._run_dir(run_id)

    def mark_running(self, run_id: str) -> RunRecord:
        return self._transition(run_id, "pending", "running", started_at=time.time())

    def mark_done(self, run_id: str, results: dict[str, Any]) -> RunRecord:
        return self._transition(
            run_id, "running", "done", results=results, finished_at=time.time()
        )

    def mark_failed(self, run_id: str, error: str) -> RunRecord:
        return self._transition(
            run_id, "running", "failed", error=error, finished_at=time.time()
        )

    def _transition(self, run_id: str, expected: str, new_state: str, **updates: Any) -> RunRecord:
        with self._lock:
            if run_id not in self._records:
                raise UnknownRunError(run_id)
            record = self._records[run_id]
            if record.state != expected:
                raise ValueError(
                    f"run {run_id}: cannot move {record.state} -> {new_state} "
                    f"(expected {expected})"
                )
            record.state = new_state
            for key, value in updates.items():
                setattr(record, key, value)
            self._write(record)
            self._write_index()
            return record
