"""Request/response models for the run service."""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

StudyKind = Literal["single", "comparison", "sweep"]
RunState = Literal["pending", "running", "done", "failed"]


class SubmitRunRequest(BaseModel):
    scenario: dict[str, Any]
    study: StudyKind = "single"
    label: Optional[str] = None
    sweep_sizes: Optional[list[int]] = Field(default=None, description="sweep study only")


class SubmitRunResponse(BaseModel):
    id: str


class RunSummary(BaseModel):
    id: str
    study: StudyKind
    label: Optional[str] = None
    state: RunState
    submitted_at: float
    finished_at: Optional[float] = None


class RunRecordModel(RunSummary):
    started_at: Optional[float] = None
    error: Optional[str] = None
    scenario: dict[str, Any]
    sweep_sizes: Optional[list[int]] = None
    results: Optional[dict[str, Any]] = None


class PresetModel(BaseModel):
    name: str
    description: str
    study: StudyKind
    scenario: dict[str, Any]


class FieldError(BaseModel):
    field: str
    message: str
