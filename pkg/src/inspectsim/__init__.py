"""What-if simulator for software projects with code inspections.

Items flow through design, coding, optional inspection, rework and a
test phase that continues until a target defect density is reached, so
end quality stays constant while effort and duration respond to the
inspection policy.  The package bundles the discrete-event engine, the
quantitative sub-process models, a replication/study harness, data
calibration tooling and an HTTP run service.
"""

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
from inspectsim.engine import run
from inspectsim.experiment import policy_comparison, run_replications, team_size_sweep
from inspectsim.policy import InspectionPolicy, PolicyKind

__version__ = "0.1.0"

__all__ = [
    "Calibration",
    "InspectionPolicy",
    "Item",
    "Person",
    "PolicyKind",
    "RunResult",
    "Scenario",
    "ScenarioError",
    "Switches",
    "policy_comparison",
    "run",
    "run_replications",
    "team_size_sweep",
    "validate_scenario",
    "__version__",
]
