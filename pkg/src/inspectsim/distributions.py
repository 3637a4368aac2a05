"""Named distribution store used by scenario calibrations.

A calibration carries a table of named distribution specs (plain dicts so
they serialize with the scenario file).  Multiplier-style entries must be
unbiased: the lognormal family here is parameterized to have mean exactly 1
so that switching noise on does not shift expected durations or counts.
"""

from __future__ import annotations

from typing import Any, Mapping

import numpy as np

FAMILIES = ("constant", "uniform", "normal", "lognormal")


class DistributionError(ValueError):
    """Raised for malformed distribution specs."""


def validate_spec(name: str, spec: Mapping[str, Any]) -> dict[str, Any]:
    """Check a spec dict and return a normalized copy."""
    if not isinstance(spec, Mapping):
        raise DistributionError(f"distribution {name!r}: spec must be a mapping")
    dist = spec.get("dist")
    if dist not in FAMILIES:
        raise DistributionError(
            f"distribution {name!r}: unknown family {dist!r} (expected one of {FAMILIES})"
        )
    out: dict[str, Any] = {"dist": dist}
    if dist == "constant":
        out["value"] = float(spec.get("value", 1.0))
    elif dist == "uniform":
        out["low"] = float(spec.get("low", 0.0))
        out["high"] = float(spec.get("high", 1.0))
        if out["high"] < out["low"]:
            raise DistributionError(f"distribution {name!r}: high < low")
    elif dist == "normal":
        out["mean"] = float(spec.get("mean", 1.0))
        out["sigma"] = float(spec.get("sigma", 0.0))
        if out["sigma"] < 0:
            raise DistributionError(f"distribution {name!r}: sigma < 0")
    elif dist == "lognormal":
        out["sigma"] = float(spec.get("sigma", 0.0))
        if out["sigma"] < 0:
            raise DistributionError(f"distribution {name!r}: sigma < 0")
    return out


def sample(spec: Mapping[str, Any], rng: np.random.Generator) -> float:
    """Draw one value from a validated spec."""
    dist = spec["dist"]
    if dist == "constant":
        return float(spec["value"])
    if dist == "uniform":
        return float(rng.uniform(spec["low"], spec["high"]))
    if dist == "normal":
        return float(rng.normal(spec["mean"], spec["sigma"]))
    if dist == "lognormal":
        return unit_lognormal(rng, spec["sigma"])
    raise DistributionError(f"unknown family {dist!r}")


def unit_lognormal(rng: np.random.Generator, sigma: float) -> float:
    """Lognormal multiplier with mean exactly 1 (sigma 0 degenerates to 1.0)."""
    return float(rng.lognormal(mean=-0.5 * sigma * sigma, sigma=sigma))
