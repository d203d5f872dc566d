"""Hardware calibration profiles for the timing and power models.

A profile is a JSON document so alternative hardware can be swapped in
without code changes; the embedded defaults reproduce the reference
device's calibration.  Layout:

    {
      "timing_us": {"APU": {"8": 0.28, ...}, "PL": {...}},
      "power_mw":  {"APU": {"8": [425, 2064, 1187], ...}, "PL": {...}},
      "static_mw": {"APU": 2024, "PL": 1187}
    }
"""

from __future__ import annotations

import json

from .power_model import PowerModel
from .timing_model import TimingModel


class ProfileError(ValueError):
    """Profile file is missing or malformed."""


def _flatten(section: dict, convert) -> dict:
    flat = {}
    for domain, by_points in section.items():
        for points, value in by_points.items():
            flat[(domain, int(points))] = convert(value)
    return flat


def load_profile(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ProfileError(f"cannot load profile {path}: {exc}") from exc
    out = {}
    try:
        if "timing_us" in obj:
            out["timing"] = _flatten(obj["timing_us"], float)
        if "power_mw" in obj:
            out["power"] = _flatten(obj["power_mw"], lambda v: tuple(float(x) for x in v))
        if "static_mw" in obj:
            out["static"] = {k: float(v) for k, v in obj["static_mw"].items()}
    except (TypeError, ValueError, AttributeError) as exc:
        raise ProfileError(f"malformed profile {path}: {exc}") from exc
    return out


def models_from_profile(path=None, **timing_kwargs) -> tuple[TimingModel, PowerModel]:
    """Build model instances from a profile file, or the embedded defaults."""
    if path is None:
        return TimingModel(**timing_kwargs), PowerModel()
    loaded = load_profile(path)
    timing = TimingModel(profile=loaded.get("timing"), **timing_kwargs)
    power = PowerModel(profile=loaded.get("power"), static_mw=loaded.get("static"))
    return timing, power
