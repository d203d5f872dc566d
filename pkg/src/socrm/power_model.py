"""Per-rail power model (DDR / APU / PL) of the device.

Power is a pure lookup of the deployed (domain, points) configuration;
the rail not hosting the FFT sits at its clock-gated static value.
Transition transients are not modeled: power switches step-wise at
reconfiguration completion.
"""

from __future__ import annotations

from dataclasses import dataclass

APU = "APU"
PL = "PL"

# static (idle) rail power in mW when the domain is not hosting the function
STATIC_MW = {APU: 2024.0, PL: 1187.0}

# (domain, points) -> (ddr_mw, apu_mw, pl_mw); the non-hosting rail is static
DEFAULT_POWER_PROFILE = {
    (APU, 8): (425.0, 2064.0, 1187.0),
    (APU, 1024): (537.0, 2224.0, 1187.0),
    (PL, 2048): (965.0, 2024.0, 1365.0),
    (PL, 4096): (1358.0, 2024.0, 1584.0),
}


class UncalibratedConfigError(KeyError):
    """No calibrated power row for the requested configuration."""


@dataclass(frozen=True)
class PowerBreakdown:
    ddr_mw: float
    apu_mw: float
    pl_mw: float
    total_mw: float
    static_rails: frozenset[str]


class PowerModel:
    def __init__(self, profile: dict | None = None, static_mw: dict | None = None):
        self.profile = dict(DEFAULT_POWER_PROFILE if profile is None else profile)
        self.static_mw = dict(STATIC_MW if static_mw is None else static_mw)

    def configurations(self) -> list[tuple[str, int]]:
        return sorted(self.profile, key=lambda k: k[1])

    def power_breakdown(self, domain: str, points: int) -> PowerBreakdown:
        try:
            ddr, apu, pl = self.profile[(domain, points)]
        except KeyError:
            raise UncalibratedConfigError(
                f"no calibrated power row for ({domain}, {points})") from None
        static = frozenset({PL} if domain == APU else {APU})
        return PowerBreakdown(ddr, apu, pl, ddr + apu + pl, static)

    def static_power(self, rail: str) -> float:
        return self.static_mw[rail]
