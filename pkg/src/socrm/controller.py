"""Decision core of the resource management layer.

Maps face-count events to target FFT configurations, classifies the
reconfiguration action (scale, migrate, both, or no-op), applies modeled
reconfiguration overhead and maintains the deployed function state.  Each
applied decision also executes one FFT of the new configuration on a
synthetic input block (float path on APU, fixed-point path on PL) and
returns an execution report with modeled timing, power and, on PL, the
MSE against the floating-point reference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fft_engines
from .event_bus import FaceEvent
from .power_model import PowerBreakdown, PowerModel
from .timing_model import TimingModel

APU = "APU"
PL = "PL"

CLOCK_GATING = "clock-gating"
PARTIAL_BITSTREAM = "partial-bitstream"
PARTIAL_BITSTREAM_OVERHEAD_US = 10_000.0

NO_OP = "NoOp"
SCALE_ONLY = "ScaleOnly"
MIGRATE_ONLY = "MigrateOnly"
MIGRATE_AND_SCALE = "MigrateAndScale"

# rule table: face count -> (domain, points); counts above the last key
# share its configuration
RULES = {0: (APU, 8), 1: (APU, 1024), 2: (PL, 2048), 3: (PL, 4096)}

INITIAL_CONFIG = RULES[0]  # boot in the zero-faces configuration


class StaleActionError(RuntimeError):
    """Action was planned against a state that is no longer current."""


@dataclass(frozen=True)
class FunctionState:
    domain: str
    points: int
    pl_clock_gated: bool
    generation: int

    @property
    def config(self) -> tuple[str, int]:
        return (self.domain, self.points)


def initial_state() -> FunctionState:
    domain, points = INITIAL_CONFIG
    return FunctionState(domain, points, pl_clock_gated=(domain == APU), generation=0)


@dataclass(frozen=True)
class ReconfigAction:
    kind: str
    from_config: tuple[str, int]
    to_config: tuple[str, int]
    overhead_us: float
    mechanism: str


@dataclass(frozen=True)
class ExecutionReport:
    event: FaceEvent
    state: FunctionState
    action: ReconfigAction
    exec_time_us: float
    power: PowerBreakdown
    mse: float | None  # float-vs-fixed comparison; only when executing on PL


def decide(faces: int) -> tuple[str, int]:
    """Total rule map from face count to target configuration."""
    if faces < 0:
        raise ValueError("face count must be non-negative")
    return RULES[min(faces, max(RULES))]


def plan_action(current: FunctionState, target: tuple[str, int],
                mechanism: str = CLOCK_GATING) -> ReconfigAction:
    frm = current.config
    target = tuple(target)
    if frm == target:
        return ReconfigAction(NO_OP, frm, target, 0.0, mechanism)
    migrate = frm[0] != target[0]
    scale = frm[1] != target[1]
    if migrate and scale:
        kind = MIGRATE_AND_SCALE
    elif migrate:
        kind = MIGRATE_ONLY
    else:
        kind = SCALE_ONLY
    overhead = 0.0
    if mechanism == PARTIAL_BITSTREAM and migrate and target[0] == PL:
        overhead = PARTIAL_BITSTREAM_OVERHEAD_US
    return ReconfigAction(kind, frm, target, overhead, mechanism)


def apply_action(current: FunctionState, action: ReconfigAction) -> FunctionState:
    if action.from_config != current.config:
        raise StaleActionError(
            f"action planned from {action.from_config} but state is {current.config}")
    if action.kind == NO_OP:
        return current
    domain, points = action.to_config
    return FunctionState(domain, points,
                         pl_clock_gated=(domain == APU),
                         generation=current.generation + 1)


class Controller:
    """Single-writer state machine driven by face-count events.

    Events must be fed one at a time (serialize through a FIFO upstream);
    reports are immutable snapshots safe to hand to other threads.
    """

    def __init__(self, timing: TimingModel | None = None,
                 power: PowerModel | None = None,
                 mechanism: str = CLOCK_GATING, seed: int = 0):
        self.timing = timing if timing is not None else TimingModel()
        self.power = power if power is not None else PowerModel()
        self.mechanism = mechanism
        self._rng = np.random.default_rng(seed)
        self._state = initial_state()

    @property
    def state(self) -> FunctionState:
        return self._state

    def process_event(self, event: FaceEvent):
        """decide -> plan -> apply, then execute one FFT of the new config."""
        target = decide(event.faces)
        action = plan_action(self._state, target, self.mechanism)
        self._state = apply_action(self._state, action)
        report = self._execute(event, action)
        return self._state, action, report

    def _execute(self, event: FaceEvent, action: ReconfigAction) -> ExecutionReport:
        state = self._state
        n = state.points
        # synthetic stand-in for the DDR-played-back input signal
        x = self._rng.uniform(-0.5, 0.5, n) + 1j * self._rng.uniform(-0.5, 0.5, n)
        plan = fft_engines.get_plan(n)
        error = None
        if state.domain == PL:
            fixed_out = fft_engines.fft_fixed(fft_engines.quantize(x), plan=plan)
            reference = fft_engines.fft_float(x, plan=plan)
            scaled = fft_engines.dequantize(fixed_out) * n
            error = fft_engines.mse(reference, scaled)
        else:
            fft_engines.fft_float(x, plan=plan)
        exec_time = self.timing.sample_exec_time(state.domain, n)
        power = self.power.power_breakdown(state.domain, n)
        return ExecutionReport(event, state, action, exec_time, power, error)


def run_trace(events, controller: Controller):
    """Drive a controller from an event iterable; returns the report list."""
    reports = []
    for event in events:
        _, _, report = controller.process_event(event)
        reports.append(report)
    return reports


def rules_table() -> dict[int, tuple[str, int]]:
    return dict(RULES)
