"""Self-verification suite aggregating the library's invariant checks.

Each check returns (name, passed, detail); `run_checks` executes all of
them deterministically.  A fault-injection hook (corrupting one twiddle
factor of a locally built plan) exists so the oracle check's sensitivity
is itself testable.
"""

from __future__ import annotations

import numpy as np

from . import controller, fft_engines, latency_budget
from .power_model import PowerModel
from .timing_model import TimingModel


def dft_direct(x: np.ndarray) -> np.ndarray:
    """Direct O(N^2) DFT summation; the independent reference."""
    x = np.asarray(x, dtype=np.complex128)
    n = len(x)
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) @ x


def check_fft_oracle(inject_fault: bool = False):
    rng = np.random.default_rng(1234)
    worst = 0.0
    for n in (8, 16, 64):
        plan = fft_engines.FftPlan.create(n)
        if inject_fault and n == 64:
            plan.twiddles[3] += 0.05  # test hook: corrupt one twiddle factor
        for _ in range(20):
            x = rng.uniform(-0.5, 0.5, n) + 1j * rng.uniform(-0.5, 0.5, n)
            err = np.max(np.abs(fft_engines.fft_float(x, plan=plan) - dft_direct(x)))
            worst = max(worst, err)
    return ("fft-oracle-equivalence", worst < 1e-10, f"max abs error {worst:.3e}")


def check_parseval():
    rng = np.random.default_rng(5678)
    worst = 0.0
    for n in (8, 1024, 2048, 4096):
        x = rng.uniform(-0.5, 0.5, n) + 1j * rng.uniform(-0.5, 0.5, n)
        time_e = np.sum(np.abs(x) ** 2)
        freq_e = np.sum(np.abs(fft_engines.fft_float(x)) ** 2) / n
        worst = max(worst, abs(time_e - freq_e) / time_e)
    return ("parseval", worst < 1e-9, f"max relative error {worst:.3e}")


def check_round_trip():
    rng = np.random.default_rng(91011)
    worst = 0.0
    for n in (8, 1024, 2048, 4096):
        x = rng.uniform(-0.5, 0.5, n) + 1j * rng.uniform(-0.5, 0.5, n)
        back = fft_engines.ifft_float(fft_engines.fft_float(x))
        worst = max(worst, np.max(np.abs(back - x)))
    return ("fft-round-trip", worst < 1e-9, f"max abs error {worst:.3e}")


def check_fixed_point_bound():
    rng = np.random.default_rng(121314)
    detail = []
    ok = True
    for n in (8, 1024):
        bound = fft_engines.fixed_point_error_bound(n)
        worst = 0.0
        for _ in range(20):
            x = rng.uniform(-0.5, 0.5, n) + 1j * rng.uniform(-0.5, 0.5, n)
            ref = fft_engines.fft_float(x)
            scaled = fft_engines.dequantize(
                fft_engines.fft_fixed(fft_engines.quantize(x))) * n
            worst = max(worst, np.max(np.abs(ref - scaled)))
        ok = ok and 0.0 < worst <= bound
        detail.append(f"N={n}: max dev {worst:.3e} <= {bound:.3e}")
    return ("fixed-point-error-bound", ok, "; ".join(detail))


def check_rule_map():
    configs = [controller.decide(f) for f in range(0, 64)]
    points = [p for _, p in configs]
    total = all(c in set(controller.RULES.values()) for c in configs)
    monotone = all(a <= b for a, b in zip(points, points[1:]))
    saturates = all(c == controller.RULES[3] for c in configs[3:])
    ok = total and monotone and saturates
    return ("rule-map-totality-monotonicity", ok,
            f"total={total} monotone={monotone} saturates={saturates}")


def check_power_additivity():
    power = PowerModel()
    ok = True
    for domain, points in power.configurations():
        b = power.power_breakdown(domain, points)
        ok = ok and b.total_mw == b.ddr_mw + b.apu_mw + b.pl_mw
    return ("power-additivity", ok, f"{len(power.configurations())} configurations")


def check_budget_arithmetic():
    report = latency_budget.default_offload_budget()
    sum_ok = report.total_us == sum(s.latency_us for s in report.steps)
    margin_ok = report.margin_us + report.total_us == report.deadline_us
    dma_ok = latency_budget.dma_transfer_latency(8192, 1.6e9) == 5.12
    ok = sum_ok and margin_ok and dma_ok and report.feasible and not report.ideal_feasible
    return ("budget-arithmetic", ok,
            f"total {report.total_us} us, margin {report.margin_us:.1f} us")


def check_timing_acceleration():
    timing = TimingModel()
    ok = all(timing.acceleration_factor(n) > 1 for n in timing.calibrated_sizes("PL"))
    factors = [timing.acceleration_factor(n) for n in (8, 1024, 2048, 4096)]
    increasing = all(a < b for a, b in zip(factors, factors[1:]))
    return ("timing-acceleration-factors", ok and increasing,
            "factors " + ", ".join(f"{f:.2f}" for f in factors))


ALL_CHECKS = (
    check_fft_oracle,
    check_parseval,
    check_round_trip,
    check_fixed_point_bound,
    check_rule_map,
    check_power_additivity,
    check_budget_arithmetic,
    check_timing_acceleration,
)


def run_checks(inject_fault: bool = False):
    results = []
    for check in ALL_CHECKS:
        if check is check_fft_oracle:
            results.append(check(inject_fault=inject_fault))
        else:
            results.append(check())
    return results
