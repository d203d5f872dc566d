"""Desk-scale simulator of an event-driven FPGA SoC resource management layer.

Migrates and scales an FFT function between a software execution domain
and an emulated fixed-point hardware domain, driven by face-count events,
with calibrated timing/power models, a 5G NR low-PHY latency-budget
analyzer and line-delimited telemetry export.
"""

__version__ = "0.1.0"
