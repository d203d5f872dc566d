"""Command-line entry point.

Subcommands:
  run     drive the controller from a replayed trace or a live socket,
          stream telemetry, print the end-of-run summary
  tables  render the calibration tables (timing, power, latency budget)
          from the live models
  verify  run the invariant self-checks
  emit    send face-count events to a running server

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__, controller, event_bus, latency_budget, telemetry, verify
from .profiles import ProfileError, models_from_profile
from .timing_model import APU, PL, PRINTED_ACCELERATION, TABLE_EXTRACTED

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3

DEMO_TRACE = [(0, 0), (1000, 1), (1000, 2), (1000, 3)]

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


def _parse_address(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise ConfigError(f"address must be host:port, got {text!r}")
    return (host or "127.0.0.1", int(port))


def _load_scenario(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError(f"scenario {path} must be a JSON object")
    return obj


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="socrm", description="FPGA SoC resource management layer simulator")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario")
    p_run.add_argument("config", nargs="?", help="scenario JSON file")
    p_run.add_argument("--trace", help="trace file (delay_us faces per line)")
    p_run.add_argument("--listen", help="host:port to accept live events on")
    p_run.add_argument("--mechanism", choices=[controller.CLOCK_GATING,
                                               controller.PARTIAL_BITSTREAM])
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--jitter", type=float,
                       help="APU timing jitter fraction, e.g. 0.1")
    p_run.add_argument("--fast-forward", action="store_true", default=None,
                       help="replay without wall-clock delays (default)")
    p_run.add_argument("--wall-clock", action="store_true",
                       help="honor trace delays in real time")
    p_run.add_argument("--telemetry-file")
    p_run.add_argument("--telemetry-socket")
    p_run.add_argument("--profile", help="hardware profile JSON")
    p_run.add_argument("--max-events", type=int,
                       help="stop live mode after this many events")
    p_run.add_argument("--idle-timeout", type=float, default=None,
                       help="live mode: stop after this many idle seconds (default 5)")

    sub.add_parser("tables", help="render the calibration tables")

    p_verify = sub.add_parser("verify", help="run the invariant self-checks")
    p_verify.add_argument("--inject-fault", action="store_true",
                          help=argparse.SUPPRESS)

    p_emit = sub.add_parser("emit", help="send events to a running server")
    p_emit.add_argument("--target", required=True, help="host:port")
    p_emit.add_argument("--faces", type=int, required=True, action="append",
                        help="face count; repeatable")
    return parser


def _merge_run_config(args) -> dict:
    cfg = {
        "mechanism": controller.CLOCK_GATING,
        "seed": 0,
        "jitter": 0.0,
        "fast_forward": True,
        "trace": None,
        "trace_path": None,
        "listen": None,
        "telemetry_file": None,
        "telemetry_socket": None,
        "profile": None,
        "max_events": None,
        "idle_timeout": 5.0,
    }
    if args.config:
        scenario = _load_scenario(args.config)
        unknown = set(scenario) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown scenario fields: {sorted(unknown)}")
        cfg.update(scenario)
    for key in ("trace", "listen", "mechanism", "seed", "jitter",
                "telemetry_file", "telemetry_socket", "profile",
                "max_events", "idle_timeout"):
        value = getattr(args, key if key != "trace" else "trace", None)
        if key == "trace":
            if value is not None:
                cfg["trace_path"] = value
        elif value is not None:
            cfg[key] = value
    if args.wall_clock:
        cfg["fast_forward"] = False
    elif args.fast_forward:
        cfg["fast_forward"] = True
    if cfg["listen"] and (cfg["trace"] or cfg["trace_path"]):
        raise ConfigError("choose either a trace or a listen address, not both")
    if cfg["mechanism"] not in (controller.CLOCK_GATING, controller.PARTIAL_BITSTREAM):
        raise ConfigError(f"unknown mechanism {cfg['mechanism']!r}")
    return cfg


def _event_source(cfg, out):
    if cfg["listen"]:
        address = _parse_address(cfg["listen"])
        server = event_bus.EventServer(*address).start()
        out.write(f"listening on {server.address[0]}:{server.address[1]}\n")

        def events():
            count = 0
            for event in server.events(timeout=cfg["idle_timeout"]):
                yield event
                count += 1
                if cfg["max_events"] and count >= cfg["max_events"]:
                    break
        return events(), server
    if cfg["trace_path"]:
        trace = event_bus.load_trace(cfg["trace_path"])
    elif cfg["trace"] is not None:
        trace = [tuple(entry) for entry in cfg["trace"]]
    else:
        trace = DEMO_TRACE
    return event_bus.replay(trace, fast_forward=cfg["fast_forward"]), None


def cmd_run(args, out=None) -> int:
    out = out if out is not None else sys.stdout
    cfg = _merge_run_config(args)
    timing, power = models_from_profile(
        cfg["profile"], jitter_pct=cfg["jitter"], seed=cfg["seed"])
    ctrl = controller.Controller(timing, power, mechanism=cfg["mechanism"],
                                 seed=cfg["seed"])
    events, server = _event_source(cfg, out)

    reports: list[controller.ExecutionReport] = []
    samples: list[telemetry.TelemetrySample] = []
    try:
        for event in events:
            state, action, report = ctrl.process_event(event)
            reports.append(report)
            samples.append(telemetry.take_sample(state, power, report,
                                                 event.timestamp_us))
    except KeyboardInterrupt:
        out.write("interrupted; draining\n")
    finally:
        if server is not None:
            server.stop()

    delivered = []
    if cfg["telemetry_file"]:
        delivered.append(("file", telemetry.export_to_file(
            samples, cfg["telemetry_file"])))
    if cfg["telemetry_socket"]:
        delivered.append(("socket", telemetry.export_to_socket(
            samples, _parse_address(cfg["telemetry_socket"]))))

    _write_summary(out, reports, power, delivered, server)
    return EXIT_OK


def _write_summary(out, reports, power, delivered, server):
    out.write("== action log ==\n")
    for r in reports:
        a = r.action
        line = (f"event seq={r.event.seq} faces={r.event.faces} t={r.event.timestamp_us}us"
                f" -> {a.kind} {a.from_config} -> {a.to_config}"
                f" overhead={a.overhead_us:.0f}us")
        if r.mse is not None:
            line += f" mse={r.mse:.3e}"
        out.write(line + "\n")

    out.write("== dwell / energy ==\n")
    dwell: dict = {}
    for i, r in enumerate(reports):
        if i + 1 < len(reports):
            span = reports[i + 1].event.timestamp_us - r.event.timestamp_us
        else:
            span = 0
        key = r.state.config
        dwell[key] = dwell.get(key, 0) + span
    for (domain, points), us in sorted(dwell.items(), key=lambda kv: kv[0][1]):
        mw = power.power_breakdown(domain, points).total_mw
        out.write(f"({domain}, {points}): dwell {us} us @ {mw:.0f} mW\n")
    out.write(f"energy estimate: {telemetry.energy_mj(dwell, power):.3f} mJ\n")

    out.write("== totals ==\n")
    non_noop = sum(1 for r in reports if r.action.kind != controller.NO_OP)
    out.write(f"events processed: {len(reports)}\n")
    out.write(f"reconfigurations applied: {non_noop}\n")
    if reports:
        out.write(f"final state: {reports[-1].state.config} "
                  f"gen={reports[-1].state.generation}\n")
    for sink, count in delivered:
        out.write(f"telemetry delivered ({sink}): {count}\n")
    if server is not None:
        out.write(f"malformed lines: {server.malformed_count}, "
                  f"dropped events: {server.dropped_count}\n")


def _render_table1(timing, out):
    out.write("Table: APU vs PL FFT execution time\n")
    out.write(f"{'FFT points':>10}  {'APU (us)':>10}  {'PL (us)':>10}  Acceleration\n")
    for n in timing.calibrated_sizes(APU):
        apu = timing.lookup_exec_time(APU, n)
        pl = timing.lookup_exec_time(PL, n)
        factor = timing.acceleration_factor(n)
        apu_s = f"({apu.exec_time_us:g})" if (APU, n) in TABLE_EXTRACTED else f"{apu.exec_time_us:g}"
        pl_s = f"({pl.exec_time_us:g})" if (PL, n) in TABLE_EXTRACTED else f"{pl.exec_time_us:g}"
        printed = PRINTED_ACCELERATION.get(n)
        note = ""
        if printed is not None and abs(factor - printed) > 0.05:
            note = f"  [calibration source prints {printed}; computed ratio kept]"
        out.write(f"{n:>10}  {apu_s:>10}  {pl_s:>10}  {factor:.2f}{note}\n")


def _render_table2(power, out):
    out.write("\nTable: DDR/APU/PL power breakdown per configuration (mW)\n")
    out.write(f"{'FFT points':>10}  {'DDR':>7}  {'APU':>7}  {'PL':>7}  {'Total':>7}\n")
    for domain, points in power.configurations():
        b = power.power_breakdown(domain, points)
        apu_s = f"({b.apu_mw:g})" if APU in b.static_rails else f"{b.apu_mw:g}"
        pl_s = f"({b.pl_mw:g})" if PL in b.static_rails else f"{b.pl_mw:g}"
        out.write(f"{points:>10}  {b.ddr_mw:>7g}  {apu_s:>7}  {pl_s:>7}  {b.total_mw:>7g}\n")
    out.write("(brackets: static power of the rail not hosting the function)\n")


def cmd_tables(out=None) -> int:
    out = out if out is not None else sys.stdout
    timing, power = models_from_profile(None)
    _render_table1(timing, out)
    _render_table2(power, out)
    out.write("\nTable: iFFT offload latency budget\n")
    report = latency_budget.default_offload_budget()
    out.write(report.render() + "\n")
    return EXIT_OK


def cmd_verify(inject_fault: bool = False, out=None) -> int:
    out = out if out is not None else sys.stdout
    results = verify.run_checks(inject_fault=inject_fault)
    failed = 0
    for name, passed, detail in results:
        status = "PASS" if passed else "FAIL"
        out.write(f"[{status}] {name}: {detail}\n")
        failed += 0 if passed else 1
    out.write(f"{len(results) - failed}/{len(results)} checks passed\n")
    return EXIT_OK if failed == 0 else EXIT_VERIFY_FAILED


def cmd_emit(args, out=None) -> int:
    out = out if out is not None else sys.stdout
    address = _parse_address(args.target)
    with event_bus.Emitter(address) as emitter:
        for faces in args.faces:
            event = emitter.emit(faces)
            out.write(f"sent seq={event.seq} faces={event.faces}\n")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "tables":
            return cmd_tables()
        if args.command == "verify":
            return cmd_verify(inject_fault=args.inject_fault)
        if args.command == "emit":
            return cmd_emit(args)
        raise AssertionError(f"unhandled command {args.command}")
    except (ConfigError, ProfileError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except event_bus.TransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR
    except (OSError, RuntimeError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
