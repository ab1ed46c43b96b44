"""Operator command line: run/replay scenarios, benchmark latency,
validate rulebooks, and size QR prints."""
from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path

from .qr import QrSizingParams, QrSizingError, adverse_distance_factor, qr_min_size

BROKER_ENV = "FOGMIND_BROKER"


def _parse_broker(url: str) -> tuple[str, int]:
    spec = url
    if spec.startswith("tcp://"):
        spec = spec[len("tcp://"):]
    host, sep, port = spec.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"broker must look like tcp://host:port, got {url!r}")
    return host, int(port)


def _broker_arg(args) -> "tuple[str, int] | None":
    url = args.broker or os.environ.get(BROKER_ENV)
    return _parse_broker(url) if url else None


def _resolve_rules_text(path: str) -> str:
    p = Path(path)
    if p.exists():
        return p.read_text(encoding="utf-8")
    shipped = resources.files("fogmind").joinpath(f"data/{path}")
    if shipped.is_file():
        return shipped.read_text(encoding="utf-8")
    raise FileNotFoundError(f"no such rulebook: {path}")


# -- subcommands -----------------------------------------------------------


def cmd_run(args) -> int:
    from .service.runner import run

    out = args.out or f"runs/{args.scenario.replace('/', '_')}"
    result = run(
        args.scenario,
        out,
        rate_hz=args.rate,
        broker=_broker_arg(args),
        ws_port=args.ws_port,
        realtime=args.realtime,
    )
    print(f"scenario {result.scenario}: {result.ticks} ticks, "
          f"{result.dispatched} dispatches")
    print(f"dispatch log: {result.dispatch_log}")
    print(f"readings log: {result.readings_log}")
    return 0


def cmd_replay(args) -> int:
    from .service.runner import replay

    out = args.out or str(Path(args.readings).parent / "replay")
    log = replay(args.readings, out, rate_hz=args.rate)
    print(f"dispatch log: {log}")
    return 0


def cmd_bench(args) -> int:
    from .service.runner import bench, format_bench_report

    result = bench(probes=args.probes, rate_hz=args.rate,
                   broker=_broker_arg(args))
    print(format_bench_report(result))
    if args.json:
        Path(args.json).write_text(
            json.dumps(result, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"report written: {args.json}")
    if result["lost"]:
        print(f"error: {result['lost']} probe(s) lost", file=sys.stderr)
        return 1
    return 0


def cmd_rules_check(args) -> int:
    from .rules.parser import parse_rulebook
    from .rules.validate import validate

    text = _resolve_rules_text(args.rulebook)
    rb = parse_rulebook(text)
    diagnostics = validate(rb)
    for d in diagnostics:
        print(f"warning: {d}", file=sys.stderr)
    print(f"OK, {len(rb.rules)} rules")
    return 0


def cmd_qr_size(args) -> int:
    if args.kdis is not None:
        factor = args.kdis
    else:
        factor = adverse_distance_factor(
            low_light=args.low_light,
            light_colored=args.light_colored,
            off_angle=args.off_angle,
        )
    params = QrSizingParams(
        scan_distance_mm=args.dscan,
        distance_factor=factor,
        modules_per_side=args.modules,
        pixels_per_module=args.ppm,
        camera_pixels=args.mp * 1e6,
        fov_mm=args.fov,
    )
    result = qr_min_size(params)
    print(f"L_min1 = {result['L_min1']:.2f} mm  (scan-distance bound, "
          f"factor {params.distance_factor})")
    print(f"L_min2 = {result['L_min2']:.2f} mm  (sensor bound: {result['ppq_px']:.0f} px "
          f"per side on a {result['ccd_w_px']:.1f} px sensor width)")
    print(f"L_min  = {result['L_min']:.2f} mm")
    if "note" in result:
        print(result["note"])
    return 0


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fogmind",
        description="ambient-assistance toolkit: scenarios, latency bench, "
                    "rulebook checks and QR print sizing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a scenario against a broker")
    p.add_argument("--scenario", required=True,
                   help="shipped scenario name or path to a scenario JSON")
    p.add_argument("--broker", default=None,
                   help=f"tcp://host:port (default: ${BROKER_ENV} or in-process)")
    p.add_argument("--rate", type=float, default=2.0, help="control rate in Hz")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--ws-port", type=int, default=None,
                   help="serve the console WebSocket bridge on this port")
    p.add_argument("--realtime", action="store_true",
                   help="pace virtual time against the wall clock")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("replay", help="re-drive a recorded readings log")
    p.add_argument("readings", help="readings.jsonl from a previous run")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--rate", type=float, default=2.0, help="control rate in Hz")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("bench", help="measure publish-to-dispatch latency")
    p.add_argument("--probes", type=int, default=50, help="probes per message kind")
    p.add_argument("--rate", type=float, default=2.0, help="control rate in Hz")
    p.add_argument("--broker", default=None,
                   help=f"tcp://host:port (default: ${BROKER_ENV} or in-process)")
    p.add_argument("--json", default=None, help="also write the report as JSON")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("rules", help="rulebook tools")
    rules_sub = p.add_subparsers(dest="rules_command", required=True)
    pc = rules_sub.add_parser("check", help="parse and validate a rulebook")
    pc.add_argument("rulebook", help="path, or the name of a shipped rulebook")
    pc.set_defaults(func=cmd_rules_check)

    p = sub.add_parser("qr-size", help="minimum printable QR size")
    p.add_argument("--dscan", type=float, default=300.0,
                   help="maximum scan distance in mm")
    p.add_argument("--mp", type=float, default=12.0,
                   help="camera resolution in megapixels")
    p.add_argument("--fov", type=float, default=340.0,
                   help="field of view width in mm")
    p.add_argument("--modules", type=int, default=21,
                   help="QR modules per side")
    p.add_argument("--ppm", type=int, default=10,
                   help="camera pixels per module")
    p.add_argument("--kdis", type=int, default=None,
                   help="distance factor override (7..10)")
    p.add_argument("--low-light", action="store_true",
                   help="derate for low light")
    p.add_argument("--light-colored", action="store_true",
                   help="derate for a light-colored print")
    p.add_argument("--off-angle", action="store_true",
                   help="derate for an off-angle scan")
    p.set_defaults(func=cmd_qr_size)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130
    except (OSError, ValueError, RuntimeError, QrSizingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
