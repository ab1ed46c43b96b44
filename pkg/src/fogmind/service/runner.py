"""Scenario runner, deterministic replay, and the latency benchmark.

`run` drives a simulated world through a real loopback broker into one
DecisionService, advancing virtual time one control period per tick.
Every ingested reading, accepted caregiver command and tick boundary is
journaled to ``readings.jsonl`` so `replay` can re-drive the session and
reproduce the dispatch log byte for byte without any broker at all.
"""
from __future__ import annotations

import json
import math
import shutil
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..bus.broker import MqttBroker
from ..bus.client import MqttClient
from ..bus.codec import PositionFix, Reading, encode_position, encode_reading
from ..bus.offline import OfflineStore
from ..bus.topics import TOPIC_ACK, command_topic
from ..sim.scenario import Scenario, load_scenario
from ..sim.world import WorldState
from .service import DecisionService, ServiceConfig
from .wsbridge import WsBridge

# latency figures reported by the original remote deployment (hosted
# broker, handset client); printed for context, never asserted against
REFERENCE_FIGURES = (
    ("voice reminder, 50-trial protocol", 364.0),
    ("image reminder, 50-trial protocol", 106.0),
    ("voice reminder, 30-trial follow-up", 247.0),
    ("image reminder, 30-trial follow-up", 388.0),
    ("broker round-trip alone", 120.0),
)

_WATERMARK_TIMEOUT_S = 10.0


class RunJournal:
    """Append-only jsonl recording of everything a replay needs."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "a", encoding="utf-8")
        self._lock = threading.Lock()

    def _write(self, record: dict) -> None:
        line = json.dumps(record, sort_keys=True, separators=(",", ":"))
        with self._lock:
            self._fh.write(line + "\n")

    def reading(self, topic: str, payload: bytes) -> None:
        self._write({"kind": "reading", "topic": topic,
                     "body": payload.decode("utf-8", "replace")})

    def command(self, kind: str, payload: bytes, now_ms: int) -> None:
        self._write({"kind": "command", "cmd": kind, "t": now_ms,
                     "body": payload.decode("utf-8", "replace")})

    def tick(self, now_ms: int) -> None:
        self._write({"kind": "tick", "t": now_ms})

    def close(self) -> None:
        with self._lock:
            self._fh.flush()
            self._fh.close()


@dataclass
class RunResult:
    scenario: str
    out_dir: Path
    dispatch_log: Path
    readings_log: Path
    ticks: int
    dispatched: int
    console_records: list = field(default_factory=list)
    harness_applied: list = field(default_factory=list)
    report: dict = field(default_factory=dict)


def _await_watermark(store, marks: dict, timeout: float = _WATERMARK_TIMEOUT_S) -> None:
    """Block until the store has ingested every published (topic, seq)."""
    deadline = time.monotonic() + timeout
    for topic, seq in marks.items():
        while True:
            seen = store.seq_seen(topic)
            if seen is not None and seen >= seq:
                break
            if time.monotonic() > deadline:
                raise RuntimeError(
                    f"reading {topic} seq {seq} never reached the service "
                    f"(last seen: {seen})")
            time.sleep(0.001)


def run(
    source,
    out_dir,
    *,
    rate_hz: float = 2.0,
    broker: "tuple[str, int] | None" = None,
    ws_port: "int | None" = None,
    realtime: bool = False,
) -> RunResult:
    """Execute one scenario end to end over a real broker.

    broker is (host, port) of an external MQTT broker; None starts an
    in-process loopback broker for the duration of the run. realtime
    paces virtual time against the wall clock so a live console can
    watch; the default runs as fast as delivery allows.
    """
    sc = source if isinstance(source, Scenario) else load_scenario(str(source))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dispatch_log = out / "dispatch.log"
    readings_log = out / "readings.jsonl"
    state_path = out / "state.json"
    saf_root = out / "saf"
    # a rerun into the same directory starts a fresh session
    dispatch_log.unlink(missing_ok=True)
    readings_log.unlink(missing_ok=True)
    state_path.unlink(missing_ok=True)
    if saf_root.exists():
        shutil.rmtree(saf_root)

    cfg = ServiceConfig(
        rate_hz=rate_hz,
        dispatch_log_path=dispatch_log,
        state_path=state_path,
        saf_root=saf_root,
    )

    own_broker = None
    if broker is None:
        own_broker = MqttBroker().start()
        host, port = own_broker.host, own_broker.port
    else:
        host, port = broker

    svc = DecisionService(config=cfg)
    journal = RunJournal(readings_log)
    svc.journal = journal
    svc_client = MqttClient(host, port, client_id=f"fogmind-svc-{sc.name}"[:23])
    world_client = MqttClient(host, port, client_id=f"fogmind-sim-{sc.name}"[:23])
    bridge = None

    world = WorldState(sc)
    period = cfg.period_s
    n_ticks = math.ceil(sc.duration_s / period - 1e-9)
    caregiver = sorted(sc.caregiver_events, key=lambda e: e[0])
    harness = sorted(sc.harness_events, key=lambda e: e[0])
    console_online = True
    console_records: list = []
    harness_applied: list = []
    ticks = 0
    dispatched = 0

    try:
        svc_client.connect()
        svc.attach_bus(svc_client)
        world_client.connect()
        if ws_port is not None:
            bridge = WsBridge(svc, port=ws_port).start()
        wall_start = time.monotonic()

        for k in range(1, n_ticks + 1):
            emissions = world.step(period)
            marks: dict[str, int] = {}
            for e in emissions:
                if isinstance(e, PositionFix):
                    topic, body = e.topic, encode_position(e)
                else:
                    topic, body = e.topic, encode_reading(e)
                world_client.publish(topic, body)
                marks[topic] = e.seq
            _await_watermark(svc.store, marks)

            now_s = world.t
            now_ms = world.epoch_ms()
            while caregiver and caregiver[0][0] <= now_s + 1e-9:
                _, body = caregiver.pop(0)
                body = dict(body)
                kind = body.pop("kind")
                svc.submit_command(
                    kind, json.dumps(body).encode("utf-8"), now_ms=now_ms)
            while harness and harness[0][0] <= now_s + 1e-9:
                _, event = harness.pop(0)
                if event == "console_offline":
                    console_online = False
                elif event == "console_online":
                    console_online = True
                elif event == "saf_restart" and svc.saf is not None:
                    # model a service restart mid-outage: the journal is
                    # closed cold and recovered from disk
                    svc.saf.close()
                    svc.saf = OfflineStore(cfg.saf_root, cfg.saf_capacity)
                    for name in cfg.saf_subscribers:
                        svc.saf.register(name)
                harness_applied.append((now_s, event))

            dispatched += len(svc.tick(now_ms))
            ticks += 1
            if console_online and svc.saf is not None:
                console_records.extend(svc.saf.drain("console"))
            if realtime:
                lag = wall_start + k * period - time.monotonic()
                if lag > 0:
                    time.sleep(lag)

        if console_online and svc.saf is not None:
            console_records.extend(svc.saf.drain("console"))
        report = svc.report()
    finally:
        if bridge is not None:
            bridge.stop()
        world_client.close()
        svc_client.close()
        svc.close()
        journal.close()
        if own_broker is not None:
            own_broker.stop()

    return RunResult(
        scenario=sc.name,
        out_dir=out,
        dispatch_log=dispatch_log,
        readings_log=readings_log,
        ticks=ticks,
        dispatched=dispatched,
        console_records=console_records,
        harness_applied=harness_applied,
        report=report,
    )


def replay(readings_path, out_dir, *, rate_hz: float = 2.0) -> Path:
    """Re-drive a recorded session; returns the new dispatch log path.

    No broker, no journals: the recorded readings are ingested directly
    and ticks happen at the recorded virtual times, so the dispatch log
    comes out byte-identical to the original run's.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dispatch_log = out / "dispatch.log"
    dispatch_log.unlink(missing_ok=True)
    cfg = ServiceConfig(rate_hz=rate_hz, dispatch_log_path=dispatch_log)
    svc = DecisionService(config=cfg)
    try:
        with open(readings_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                kind = rec["kind"]
                if kind == "reading":
                    svc.ingest(rec["topic"], rec["body"].encode("utf-8"))
                elif kind == "command":
                    svc.submit_command(
                        rec["cmd"], rec["body"].encode("utf-8"), now_ms=rec["t"])
                elif kind == "tick":
                    svc.tick(rec["t"])
                else:
                    raise ValueError(f"unknown journal record kind {kind!r}")
    finally:
        svc.close()
    return dispatch_log


def audit_delivery(sent_lines: list, delivered: list) -> dict:
    """Seq-set audit between dispatch-log lines and drained journal records."""

    def seqs(lines):
        return [json.loads(bytes(l).decode("utf-8"))["seq"]
                for l in lines if bytes(l).strip()]

    sent = seqs([l.encode() if isinstance(l, str) else l for l in sent_lines])
    got = seqs([l.encode() if isinstance(l, str) else l for l in delivered])
    return {
        "sent": len(sent),
        "delivered": len(got),
        "missing": sorted(set(sent) - set(got)),
        "unexpected": sorted(set(got) - set(sent)),
        "duplicates": len(got) - len(set(got)),
        "fifo": got == sorted(got),
    }


# -- latency benchmark ----------------------------------------------------


def bench(
    *,
    probes: int = 50,
    rate_hz: float = 2.0,
    broker: "tuple[str, int] | None" = None,
    probe_gap_s: float = 0.05,
    timeout_s: float = 60.0,
) -> dict:
    """Measure publish-to-dispatch latency with background endpoint load.

    Publishes `probes` nonce-tagged reminder commands per message kind
    through a real broker while every registry endpoint emits periodic
    traffic and the decision loop ticks at rate_hz, then reports
    per-kind latency metrics and probe loss.
    """
    own_broker = None
    if broker is None:
        own_broker = MqttBroker().start()
        host, port = own_broker.host, own_broker.port
    else:
        host, port = broker

    svc = DecisionService(config=ServiceConfig(rate_hz=rate_hz))
    svc_client = MqttClient(host, port, client_id="fogmind-bench-svc")
    console = MqttClient(host, port, client_id="fogmind-bench-console")
    endpoints = svc.registry.endpoints
    stop = threading.Event()
    acked: set = set()
    ack_lock = threading.Lock()

    def on_ack(topic: str, payload: bytes) -> None:
        try:
            body = json.loads(payload)
        except ValueError:
            return
        if body.get("ok") and body.get("nonce"):
            with ack_lock:
                acked.add(body["nonce"])

    def traffic() -> None:
        seq = 0
        while not stop.is_set():
            seq += 1
            wall = int(time.time() * 1000)
            for ep in endpoints:
                r = Reading(topic=f"home/endpoint/{ep.name}", value=1.0,
                            unit="", timestamp=wall, seq=seq, device_id=ep.name)
                try:
                    console.publish(r.topic, encode_reading(r))
                except (ConnectionError, OSError):
                    return
            stop.wait(1.0 / rate_hz)

    def tick_loop() -> None:
        while not stop.is_set():
            svc.tick(int(time.time() * 1000))
            stop.wait(1.0 / rate_hz)

    kinds = ("voice", "image", "text")
    try:
        svc_client.connect()
        svc.attach_bus(svc_client)
        console.connect()
        console.subscribe(TOPIC_ACK, on_ack)
        threads = [threading.Thread(target=traffic, daemon=True, name="bench-traffic"),
                   threading.Thread(target=tick_loop, daemon=True, name="bench-tick")]
        for t in threads:
            t.start()

        for i in range(probes):
            for kind in kinds:
                nonce = f"probe-{kind}-{i:03d}"
                body = {"kind": kind, "id": 1, "nonce": nonce,
                        "t": int(time.time() * 1000)}
                console.publish(command_topic("reminder"),
                                json.dumps(body).encode("utf-8"))
                time.sleep(probe_gap_s)

        deadline = time.monotonic() + timeout_s
        while time.monotonic() < deadline:
            if sum(svc.tracker.count(k) for k in kinds) >= probes * len(kinds):
                break
            time.sleep(0.02)
        stop.set()
        for t in threads:
            t.join(timeout=5)
        metrics = svc.tracker.report()
    finally:
        stop.set()
        console.close()
        svc_client.close()
        svc.close()
        if own_broker is not None:
            own_broker.stop()

    measured = sum(m["count"] for m in metrics.values())
    return {
        "probes_per_kind": probes,
        "rate_hz": rate_hz,
        "endpoints": len(endpoints),
        "kinds": metrics,
        "lost": probes * len(kinds) - measured,
        "acked": len(acked),
        "reference_ms": list(REFERENCE_FIGURES),
    }


def format_bench_report(result: dict) -> str:
    lines = [
        f"latency benchmark: {result['probes_per_kind']} probes per kind at "
        f"{result['rate_hz']:g} Hz with {result['endpoints']} active endpoints",
    ]
    for kind in sorted(result["kinds"]):
        m = result["kinds"][kind]
        lines.append(
            f"  {kind:<6} count {m['count']:>3}  mean {m['mean']:7.1f} ms  "
            f"p50 {m['p50']:7.1f} ms  p95 {m['p95']:7.1f} ms  max {m['max']:7.1f} ms")
    lines.append(f"  probe loss: {result['lost']}")
    lines.append("reference figures from the original remote deployment "
                 "(hosted broker, handset client):")
    for label, ms in result["reference_ms"]:
        lines.append(f"  {label}: {ms:g} ms")
    lines.append("measured here on a loopback broker; the absolute values "
                 "are not comparable, only the protocol is.")
    return "\n".join(lines)
