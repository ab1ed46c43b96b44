"""The supervisory decision loop.

Bus callbacks feed the snapshot store and the command queue; `tick`
drains both, evaluates the rulebook on the fresh inputs, and
dispatches the winning actions. Everything that leaves the service
goes through one serialized dispatch path, so the log, the bus, the
store-and-forward journals and the console feed always agree on
ordering.
"""
from __future__ import annotations

import json
import logging
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from ..bus.topics import (
    TOPIC_ACK,
    TOPIC_MODE,
    actuator_topic,
    message_topic,
)
from ..fuzzy.engine import infer
from ..fuzzy.membership import make_gaussian
from ..fuzzy.variables import DEFAULT_THRESHOLD, LinguisticVariable
from ..rules.defaults import (
    EXIT_INTENT_RULE_IDS,
    SCHEDULE_RULE_ID_BASE,
    ZONE_RULE_ID_BASE,
    default_rulebook,
    zone_alert_rule,
)
from ..rules.model import (
    Action,
    Atom,
    CLASS_REMINDER,
    FuzzyRule,
    MODE_SCOPE_BOTH,
    ObjectRef,
    RuleBase,
)
from ..sim.model import DangerZone
from .actions import (
    ARMessage,
    ActuatorCommand,
    CaregiverNotification,
    ModeChange,
    SRC_CAREGIVER,
    action_record,
    canonical_json,
)
from .commands import IMMEDIATE_KINDS, CommandError, parse_command
from .latency import LatencyRecord, LatencyTracker
from .modes import MODE_SEMI, DeviceRegistry, ModeManager
from .snapshot import SnapshotStore

# default store-and-forward subscribers (console + the patient's device)
SAF_SUBSCRIBERS = ("console", "patient-device")

logger = logging.getLogger("fogmind.service")

RATE_MIN_HZ = 0.5
RATE_MAX_HZ = 2.0
_MS_PER_DAY = 86_400_000

# consequent variable -> dispatch channel
_MESSAGE_VARS = {
    "voice_message": "voice",
    "image_message": "image",
    "text_message": "text",
}
_ACTUATOR_VARS = {
    "relay": ("relay", {"yes": "on", "no": "off"}),
    "game": ("game", {"start": "on", "stop": "off"}),
}


def clamp_rate(rate_hz: float) -> float:
    if RATE_MIN_HZ <= rate_hz <= RATE_MAX_HZ:
        return rate_hz
    clamped = min(max(rate_hz, RATE_MIN_HZ), RATE_MAX_HZ)
    logger.warning("control rate %s Hz outside [%s, %s], clamped to %s",
                   rate_hz, RATE_MIN_HZ, RATE_MAX_HZ, clamped)
    return clamped


@dataclass
class ServiceConfig:
    rate_hz: float = 2.0
    theta: float = DEFAULT_THRESHOLD
    refractory_s: float = 60.0
    stale_budget_s: float = 10.0
    stale_notify_budget_s: float = 10.0
    state_path: "Path | None" = None
    dispatch_log_path: "Path | None" = None
    saf_root: "Path | None" = None
    saf_capacity: int = 4096
    saf_subscribers: tuple = SAF_SUBSCRIBERS

    def __post_init__(self):
        self.rate_hz = clamp_rate(self.rate_hz)

    @property
    def period_s(self) -> float:
        return 1.0 / self.rate_hz


class DecisionService:
    def __init__(self, rulebase=None, config: "ServiceConfig | None" = None,
                 registry: "DeviceRegistry | None" = None):
        self.base_rulebase = rulebase if rulebase is not None else default_rulebook()
        self.config = config or ServiceConfig()
        self.registry = registry or DeviceRegistry()
        self.modes = ModeManager(
            self.base_rulebase.variable("game_score"), theta=self.config.theta
        )
        self.tracker = LatencyTracker()
        self.client = None

        self._mutex = threading.RLock()
        self._zones: dict[str, DangerZone] = {}
        self._zone_rule_ids: dict[str, int] = {}
        self._zone_seq = 0
        self._meds: list[dict] = []
        self._med_seq = 0
        self.locked = False
        self._load_state()
        self.rulebase = self._working_rulebase()

        self.store = SnapshotStore(self.rulebase, self.config.stale_budget_s)
        self._cmd_queue: list = []
        self._refractory: dict = {}
        self._sched_day: dict[int, int] = {}
        self._topic_seq: dict[str, int] = {}
        self._log_seq = 0
        self._tick = 0
        self.last_tick_ms = 0
        self.feed: deque = deque(maxlen=256)
        self._listeners: list = []
        # optional recorder with reading()/command()/tick(); the runner
        # installs one so a session can be replayed deterministically
        self.journal = None
        self.nacks = 0
        self._disc_since_ms = None
        self._stale_notified = False

        self._log_fh = None
        if self.config.dispatch_log_path is not None:
            path = Path(self.config.dispatch_log_path)
            path.parent.mkdir(parents=True, exist_ok=True)
            self._log_fh = open(path, "a", encoding="utf-8")

        self.saf = None
        if self.config.saf_root is not None:
            from ..bus.offline import OfflineStore

            self.saf = OfflineStore(self.config.saf_root, self.config.saf_capacity)
            for name in self.config.saf_subscribers:
                self.saf.register(name)

    # -- bus wiring ----------------------------------------------------

    def attach_bus(self, client) -> None:
        self.client = client
        client.subscribe("home/#", self._on_reading)
        client.subscribe("caregiver/command/+", self._on_command_msg)

    def ingest(self, topic: str, payload: bytes) -> None:
        """Direct reading intake, used by replay and tests."""
        if self.journal is not None:
            self.journal.reading(topic, payload)
        self.store.ingest(topic, payload)

    def _on_reading(self, topic: str, payload: bytes) -> None:
        self.ingest(topic, payload)

    def _on_command_msg(self, topic: str, payload: bytes) -> None:
        if topic == TOPIC_ACK:
            return
        kind = topic.rsplit("/", 1)[-1]
        self.submit_command(kind, payload, now_ms=self.last_tick_ms)

    def add_listener(self, fn) -> None:
        """fn(frame_type: str, data: dict); called under the dispatch lock."""
        self._listeners.append(fn)

    def remove_listener(self, fn) -> None:
        try:
            self._listeners.remove(fn)
        except ValueError:
            pass

    # -- caregiver commands ---------------------------------------------

    def submit_command(self, kind: str, payload: bytes, now_ms: int) -> dict:
        """Validate, ack/nack, and apply or queue one caregiver command."""
        nonce = None
        try:
            body = parse_command(kind, payload)
            nonce = body.get("nonce")
            with self._mutex:
                if self.journal is not None:
                    self.journal.command(kind, payload, now_ms)
                self._precheck(kind, body)
                if kind in IMMEDIATE_KINDS:
                    for action in self._apply_command(kind, body, now_ms):
                        self._dispatch(action, now_ms)
                    if kind == "reminder" and nonce is not None:
                        wall = time.time() * 1000.0
                        publish_ms = body.get("t", wall)
                        self.tracker.record(LatencyRecord(
                            probe=nonce, kind=body["kind"],
                            publish_ms=min(publish_ms, wall), dispatch_ms=wall,
                        ))
                else:
                    self._cmd_queue.append((kind, body, now_ms))
            ack = {"ok": True, "kind": kind, "t": now_ms}
        except CommandError as exc:
            self.nacks += 1
            ack = {"ok": False, "kind": kind, "error": str(exc), "t": now_ms}
        if nonce is not None:
            ack["nonce"] = nonce
        self._publish(TOPIC_ACK, ack)
        self._notify_listeners("ack", ack)
        return ack

    def _precheck(self, kind: str, body: dict) -> None:
        """Semantic validation beyond the schema; mutex held."""
        if kind == "zone_add":
            name = body["name"]
            if self.base_rulebase.has_object(name) or self.base_rulebase.has_variable(name):
                raise CommandError(f"zone name {name!r} collides with the rulebook")
        elif kind == "zone_del":
            if body["name"] not in self._zones:
                raise CommandError(f"unknown zone {body['name']!r}")

    def _apply_command(self, kind: str, body: dict, now_ms: int) -> list:
        if kind == "reminder":
            return [ARMessage(kind=body["kind"], id=body["id"], rule=0,
                              src=SRC_CAREGIVER, nonce=body.get("nonce"))]
        if kind == "lock":
            self.locked = True
            return [ActuatorCommand("door-relay", "on", 0, src=SRC_CAREGIVER)]
        if kind == "unlock":
            self.locked = False
            return [ActuatorCommand("door-relay", "off", 0, src=SRC_CAREGIVER)]
        if kind == "zone_add":
            name = body["name"]
            if body["shape"] == "disc":
                zone = DangerZone(id=name, kind="disc",
                                  x=body["x"], y=body["y"], radius=body["r"])
            else:
                zone = DangerZone(id=name, kind="polygon",
                                  points=tuple(tuple(p) for p in body["points"]))
            self._zones[name] = zone
            if name not in self._zone_rule_ids:
                self._zone_rule_ids[name] = ZONE_RULE_ID_BASE + self._zone_seq
                self._zone_seq += 1
            self._rebuild()
            self._persist()
            return []
        if kind == "zone_del":
            self._zones.pop(body["name"])
            self._zone_rule_ids.pop(body["name"], None)
            self._rebuild()
            self._persist()
            return []
        if kind == "med_schedule":
            rule_id = SCHEDULE_RULE_ID_BASE + self._med_seq
            self._med_seq += 1
            self._meds.append({
                "id": rule_id, "time": body["time"],
                "voice": body["voice"], "image": body.get("image"),
            })
            self._rebuild()
            self._persist()
            return []
        if kind == "override":
            change = self.modes.force(body["mode"], now_ms)
            return [change] if change is not None else []
        raise CommandError(f"unknown command kind {kind!r}")

    # -- dynamic rulebase -----------------------------------------------

    def _sched_label(self, rule_id: int) -> str:
        return f"sched{rule_id}"

    def _working_rulebase(self) -> RuleBase:
        base = self.base_rulebase
        variables = list(base.variables)
        if self._meds:
            idx = next(i for i, v in enumerate(variables) if v.name == "time")
            tvar = variables[idx]
            labels = list(tvar.labels)
            for med in self._meds:
                hh, mm = med["time"].split(":")
                center_h = int(hh) + int(mm) / 60.0
                labels.append((self._sched_label(med["id"]),
                               make_gaussian(center_h - 0.25, center_h + 0.25)))
            variables[idx] = LinguisticVariable(
                name=tvar.name, direction=tvar.direction,
                value_kind=tvar.value_kind, unit=tvar.unit,
                universe=tvar.universe, labels=tuple(labels),
            )
        objects = list(base.objects)
        rules = list(base.rules)
        for name, zone in sorted(self._zones.items()):
            objects.append(ObjectRef(name, *_zone_centroid(zone)))
            rules.append(zone_alert_rule(name, self._zone_rule_ids[name] - ZONE_RULE_ID_BASE))
        for med in self._meds:
            actions = [Action("voice_message", med["voice"])]
            if med["image"] is not None:
                actions.append(Action("image_message", med["image"]))
            rules.append(FuzzyRule(
                id=med["id"],
                atoms=(Atom("time", self._sched_label(med["id"])),),
                actions=tuple(actions),
                command_class=CLASS_REMINDER,
            ))
        return RuleBase(tuple(variables), tuple(objects), tuple(rules))

    def _rebuild(self) -> None:
        self.rulebase = self._working_rulebase()
        if hasattr(self, "store"):
            self.store.rulebase = self.rulebase

    # -- persistence -----------------------------------------------------

    def _persist(self) -> None:
        if self.config.state_path is None:
            return
        state = {
            "zones": [_zone_state(z) for _, z in sorted(self._zones.items())],
            "zone_rule_ids": self._zone_rule_ids,
            "zone_seq": self._zone_seq,
            "meds": self._meds,
            "med_seq": self._med_seq,
        }
        path = Path(self.config.state_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(canonical_json(state) + "\n", encoding="utf-8")
        tmp.replace(path)

    def _load_state(self) -> None:
        path = self.config.state_path
        if path is None or not Path(path).exists():
            return
        state = json.loads(Path(path).read_text(encoding="utf-8"))
        for z in state.get("zones", []):
            if z["shape"] == "disc":
                zone = DangerZone(id=z["name"], kind="disc",
                                  x=z["x"], y=z["y"], radius=z["r"])
            else:
                zone = DangerZone(id=z["name"], kind="polygon",
                                  points=tuple(tuple(p) for p in z["points"]))
            self._zones[zone.id] = zone
        self._zone_rule_ids = {
            k: int(v) for k, v in state.get("zone_rule_ids", {}).items()
        }
        self._zone_seq = state.get("zone_seq", len(self._zone_rule_ids))
        self._meds = state.get("meds", [])
        self._med_seq = state.get("med_seq", len(self._meds))

    # -- the tick ---------------------------------------------------------

    def tick(self, now_ms: int) -> list:
        """One serialized control step; returns the dispatched actions."""
        with self._mutex:
            if self.journal is not None:
                self.journal.tick(now_ms)
            self._tick += 1
            self.last_tick_ms = now_ms
            dispatched = []

            queued, self._cmd_queue = self._cmd_queue, []
            for kind, body, t in queued:
                for action in self._apply_command(kind, body, t):
                    self._dispatch(action, now_ms)
                    dispatched.append(action)

            stale_note = self._check_bus_stale(now_ms)
            if stale_note is not None:
                self._dispatch(stale_note, now_ms)
                dispatched.append(stale_note)

            snapshot = self.store.assemble(now_ms, zones=tuple(self._zones.values()))

            if snapshot.game_score is not None:
                change = self.modes.apply_score(snapshot.game_score, now_ms)
                if change is not None:
                    self._dispatch(change, now_ms)
                    dispatched.append(change)

            result = infer(
                self.rulebase,
                snapshot.values,
                rules=self._active_rules(),
                theta_rule=self.config.theta,
            )
            for action in self._select_actions(result, snapshot, now_ms):
                self._dispatch(action, now_ms)
                dispatched.append(action)
            self.last_result = result
            self.last_snapshot = snapshot
            if self._listeners:
                # live consoles re-hydrate from any snapshot frame, so a
                # per-tick push keeps the marker and tiles current
                self._notify_listeners("snapshot", self.snapshot_frame(now_ms))
            return dispatched

    def _active_rules(self) -> list:
        rules = list(self.rulebase.rules)
        if self.modes.mode == MODE_SEMI:
            rules = [r for r in rules if r.mode_scope == MODE_SCOPE_BOTH]
        if self.locked:
            rules = [r for r in rules if r.id not in EXIT_INTENT_RULE_IDS]
        return rules

    def _select_actions(self, result, snapshot, now_ms: int) -> list:
        theta = self.config.theta
        day = now_ms // _MS_PER_DAY
        actions = []
        for var in self.rulebase.output_variables():
            contributions = result.contributions.get(var.name)
            if not contributions:
                continue
            label_rank = {name: i for i, (name, _) in enumerate(var.labels)}
            candidates = []
            for key, (strength, rule_id) in contributions.items():
                if strength < theta:
                    continue
                if rule_id >= SCHEDULE_RULE_ID_BASE and self._sched_day.get(rule_id) == day:
                    continue  # medication reminders fire once per day
                rank = key if isinstance(key, int) else label_rank.get(key, 0)
                candidates.append((-strength, rank, rule_id, key))
            if not candidates:
                continue
            _, _, rule_id, key = min(candidates)
            if var.name in _MESSAGE_VARS:
                actions.append(ARMessage(_MESSAGE_VARS[var.name], int(key), rule_id))
            elif var.name in _ACTUATOR_VARS:
                actuator_id, states = _ACTUATOR_VARS[var.name]
                state = states.get(key)
                if state is not None:
                    actions.append(ActuatorCommand(actuator_id, state, rule_id))
            # other outputs (the reminder flag) steer mode bookkeeping, not the wire

        if snapshot.worn is False:
            held = [a for a in actions if isinstance(a, ARMessage)]
            actions = [a for a in actions if not isinstance(a, ARMessage)]
            if held and self._refractory_ok(("notify", "worn_off"), now_ms):
                ids = ", ".join(f"{m.kind} {m.id}" for m in held)
                actions.append(CaregiverNotification(
                    "worn_off", f"wearable off; held {len(held)} message(s): {ids}"))

        out = []
        for action in actions:
            if isinstance(action, ARMessage):
                if not self._refractory_ok(("msg", action.rule, action.kind, action.id), now_ms):
                    continue
                if action.rule >= SCHEDULE_RULE_ID_BASE:
                    self._sched_day[action.rule] = day
            elif isinstance(action, ActuatorCommand):
                if not self._refractory_ok(("act", action.rule, action.id, action.state), now_ms):
                    continue
            out.append(action)
        return out

    def _refractory_ok(self, key, now_ms: int) -> bool:
        last = self._refractory.get(key)
        if last is not None and now_ms - last < self.config.refractory_s * 1000.0:
            return False
        self._refractory[key] = now_ms
        return True

    def _check_bus_stale(self, now_ms: int):
        if self.client is None:
            return None
        if self.client.connected:
            self._disc_since_ms = None
            self._stale_notified = False
            return None
        if self._disc_since_ms is None:
            self._disc_since_ms = now_ms
        elapsed_s = (now_ms - self._disc_since_ms) / 1000.0
        if elapsed_s >= self.config.stale_notify_budget_s and not self._stale_notified:
            self._stale_notified = True
            return CaregiverNotification(
                "stale_inputs",
                f"bus disconnected for {elapsed_s:.0f}s; deciding on stale data",
            )
        return None

    # -- dispatch ---------------------------------------------------------

    def _next_seq(self, topic: str) -> int:
        self._topic_seq[topic] = self._topic_seq.get(topic, 0) + 1
        return self._topic_seq[topic]

    def _dispatch(self, action, now_ms: int) -> None:
        topic = None
        payload = None
        if isinstance(action, ARMessage):
            topic = message_topic(action.kind)
            payload = {"id": action.id, "rule": action.rule, "t": now_ms,
                       "seq": self._next_seq(topic)}
            if action.src == SRC_CAREGIVER:
                payload["src"] = SRC_CAREGIVER
            if action.nonce is not None:
                payload["nonce"] = action.nonce
        elif isinstance(action, ActuatorCommand):
            topic = actuator_topic(action.id)
            payload = {"state": action.state, "rule": action.rule, "t": now_ms,
                       "seq": self._next_seq(topic)}
            if action.src == SRC_CAREGIVER:
                payload["src"] = SRC_CAREGIVER
        elif isinstance(action, ModeChange):
            topic = TOPIC_MODE
            payload = {"mode": action.to, "cause": action.cause, "t": now_ms,
                       "active": self.registry.active_count(action.to),
                       "seq": self._next_seq(topic)}

        if topic is not None and payload is not None:
            self._publish(topic, payload)

        self._log_seq += 1
        record = {"seq": self._log_seq, "tick": self._tick, "t": now_ms,
                  "action": action_record(action)}
        if topic is not None:
            record["topic"] = topic
            record["payload"] = payload
        line = canonical_json(record)
        if self._log_fh is not None:
            self._log_fh.write(line + "\n")
            self._log_fh.flush()
        self.feed.append(record)
        if self.saf is not None:
            for name in self.saf.subscribers():
                self.saf.enqueue(name, line.encode("utf-8"))
        self._notify_listeners("event", record)

    def _publish(self, topic: str, payload: dict) -> None:
        if self.client is None:
            return
        try:
            self.client.publish(topic, canonical_json(payload).encode("utf-8"))
        except (ConnectionError, OSError, TimeoutError):
            logger.warning("publish to %s failed; continuing", topic)

    def _notify_listeners(self, frame: str, data: dict) -> None:
        for fn in list(self._listeners):
            try:
                fn(frame, data)
            except Exception:  # noqa: BLE001 - a bad listener must not stop dispatch
                logger.exception("listener failed")

    # -- introspection -----------------------------------------------------

    @property
    def zones(self) -> dict:
        return dict(self._zones)

    @property
    def med_schedules(self) -> list:
        return [dict(m) for m in self._meds]

    def report(self) -> dict:
        return {
            "mode": self.modes.mode,
            "mode_cause": self.modes.cause,
            "active_endpoints": self.registry.active_count(self.modes.mode),
            "locked": self.locked,
            "zones": sorted(self._zones),
            "med_schedules": self.med_schedules,
            "ticks": self._tick,
            "dispatches": self._log_seq,
            "nacks": self.nacks,
            "malformed_readings": self.store.malformed,
            "seq_regressions": self.store.seq_regressions,
            "latency": self.tracker.report(),
        }

    def snapshot_frame(self, now_ms: "int | None" = None) -> dict:
        """Initial state frame for a console connecting mid-run."""
        with self._mutex:
            now = now_ms if now_ms is not None else self.last_tick_ms
            snap = self.store.assemble(now, zones=tuple(self._zones.values()))
            return {
                "t": now,
                "mode": self.modes.mode,
                "active_endpoints": self.registry.active_count(self.modes.mode),
                "locked": self.locked,
                "pose": snap.pose,
                "worn": snap.worn,
                "values": {k: v for k, v in snap.values.items()},
                "ages_s": dict(snap.ages_s),
                "stale": sorted(snap.stale),
                "zones": [_zone_state(z) for _, z in sorted(self._zones.items())],
                "objects": [
                    {"name": o.name, "x": o.x, "y": o.y}
                    for o in self.base_rulebase.objects
                ],
                # composer vocabulary: ids of the declared message singletons
                "message_ids": {
                    _MESSAGE_VARS[var.name]: [int(mf.value) for _, mf in var.labels]
                    for var in self.base_rulebase.output_variables()
                    if var.name in _MESSAGE_VARS
                },
                "feed": list(self.feed)[-50:],
            }

    def close(self) -> None:
        with self._mutex:
            if self._log_fh is not None:
                self._log_fh.close()
                self._log_fh = None
            if self.saf is not None:
                self.saf.close()


def _zone_centroid(zone: DangerZone) -> tuple:
    if zone.kind == "disc":
        return (zone.x, zone.y)
    xs = [p[0] for p in zone.points]
    ys = [p[1] for p in zone.points]
    return (sum(xs) / len(xs), sum(ys) / len(ys))


def _zone_state(zone: DangerZone) -> dict:
    if zone.kind == "disc":
        return {"name": zone.id, "shape": "disc",
                "x": zone.x, "y": zone.y, "r": zone.radius}
    return {"name": zone.id, "shape": "polygon",
            "points": [list(p) for p in zone.points]}
