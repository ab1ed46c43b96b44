"""Concurrent last-value-wins input store and snapshot assembly.

Bus callbacks write readings in; the decision loop pulls one coherent
InputSnapshot per tick. Values older than the staleness budget are
reported but excluded from rule evaluation, so a dead sensor stops
satisfying its rules instead of freezing the last reading forever.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

from ..bus.codec import MalformedPayloadError, decode_position, decode_reading
from ..bus.topics import (
    BOOLEAN_SENSOR_KINDS,
    TOPIC_GAME_SCORE,
    TOPIC_POSITION,
    TOPIC_PULSE,
)
from ..sim.geometry import distance_dm, heading_deviation, zone_contains

DEFAULT_STALE_BUDGET_S = 10.0
# edge-triggered boolean sensors re-publish on a 60 s heartbeat, so their
# readings stay trustworthy well past the numeric budget
BOOLEAN_STALE_BUDGET_S = 90.0
_MS_PER_DAY = 86_400_000
_MS_PER_HOUR = 3_600_000.0


@dataclass(frozen=True)
class InputSnapshot:
    t_ms: int
    time_of_day_h: float
    values: dict
    ages_s: dict
    stale: frozenset
    worn: "bool | None"
    pose: "tuple | None"  # (x, y, facing_deg)
    game_score: "float | None"

    def age_of(self, key: str) -> "float | None":
        return self.ages_s.get(key)


@dataclass
class _Entry:
    value: object
    t_ms: int
    seq: int = 0


@dataclass
class _Movement:
    moved_ms: float = 0.0
    day: "int | None" = None
    last_t: "int | None" = None
    last_moving: bool = False
    seen: bool = False
    updated_ms: int = 0


class SnapshotStore:
    """Keyed store fed by bus callbacks, drained by the decision loop."""

    def __init__(
        self,
        rulebase,
        stale_budget_s: float = DEFAULT_STALE_BUDGET_S,
        boolean_budget_s: float = BOOLEAN_STALE_BUDGET_S,
    ):
        self.rulebase = rulebase
        self.stale_budget_s = stale_budget_s
        self.boolean_budget_s = boolean_budget_s
        self._lock = threading.Lock()
        self._entries: dict[str, _Entry] = {}
        self._topic_seq: dict[str, int] = {}
        self._pose: "_Entry | None" = None
        self._worn: "_Entry | None" = None
        self._movement = _Movement()
        self.malformed = 0
        self.seq_regressions = 0

    # -- ingest -------------------------------------------------------

    def ingest(self, topic: str, payload: bytes) -> None:
        try:
            self._ingest(topic, payload)
        except MalformedPayloadError:
            with self._lock:
                self.malformed += 1

    def _ingest(self, topic: str, payload: bytes) -> None:
        if topic == TOPIC_POSITION:
            fix = decode_position(payload)
            with self._lock:
                if not self._fresher(topic, fix.timestamp, fix.seq, True):
                    return
                self._pose = _Entry((fix.x, fix.y, fix.facing), fix.timestamp, fix.seq)
            return
        parts = topic.split("/")
        if topic == TOPIC_PULSE:
            r = decode_reading(topic, payload)
            with self._lock:
                if not self._fresher(topic, r.timestamp, r.seq, r.sequenced):
                    return
                self._entries["pulse"] = _Entry(float(r.value), r.timestamp, r.seq)
                if r.worn is not None:
                    self._worn = _Entry(r.worn, r.timestamp, r.seq)
            return
        if topic == TOPIC_GAME_SCORE:
            r = decode_reading(topic, payload)
            with self._lock:
                if not self._fresher(topic, r.timestamp, r.seq, r.sequenced):
                    return
                self._entries["game_score"] = _Entry(
                    float(r.value), r.timestamp, r.seq
                )
            return
        if len(parts) == 4 and parts[0] == "home" and parts[1] == "sensor":
            kind = parts[3]
            r = decode_reading(topic, payload)
            with self._lock:
                if not self._fresher(topic, r.timestamp, r.seq, r.sequenced):
                    return
                if kind == "motion":
                    self._accrue_motion(bool(r.value), r.timestamp)
                elif kind in BOOLEAN_SENSOR_KINDS:
                    self._entries[kind] = _Entry(
                        1.0 if r.value else 0.0, r.timestamp, r.seq
                    )
                else:
                    self._entries[kind] = _Entry(float(r.value), r.timestamp, r.seq)

    def seq_seen(self, topic: str) -> "int | None":
        """Highest sequence number ingested for a topic (watermark checks)."""
        with self._lock:
            return self._topic_seq.get(topic)

    def _fresher(self, topic: str, t_ms: int, seq: int, sequenced: bool) -> bool:
        if sequenced:
            last = self._topic_seq.get(topic)
            if last is not None and seq <= last:
                self.seq_regressions += 1
                return False
            self._topic_seq[topic] = seq
        return True

    def _accrue_motion(self, moving: bool, t_ms: int) -> None:
        m = self._movement
        day = t_ms // _MS_PER_DAY
        if m.day is None:
            m.day = day
        if day != m.day:
            # daily movement resets at midnight; credit the old day's
            # tail segment to nobody and restart the accumulator
            day_start = day * _MS_PER_DAY
            m.moved_ms = 0.0
            m.day = day
            if m.last_moving and m.last_t is not None:
                m.last_t = max(m.last_t, day_start)
        if m.last_moving and m.last_t is not None:
            m.moved_ms += max(0, t_ms - m.last_t)
        m.last_t = t_ms
        m.last_moving = moving
        m.seen = True
        m.updated_ms = t_ms

    # -- assembly ------------------------------------------------------

    def _budget_s(self, key: str) -> float:
        if key in BOOLEAN_SENSOR_KINDS or key == "movement":
            return self.boolean_budget_s
        return self.stale_budget_s

    def assemble(self, now_ms: int, zones=()) -> InputSnapshot:
        with self._lock:
            entries = dict(self._entries)
            pose = self._pose
            worn = self._worn
            movement = self._movement

        values: dict = {}
        ages: dict = {}
        stale: set = set()

        def admit(key: str, entry: "_Entry | None") -> bool:
            if entry is None:
                return False
            age = (now_ms - entry.t_ms) / 1000.0
            ages[key] = age
            if age > self._budget_s(key):
                stale.add(key)
                return False
            return True

        for key, entry in entries.items():
            if admit(key, entry):
                values[key] = entry.value

        pose_xy = None
        if admit("position", pose):
            x, y, facing = pose.value
            pose_xy = (x, y, facing)
            for obj in self.rulebase.objects:
                values[f"distance({obj.name})"] = distance_dm(x, y, obj.x, obj.y)
                values[f"heading({obj.name})"] = heading_deviation(
                    facing, x, y, obj.x, obj.y
                )
            breached = 0.0
            for zone in zones:
                inside = 1.0 if zone_contains(zone, x, y) else 0.0
                values[f"zone_breach({zone.id})"] = inside
                breached = max(breached, inside)
            if zones:
                values["zone_breach"] = breached

        if movement.seen:
            age = (now_ms - movement.updated_ms) / 1000.0
            ages["movement"] = age
            if age <= self._budget_s("movement"):
                extra = 0.0
                if movement.last_moving and movement.last_t is not None:
                    extra = max(0, now_ms - movement.last_t)
                values["movement"] = (movement.moved_ms + extra) / _MS_PER_HOUR
            else:
                stale.add("movement")

        worn_flag = None
        if admit("worn", worn):
            worn_flag = bool(worn.value)

        time_of_day_h = (now_ms % _MS_PER_DAY) / _MS_PER_HOUR
        values["time"] = time_of_day_h

        return InputSnapshot(
            t_ms=now_ms,
            time_of_day_h=time_of_day_h,
            values=values,
            ages_s=ages,
            stale=frozenset(stale),
            worn=worn_flag,
            pose=pose_xy,
            game_score=values.get("game_score"),
        )
