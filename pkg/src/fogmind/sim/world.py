"""World stepper: advances the agent, evaluates sensor programs, and emits
telemetry readings with per-topic sequence numbers. Fully deterministic for
a given (scenario, seed)."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Union

from fogmind.bus.codec import PositionFix, Reading
from fogmind.bus.topics import (
    BOOLEAN_SENSOR_KINDS,
    SENSOR_UNITS,
    TOPIC_GAME_SCORE,
    TOPIC_PULSE,
    sensor_topic,
)

from .geometry import in_danger_zone
from .model import PatientAgent
from .scenario import Scenario, SensorSpec

# boolean sensors re-emit their value this often so silence means offline
HEARTBEAT_S = 60.0

_MS_PER_DAY = 86_400_000

Emission = Union[Reading, PositionFix]


def _timeline_value(spec: SensorSpec, t: float):
    value = spec.initial
    if value is None and spec.timeline:
        # before the first event a timeline-only sensor reads as inactive
        value = False if spec.kind in BOOLEAN_SENSOR_KINDS else spec.timeline[0][1]
    for at, v in spec.timeline:
        if at <= t:
            value = v
        else:
            break
    return value


@dataclass
class _SensorState:
    spec: SensorSpec
    last_value: object = None
    last_emit_t: float | None = None


class WorldState:
    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.plan = scenario.plan
        self.agent: PatientAgent = scenario.make_agent()
        self.t = 0.0
        self.rng = random.Random(scenario.seed)
        self._seqs: dict[str, int] = {}
        self._sensors = [_SensorState(spec=s) for s in scenario.sensors]
        self._position_emit_t: float | None = None
        self._pulse_emit_t: float | None = None
        self._scores_emitted = 0
        self._day = self._day_index(0.0)
        self._agent_was_moving = False

    # ---- clocks ------------------------------------------------------------

    def epoch_ms(self, t: float | None = None) -> int:
        return self.scenario.start_epoch_ms + round((self.t if t is None else t) * 1000)

    def time_of_day_h(self, t: float | None = None) -> float:
        return (self.epoch_ms(t) % _MS_PER_DAY) / 3_600_000.0

    def _day_index(self, t: float) -> int:
        return self.epoch_ms(t) // _MS_PER_DAY

    def _next_seq(self, topic: str) -> int:
        n = self._seqs.get(topic, 0) + 1
        self._seqs[topic] = n
        return n

    # ---- agent -------------------------------------------------------------

    def _advance_agent(self, dt: float) -> None:
        agent = self.agent
        now = self.t
        remaining = dt
        while remaining > 1e-12:
            wp = agent.moving_target
            if wp is None:
                break
            if wp.at_s is not None and now < wp.at_s:
                hold = min(remaining, wp.at_s - now)
                now += hold
                remaining -= hold
                continue
            dx, dy = wp.x - agent.x, wp.y - agent.y
            dist = (dx * dx + dy * dy) ** 0.5
            if dist < 1e-12:
                if wp.facing is not None:
                    agent.facing = wp.facing % 360.0
                agent._wp_index += 1
                continue
            travel_t = dist / agent.speed
            step_t = min(travel_t, remaining)
            frac = step_t / travel_t
            agent.facing = math.degrees(math.atan2(dy, dx)) % 360.0
            agent.x += dx * frac
            agent.y += dy * frac
            self._accrue_movement(now, step_t)
            now += step_t
            remaining -= step_t
            if step_t >= travel_t - 1e-12:
                agent.x, agent.y = wp.x, wp.y
                if wp.facing is not None:
                    agent.facing = wp.facing % 360.0
                agent._wp_index += 1

    def _accrue_movement(self, seg_start: float, seconds: float) -> None:
        """Add moving time, splitting at midnight so the daily total resets
        exactly on the day boundary."""
        agent = self.agent
        remaining = seconds
        now = seg_start
        while remaining > 0:
            day = self._day_index(now)
            next_midnight_s = ((day + 1) * _MS_PER_DAY - self.scenario.start_epoch_ms) / 1000.0
            if day != self._day:
                agent.moved_s = 0.0
                self._day = day
            chunk = min(remaining, next_midnight_s - now)
            if chunk <= 0:
                chunk = remaining
            agent.moved_s += chunk
            now += chunk
            remaining -= chunk

    # ---- stepping ----------------------------------------------------------

    def step(self, dt: float) -> list[Emission]:
        """Advance the world by dt seconds and return due emissions."""
        if dt <= 0:
            raise ValueError("dt must be positive")
        prev_t = self.t
        self._advance_agent(dt)
        self.t = prev_t + dt
        day = self._day_index(self.t)
        if day != self._day:
            self.agent.moved_s = 0.0
            self._day = day
        self._apply_worn_timeline()

        out: list[Emission] = []
        self._emit_position(out)
        self._emit_pulse(out)
        for state in self._sensors:
            self._emit_sensor(state, out)
        self._emit_scores(out)
        return out

    def _due(self, last_t: float | None, period: float) -> bool:
        if last_t is None:
            return True
        return self.t - last_t >= period - 1e-9

    def _apply_worn_timeline(self) -> None:
        for at, worn in self.scenario.agent_worn_timeline:
            if at <= self.t:
                self.agent.worn = worn

    def _emit_position(self, out: list[Emission]) -> None:
        if not self._due(self._position_emit_t, self.scenario.position_period_s):
            return
        self._position_emit_t = self.t
        noise = self.scenario.position_noise_m
        nx = self.rng.gauss(0.0, noise) if noise > 0 else 0.0
        ny = self.rng.gauss(0.0, noise) if noise > 0 else 0.0
        out.append(
            PositionFix(
                x=self.agent.x + nx,
                y=self.agent.y + ny,
                facing=self.agent.facing,
                timestamp=self.epoch_ms(),
                seq=self._next_seq(PositionFix.topic),
            )
        )

    def _emit_pulse(self, out: list[Emission]) -> None:
        if not self._due(self._pulse_emit_t, self.scenario.pulse_period_s):
            return
        self._pulse_emit_t = self.t
        out.append(
            Reading(
                topic=TOPIC_PULSE,
                value=self.agent.pulse_bpm,
                unit="bpm",
                timestamp=self.epoch_ms(),
                seq=self._next_seq(TOPIC_PULSE),
                device_id="pulse-tag",
                worn=self.agent.worn,
            )
        )

    def _sensor_value(self, spec: SensorSpec):
        if spec.derive == "agent_moving":
            return self.agent.moving_target is not None
        return _timeline_value(spec, self.t)

    def _emit_sensor(self, state: _SensorState, out: list[Emission]) -> None:
        spec = state.spec
        value = self._sensor_value(spec)
        if value is None:
            return
        boolean = spec.kind in BOOLEAN_SENSOR_KINDS
        if boolean:
            due = value != state.last_value or self._due(state.last_emit_t, HEARTBEAT_S)
        else:
            due = self._due(state.last_emit_t, spec.period_s)
        if not due:
            return
        state.last_value = value
        state.last_emit_t = self.t
        if not boolean and spec.noise > 0:
            value = float(value) + self.rng.gauss(0.0, spec.noise)
        topic = sensor_topic(spec.id, spec.kind)
        out.append(
            Reading(
                topic=topic,
                value=bool(value) if boolean else float(value),
                unit=SENSOR_UNITS[spec.kind],
                timestamp=self.epoch_ms(),
                seq=self._next_seq(topic),
                device_id=spec.id,
            )
        )

    def _emit_scores(self, out: list[Emission]) -> None:
        events = self.scenario.game_score_events
        while self._scores_emitted < len(events) and events[self._scores_emitted][0] <= self.t:
            _, score = events[self._scores_emitted]
            self._scores_emitted += 1
            out.append(
                Reading(
                    topic=TOPIC_GAME_SCORE,
                    value=float(score),
                    unit="points",
                    timestamp=self.epoch_ms(),
                    seq=self._next_seq(TOPIC_GAME_SCORE),
                    device_id="game",
                )
            )

    # ---- queries -----------------------------------------------------------

    def zone_hit(self) -> str | None:
        return in_danger_zone(self.agent.x, self.agent.y, self.plan.zones)


def daily_movement(agent: PatientAgent) -> float:
    """Accumulated moving time since simulated midnight, in hours."""
    return agent.moved_s / 3600.0
