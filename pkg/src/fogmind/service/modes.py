"""Operating modes and the logical device registry.

A high serious-game score flips the assistant into semi-automated
mode: reminder-class rules stop firing and the reminder-support
endpoints quiesce, shrinking the active set from 22 to 14. Safety
rules and their endpoints are never gated. Unclassifiable scores
(ties or sub-threshold degrees) keep the previous mode, which gives
the switch hysteresis at the low/high crossover.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..fuzzy.variables import DEFAULT_THRESHOLD, fuzzify
from .actions import ModeChange

MODE_AUTOMATED = "automated"
MODE_SEMI = "semi"

CAUSE_SCORE = "game-score"
CAUSE_OVERRIDE = "caregiver-override"


@dataclass(frozen=True)
class Endpoint:
    name: str
    kind: str  # sensor | actuator | channel
    reminder_support: bool = False


# 22 logical endpoints; the 8 reminder-support channels quiesce in
# semi-automated mode, leaving 14 active.
DEFAULT_ENDPOINTS = (
    Endpoint("rain-roof", "sensor"),
    Endpoint("flame-kitchen", "sensor"),
    Endpoint("gas-kitchen", "sensor"),
    Endpoint("temp-tvroom", "sensor"),
    Endpoint("temp-bedroom", "sensor"),
    Endpoint("humidity-tvroom", "sensor"),
    Endpoint("soil-fern", "sensor"),
    Endpoint("pir-hall", "sensor"),
    Endpoint("pir-bedroom", "sensor"),
    Endpoint("pulse-tag", "sensor"),
    Endpoint("relay", "actuator"),
    Endpoint("door-relay", "actuator"),
    Endpoint("water-valve", "actuator"),
    Endpoint("siren", "actuator"),
    Endpoint("speaker-tvroom", "channel", reminder_support=True),
    Endpoint("speaker-bedroom", "channel", reminder_support=True),
    Endpoint("speaker-kitchen", "channel", reminder_support=True),
    Endpoint("frame-tvroom", "channel", reminder_support=True),
    Endpoint("frame-hall", "channel", reminder_support=True),
    Endpoint("tablet-patient", "channel", reminder_support=True),
    Endpoint("watch-haptic", "channel", reminder_support=True),
    Endpoint("projector-ar", "channel", reminder_support=True),
)


class DeviceRegistry:
    def __init__(self, endpoints=DEFAULT_ENDPOINTS):
        self.endpoints = tuple(endpoints)
        names = [e.name for e in self.endpoints]
        if len(set(names)) != len(names):
            raise ValueError("duplicate endpoint names")

    def gated(self) -> tuple:
        return tuple(e.name for e in self.endpoints if e.reminder_support)

    def active(self, mode: str) -> tuple:
        if mode == MODE_SEMI:
            return tuple(
                e.name for e in self.endpoints if not e.reminder_support
            )
        return tuple(e.name for e in self.endpoints)

    def active_count(self, mode: str) -> int:
        return len(self.active(mode))


class ModeManager:
    """Score-driven mode selection with caregiver override pinning."""

    def __init__(self, score_variable, theta: float = DEFAULT_THRESHOLD):
        self.score_variable = score_variable
        self.theta = theta
        self.mode = MODE_AUTOMATED
        self.cause = "initial"
        self.entered_at_ms = 0
        self.pinned = False

    def apply_score(self, score: float, now_ms: int) -> "ModeChange | None":
        """Classify the score; flip mode only on a strict winner.

        Returns the ModeChange when the mode actually flips.
        """
        if self.pinned:
            return None
        degrees = fuzzify(self.score_variable, score)
        low = degrees.get("low", 0.0)
        high = degrees.get("high", 0.0)
        if high > low and high >= self.theta:
            target = MODE_SEMI
        elif low > high and low >= self.theta:
            target = MODE_AUTOMATED
        else:
            return None  # crossover or sub-threshold: keep the mode
        return self._switch(target, CAUSE_SCORE, now_ms)

    def force(self, mode: str, now_ms: int) -> "ModeChange | None":
        """Caregiver override: pin the mode, or unpin with mode='auto'."""
        if mode == "auto":
            self.pinned = False
            return None
        if mode not in (MODE_AUTOMATED, MODE_SEMI):
            raise ValueError(f"unknown mode {mode!r}")
        self.pinned = True
        return self._switch(mode, CAUSE_OVERRIDE, now_ms)

    def _switch(self, target: str, cause: str, now_ms: int) -> "ModeChange | None":
        if target == self.mode:
            return None
        self.mode = target
        self.cause = cause
        self.entered_at_ms = now_ms
        return ModeChange(to=target, cause=cause)
