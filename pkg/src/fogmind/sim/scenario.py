"""Scenario files: JSON schema, loading with path-qualified errors, and the
shipped scenario catalog."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import jsonschema

from .model import (
    Anchor,
    DangerZone,
    FloorPlan,
    PatientAgent,
    SmartObject,
    Waypoint,
    default_plan,
)

SHIPPED_SCENARIOS = (
    "rain_umbrella",
    "medication_morning",
    "flame_alert",
    "plant_watering",
    "game_mode_switch",
    "offline_caregiver",
)

# fixed reference date so identical scenarios get identical timestamps
_EPOCH_DATE_MS = 1_614_556_800_000  # 2021-03-01T00:00:00Z

_POINT = {
    "type": "object",
    "required": ["x", "y"],
    "properties": {"x": {"type": "number"}, "y": {"type": "number"}},
}

_ZONE = {
    "type": "object",
    "required": ["id", "kind"],
    "properties": {
        "id": {"type": "string"},
        "kind": {"enum": ["disc", "polygon"]},
        "x": {"type": "number"},
        "y": {"type": "number"},
        "r": {"type": "number", "exclusiveMinimum": 0},
        "points": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2,
                                              "items": {"type": "number"}}, "minItems": 3},
        "label": {"type": "string"},
    },
}

_SENSOR = {
    "type": "object",
    "required": ["id", "kind"],
    "additionalProperties": False,
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "kind": {"enum": ["rain", "flame", "gas", "temperature", "humidity", "plant_humidity", "motion"]},
        "location": {"type": "string"},
        "period_s": {"type": "number", "exclusiveMinimum": 0},
        "value": {"type": ["number", "boolean"]},
        "timeline": {
            "type": "array",
            "items": {
                "type": "array",
                "minItems": 2,
                "maxItems": 2,
                "prefixItems": [{"type": "number", "minimum": 0}, {"type": ["number", "boolean"]}],
                "items": False,
            },
        },
        "noise": {"type": "number", "minimum": 0},
        "derive": {"enum": ["agent_moving"]},
    },
}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["name", "seed", "duration_s"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "seed": {"type": "integer"},
        "duration_s": {"type": "number", "exclusiveMinimum": 0},
        "start_time": {"type": "string", "pattern": "^([01]?[0-9]|2[0-3]):[0-5][0-9]$"},
        "plan": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "room": {"type": "array", "minItems": 2, "maxItems": 3, "items": {"type": "number", "exclusiveMinimum": 0}},
                "objects": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["id", "x", "y"],
                        "properties": {
                            "id": {"type": "string"},
                            "x": {"type": "number"},
                            "y": {"type": "number"},
                            "w": {"type": "number", "exclusiveMinimum": 0},
                            "d": {"type": "number", "exclusiveMinimum": 0},
                        },
                    },
                },
                "anchors": {"type": "array", "items": {
                    "type": "object", "required": ["id", "x", "y"],
                    "properties": {"id": {"type": "string"}, "x": {"type": "number"}, "y": {"type": "number"}},
                }},
                "zones": {"type": "array", "items": _ZONE},
            },
        },
        "agent": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "x": {"type": "number"},
                "y": {"type": "number"},
                "facing": {"type": "number"},
                "speed_mps": {"type": "number", "exclusiveMinimum": 0},
                "worn": {"type": "boolean"},
                "worn_timeline": {"type": "array", "items": {
                    "type": "array", "minItems": 2, "maxItems": 2,
                    "prefixItems": [{"type": "number", "minimum": 0}, {"type": "boolean"}],
                    "items": False,
                }},
                "pulse_bpm": {"type": "number", "exclusiveMinimum": 0},
                "waypoints": {"type": "array", "items": {
                    "type": "object",
                    "required": ["x", "y"],
                    "additionalProperties": False,
                    "properties": {
                        "x": {"type": "number"}, "y": {"type": "number"},
                        "facing": {"type": "number"}, "at_s": {"type": "number", "minimum": 0},
                    },
                }},
                "position_period_s": {"type": "number", "exclusiveMinimum": 0},
                "position_noise_m": {"type": "number", "minimum": 0},
                "pulse_period_s": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "sensors": {"type": "array", "items": _SENSOR},
        "events": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "game_score": {"type": "array", "items": {
                    "type": "array", "minItems": 2, "maxItems": 2,
                    "prefixItems": [{"type": "number", "minimum": 0}, {"type": "number"}],
                    "items": False,
                }},
                "caregiver": {"type": "array", "items": {
                    "type": "array", "minItems": 2, "maxItems": 2,
                    "prefixItems": [{"type": "number", "minimum": 0}, {"type": "object", "required": ["kind"]}],
                    "items": False,
                }},
                "harness": {"type": "array", "items": {
                    "type": "array", "minItems": 2, "maxItems": 2,
                    "prefixItems": [{"type": "number", "minimum": 0}, {"type": "string"}],
                    "items": False,
                }},
            },
        },
    },
}


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class SensorSpec:
    id: str
    kind: str
    period_s: float
    timeline: tuple[tuple[float, float | bool], ...]
    initial: float | bool | None
    noise: float = 0.0
    derive: str | None = None
    location: str = ""


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    duration_s: float
    start_epoch_ms: int
    plan: FloorPlan
    agent_start: tuple[float, float, float]  # x, y, facing
    agent_speed: float
    agent_worn: bool
    agent_worn_timeline: tuple[tuple[float, bool], ...]
    agent_pulse: float
    waypoints: tuple[Waypoint, ...]
    position_period_s: float
    position_noise_m: float
    pulse_period_s: float
    sensors: tuple[SensorSpec, ...]
    game_score_events: tuple[tuple[float, float], ...] = ()
    caregiver_events: tuple[tuple[float, dict], ...] = ()
    harness_events: tuple[tuple[float, str], ...] = ()

    def make_agent(self) -> PatientAgent:
        x, y, facing = self.agent_start
        return PatientAgent(
            x=x, y=y, facing=facing, speed=self.agent_speed,
            waypoints=[Waypoint(w.x, w.y, w.facing, w.at_s) for w in self.waypoints],
            worn=self.agent_worn, pulse_bpm=self.agent_pulse,
        )


def _check_in_room(plan: FloorPlan, x: float, y: float, what: str) -> None:
    w, d, _ = plan.room
    if not (0 <= x <= w and 0 <= y <= d):
        raise ScenarioError(f"{what} at ({x}, {y}) is outside the {w} x {d} m room")


def _build_plan(doc: dict) -> FloorPlan:
    plan_doc = doc.get("plan", {})
    room = plan_doc.get("room")
    room_t = tuple(room) + ((2.0,) if room and len(room) == 2 else ()) if room else None

    if "objects" in plan_doc:
        objects = tuple(
            SmartObject(
                id=o["id"], x=o["x"], y=o["y"],
                width=o.get("w", SmartObject.__dataclass_fields__["width"].default),
                depth=o.get("d", SmartObject.__dataclass_fields__["depth"].default),
            )
            for o in plan_doc["objects"]
        )
    else:
        objects = default_plan().objects
    anchors = (
        tuple(Anchor(id=a["id"], x=a["x"], y=a["y"]) for a in plan_doc["anchors"])
        if "anchors" in plan_doc
        else default_plan().anchors
    )
    zones = tuple(
        DangerZone(
            id=z["id"], kind=z["kind"], x=z.get("x", 0.0), y=z.get("y", 0.0),
            radius=z.get("r", 0.0),
            points=tuple((p[0], p[1]) for p in z.get("points", ())),
            label=z.get("label", ""),
        )
        for z in plan_doc.get("zones", ())
    )
    plan = FloorPlan(
        room=room_t or default_plan().room,
        objects=objects,
        anchors=anchors,
        zones=zones,
    )
    try:
        plan.check()
    except ValueError as e:
        raise ScenarioError(f"plan: {e}") from e
    return plan


def parse_scenario(doc: dict) -> Scenario:
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: e.json_path)
    if errors:
        e = errors[0]
        raise ScenarioError(f"{e.json_path}: {e.message}")

    plan = _build_plan(doc)

    hh, mm = map(int, doc.get("start_time", "08:00").split(":"))
    start_epoch_ms = _EPOCH_DATE_MS + (hh * 3600 + mm * 60) * 1000

    agent = doc.get("agent", {})
    ax, ay = agent.get("x", 1.0), agent.get("y", 1.0)
    _check_in_room(plan, ax, ay, "agent start")
    waypoints = tuple(
        Waypoint(x=w["x"], y=w["y"], facing=w.get("facing"), at_s=w.get("at_s"))
        for w in agent.get("waypoints", ())
    )
    for w in waypoints:
        _check_in_room(plan, w.x, w.y, "waypoint")

    duration = float(doc["duration_s"])
    sensors = []
    for s in doc.get("sensors", ()):
        timeline = tuple((float(t), v) for t, v in s.get("timeline", ()))
        for t, _ in timeline:
            if t > duration:
                raise ScenarioError(f"sensor {s['id']}: timeline event at {t}s exceeds duration {duration}s")
        sensors.append(
            SensorSpec(
                id=s["id"], kind=s["kind"],
                period_s=float(s.get("period_s", 5.0)),
                timeline=timeline,
                initial=s.get("value"),
                noise=float(s.get("noise", 0.0)),
                derive=s.get("derive"),
                location=s.get("location", ""),
            )
        )

    events = doc.get("events", {})
    for t, _ in events.get("game_score", ()):
        if t > duration:
            raise ScenarioError(f"events.game_score at {t}s exceeds duration {duration}s")
    for t, _ in events.get("caregiver", ()):
        if t > duration:
            raise ScenarioError(f"events.caregiver at {t}s exceeds duration {duration}s")

    return Scenario(
        name=doc["name"],
        seed=int(doc["seed"]),
        duration_s=duration,
        start_epoch_ms=start_epoch_ms,
        plan=plan,
        agent_start=(ax, ay, float(agent.get("facing", 0.0)) % 360.0),
        agent_speed=float(agent.get("speed_mps", 0.8)),
        agent_worn=bool(agent.get("worn", True)),
        agent_worn_timeline=tuple((float(t), bool(v)) for t, v in agent.get("worn_timeline", ())),
        agent_pulse=float(agent.get("pulse_bpm", 72.0)),
        waypoints=waypoints,
        position_period_s=float(agent.get("position_period_s", 0.5)),
        position_noise_m=float(agent.get("position_noise_m", 0.1)),
        pulse_period_s=float(agent.get("pulse_period_s", 5.0)),
        sensors=tuple(sensors),
        game_score_events=tuple((float(t), float(v)) for t, v in events.get("game_score", ())),
        caregiver_events=tuple((float(t), dict(v)) for t, v in events.get("caregiver", ())),
        harness_events=tuple((float(t), str(v)) for t, v in events.get("harness", ())),
    )


def load_scenario(source: str) -> Scenario:
    """Load a scenario from a shipped name or a JSON file path."""
    if source in SHIPPED_SCENARIOS:
        text = resources.files("fogmind").joinpath(f"data/scenarios/{source}.json").read_text("utf-8")
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except ValueError as e:
        raise ScenarioError(f"not valid JSON: {e}") from e
    return parse_scenario(doc)
