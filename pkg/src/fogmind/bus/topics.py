"""Topic table, QoS/retention policy and MQTT filter matching."""
from __future__ import annotations

TOPIC_POSITION = "home/position/tag"
TOPIC_PULSE = "home/pulse/tag"
TOPIC_GAME_SCORE = "home/game/score"
TOPIC_MODE = "assistant/mode"
TOPIC_ACK = "caregiver/command/ack"

SENSOR_KINDS = ("rain", "flame", "gas", "temperature", "humidity", "plant_humidity", "motion")
BOOLEAN_SENSOR_KINDS = ("rain", "flame", "gas", "motion")
MESSAGE_KINDS = ("voice", "image", "text")
COMMAND_KINDS = ("reminder", "lock", "unlock", "zone_add", "zone_del", "med_schedule", "override")

SENSOR_UNITS = {
    "rain": "flag",
    "flame": "flag",
    "gas": "flag",
    "temperature": "degC",
    "humidity": "pct",
    "plant_humidity": "pct",
    "motion": "flag",
}


def sensor_topic(device: str, kind: str) -> str:
    if kind not in SENSOR_KINDS:
        raise ValueError(f"unknown sensor kind {kind!r}")
    return f"home/sensor/{device}/{kind}"


def message_topic(kind: str) -> str:
    if kind not in MESSAGE_KINDS:
        raise ValueError(f"unknown message kind {kind!r}")
    return f"assistant/message/{kind}"


def actuator_topic(actuator_id: str) -> str:
    return f"assistant/actuator/{actuator_id}"


def command_topic(kind: str) -> str:
    if kind not in COMMAND_KINDS:
        raise ValueError(f"unknown command kind {kind!r}")
    return f"caregiver/command/{kind}"


def latency_topic(probe: str) -> str:
    return f"sys/latency/{probe}"


def qos_for(topic: str) -> int:
    # position is high-rate and superseding; everything else must not be lost
    return 0 if topic == TOPIC_POSITION else 1


def retained_for(topic: str) -> bool:
    # state-like topics retain so late subscribers cold-start complete
    if topic.startswith("home/") or topic.startswith("assistant/actuator/"):
        return True
    return topic == TOPIC_MODE


class InvalidFilterError(ValueError):
    pass


def validate_filter(pattern: str) -> None:
    if not pattern:
        raise InvalidFilterError("empty filter")
    levels = pattern.split("/")
    for i, level in enumerate(levels):
        if "+" in level and level != "+":
            raise InvalidFilterError(f"'+' must occupy a whole level: {pattern!r}")
        if "#" in level and (level != "#" or i != len(levels) - 1):
            raise InvalidFilterError(f"'#' must be the final level: {pattern!r}")


def topic_matches(pattern: str, topic: str) -> bool:
    validate_filter(pattern)
    p_levels = pattern.split("/")
    t_levels = topic.split("/")
    for i, p in enumerate(p_levels):
        if p == "#":
            return True
        if i >= len(t_levels):
            return False
        if p != "+" and p != t_levels[i]:
            return False
    return len(p_levels) == len(t_levels)
