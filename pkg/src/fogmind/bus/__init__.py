"""Telemetry bus: topic schema, payload codec, MQTT transport, offline queues."""
from .broker import MqttBroker
from .client import MqttClient
from .codec import (
    EncodeError,
    MalformedPayloadError,
    PositionFix,
    Reading,
    decode_position,
    decode_reading,
    encode_position,
    encode_reading,
)
from .offline import OfflineStore
from .topics import (
    BOOLEAN_SENSOR_KINDS,
    COMMAND_KINDS,
    MESSAGE_KINDS,
    SENSOR_KINDS,
    SENSOR_UNITS,
    TOPIC_ACK,
    TOPIC_GAME_SCORE,
    TOPIC_MODE,
    TOPIC_POSITION,
    TOPIC_PULSE,
    InvalidFilterError,
    actuator_topic,
    command_topic,
    latency_topic,
    message_topic,
    qos_for,
    retained_for,
    sensor_topic,
    topic_matches,
    validate_filter,
)

__all__ = [
    "MqttBroker",
    "MqttClient",
    "OfflineStore",
    "Reading",
    "PositionFix",
    "EncodeError",
    "MalformedPayloadError",
    "encode_reading",
    "decode_reading",
    "encode_position",
    "decode_position",
    "SENSOR_KINDS",
    "BOOLEAN_SENSOR_KINDS",
    "MESSAGE_KINDS",
    "COMMAND_KINDS",
    "SENSOR_UNITS",
    "TOPIC_POSITION",
    "TOPIC_PULSE",
    "TOPIC_GAME_SCORE",
    "TOPIC_MODE",
    "TOPIC_ACK",
    "sensor_topic",
    "message_topic",
    "actuator_topic",
    "command_topic",
    "latency_topic",
    "qos_for",
    "retained_for",
    "topic_matches",
    "validate_filter",
    "InvalidFilterError",
]
