"""Caregiver command validation.

Commands arrive on caregiver/command/{kind} or through the WebSocket
bridge; both paths funnel through parse_command, so a malformed
payload is rejected with one diagnostic regardless of transport.
"""
from __future__ import annotations

import json

import jsonschema

from ..bus.topics import MESSAGE_KINDS

IMMEDIATE_KINDS = ("reminder", "lock", "unlock")
QUEUED_KINDS = ("zone_add", "zone_del", "med_schedule", "override")


class CommandError(ValueError):
    """Rejected caregiver command; the message goes into the nack."""


_TIME_PATTERN = r"^([01][0-9]|2[0-3]):[0-5][0-9]$"

_SCHEMAS = {
    "reminder": {
        "type": "object",
        "properties": {
            "kind": {"enum": list(MESSAGE_KINDS)},
            "id": {"type": "integer", "minimum": 1},
            "nonce": {"type": "string"},
        },
        "required": ["kind", "id"],
        "additionalProperties": True,
    },
    "lock": {"type": "object", "properties": {"nonce": {"type": "string"}}},
    "unlock": {"type": "object", "properties": {"nonce": {"type": "string"}}},
    "zone_add": {
        "type": "object",
        "properties": {
            "name": {"type": "string", "pattern": r"^[A-Za-z0-9_-]{1,40}$"},
            "shape": {"enum": ["disc", "polygon"]},
            "x": {"type": "number"},
            "y": {"type": "number"},
            "r": {"type": "number", "exclusiveMinimum": 0},
            "points": {
                "type": "array",
                "minItems": 3,
                "items": {
                    "type": "array",
                    "minItems": 2,
                    "maxItems": 2,
                    "items": {"type": "number"},
                },
            },
            "nonce": {"type": "string"},
        },
        "required": ["name", "shape"],
        "allOf": [
            {
                "if": {"properties": {"shape": {"const": "disc"}}},
                "then": {"required": ["x", "y", "r"]},
            },
            {
                "if": {"properties": {"shape": {"const": "polygon"}}},
                "then": {"required": ["points"]},
            },
        ],
    },
    "zone_del": {
        "type": "object",
        "properties": {
            "name": {"type": "string"},
            "nonce": {"type": "string"},
        },
        "required": ["name"],
    },
    "med_schedule": {
        "type": "object",
        "properties": {
            "time": {"type": "string", "pattern": _TIME_PATTERN},
            "voice": {"type": "integer", "minimum": 1},
            "image": {"type": "integer", "minimum": 1},
            "nonce": {"type": "string"},
        },
        "required": ["time", "voice"],
    },
    "override": {
        "type": "object",
        "properties": {
            "mode": {"enum": ["automated", "semi", "auto"]},
            "nonce": {"type": "string"},
        },
        "required": ["mode"],
    },
}

COMMAND_KINDS = tuple(_SCHEMAS)


def parse_command(kind: str, payload: bytes) -> dict:
    """Validate and return the command body; CommandError on any problem."""
    if kind not in _SCHEMAS:
        raise CommandError(f"unknown command kind {kind!r}")
    try:
        body = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CommandError(f"payload is not valid JSON: {exc}") from exc
    if not isinstance(body, dict):
        raise CommandError("payload must be a JSON object")
    try:
        jsonschema.validate(body, _SCHEMAS[kind])
    except jsonschema.ValidationError as exc:
        raise CommandError(exc.message) from exc
    return body
