"""Compact JSON payload codec for sensor readings and position fixes."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .topics import TOPIC_POSITION


class EncodeError(ValueError):
    pass


class MalformedPayloadError(ValueError):
    pass


@dataclass(frozen=True)
class Reading:
    topic: str
    value: float | int | bool
    unit: str
    timestamp: int  # epoch ms
    seq: int
    device_id: str
    sequenced: bool = True
    worn: bool | None = None  # pulse topic only


@dataclass(frozen=True)
class PositionFix:
    x: float
    y: float
    facing: float
    timestamp: int
    seq: int

    topic = TOPIC_POSITION


def encode_reading(r: Reading) -> bytes:
    if isinstance(r.value, float) and not math.isfinite(r.value):
        raise EncodeError(f"non-finite value {r.value} on {r.topic}")
    obj: dict = {"v": r.value, "u": r.unit, "t": r.timestamp, "seq": r.seq, "d": r.device_id}
    if r.worn is not None:
        obj["worn"] = r.worn
    return json.dumps(obj, separators=(",", ":")).encode("utf-8")


def decode_reading(topic: str, payload: bytes | str) -> Reading:
    try:
        obj = json.loads(payload)
    except (ValueError, TypeError) as e:
        raise MalformedPayloadError(f"{topic}: not JSON ({e})") from e
    if not isinstance(obj, dict) or "v" not in obj or "t" not in obj:
        raise MalformedPayloadError(f"{topic}: payload needs 'v' and 't'")
    seq = obj.get("seq")
    sequenced = seq is not None
    worn = obj.get("worn")
    return Reading(
        topic=topic,
        value=obj["v"],
        unit=obj.get("u", ""),
        timestamp=int(obj["t"]),
        seq=int(seq) if sequenced else 0,
        device_id=obj.get("d", ""),
        sequenced=sequenced,
        worn=worn if isinstance(worn, bool) else None,
    )


def encode_position(p: PositionFix) -> bytes:
    for v in (p.x, p.y, p.facing):
        if not math.isfinite(v):
            raise EncodeError(f"non-finite position field {v}")
    obj = {"x": p.x, "y": p.y, "facing": p.facing, "t": p.timestamp, "seq": p.seq}
    return json.dumps(obj, separators=(",", ":")).encode("utf-8")


def decode_position(payload: bytes | str) -> PositionFix:
    try:
        obj = json.loads(payload)
    except (ValueError, TypeError) as e:
        raise MalformedPayloadError(f"position: not JSON ({e})") from e
    if not isinstance(obj, dict) or not {"x", "y", "t"}.issubset(obj):
        raise MalformedPayloadError("position payload needs 'x', 'y' and 't'")
    return PositionFix(
        x=float(obj["x"]),
        y=float(obj["y"]),
        facing=float(obj.get("facing", 0.0)),
        timestamp=int(obj["t"]),
        seq=int(obj.get("seq", 0)),
    )
