"""Action types the decision loop can emit.

Every ARMessage and ActuatorCommand carries either the activating rule
id or caregiver provenance (src="caregiver", rule=0), so the dispatch
log stays auditable.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

SRC_RULE = "rule"
SRC_CAREGIVER = "caregiver"


@dataclass(frozen=True)
class ARMessage:
    kind: str  # voice | image | text
    id: int
    rule: int  # 0 means caregiver-sent
    src: str = SRC_RULE
    nonce: str | None = None


@dataclass(frozen=True)
class ActuatorCommand:
    id: str
    state: str  # on | off
    rule: int
    src: str = SRC_RULE


@dataclass(frozen=True)
class CaregiverNotification:
    kind: str  # worn_off | stale_inputs | ...
    detail: str


@dataclass(frozen=True)
class ModeChange:
    to: str  # automated | semi
    cause: str


def action_record(action) -> dict:
    """Flatten one action into a log-ready dict."""
    if isinstance(action, ARMessage):
        rec = {
            "type": "message",
            "kind": action.kind,
            "id": action.id,
            "rule": action.rule,
            "src": action.src,
        }
        if action.nonce is not None:
            rec["nonce"] = action.nonce
        return rec
    if isinstance(action, ActuatorCommand):
        return {
            "type": "actuator",
            "id": action.id,
            "state": action.state,
            "rule": action.rule,
            "src": action.src,
        }
    if isinstance(action, CaregiverNotification):
        return {"type": "notify", "kind": action.kind, "detail": action.detail}
    if isinstance(action, ModeChange):
        return {"type": "mode", "to": action.to, "cause": action.cause}
    raise TypeError(f"not an action: {action!r}")


def canonical_json(obj) -> str:
    """Stable serialization used for dispatch-log lines and replays."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
