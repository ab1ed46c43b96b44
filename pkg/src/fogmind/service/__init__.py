"""Decision service: snapshot assembly, rule evaluation, dispatch, modes."""
from .actions import (
    ActuatorCommand,
    ARMessage,
    CaregiverNotification,
    ModeChange,
    action_record,
)
from .latency import LatencyRecord, LatencyTracker
from .modes import (
    DEFAULT_ENDPOINTS,
    MODE_AUTOMATED,
    MODE_SEMI,
    DeviceRegistry,
    Endpoint,
    ModeManager,
)
from .service import DecisionService, ServiceConfig
from .snapshot import InputSnapshot, SnapshotStore

__all__ = [
    "ARMessage",
    "ActuatorCommand",
    "CaregiverNotification",
    "ModeChange",
    "action_record",
    "LatencyRecord",
    "LatencyTracker",
    "MODE_AUTOMATED",
    "MODE_SEMI",
    "Endpoint",
    "DeviceRegistry",
    "ModeManager",
    "DEFAULT_ENDPOINTS",
    "InputSnapshot",
    "SnapshotStore",
    "DecisionService",
    "ServiceConfig",
]
