"""Virtual-home data model: floor plan, smart objects, danger zones, agent."""
from __future__ import annotations

from dataclasses import dataclass, field

ROOM_DEFAULT = (8.5, 4.6, 2.0)

# anchors may sit on or just over the wall line (mounted hardware)
ANCHOR_SLACK_M = 0.5

DEFAULT_OBJECT_FOOTPRINT = (0.52, 0.7)
DEFAULT_OBJECT_HEIGHT = 0.23

# ids and positions mirror the default rulebook's object registry
DEFAULT_OBJECTS = (
    ("object1", 5.0, 3.0),
    ("object2", 1.5, 0.8),
    ("object3", 7.6, 3.8),
    ("object4", 2.2, 3.8),
    ("object5", 6.4, 0.9),
)

DEFAULT_ANCHORS = (
    ("anchor1", 0.0, 0.0),
    ("anchor2", 2.8, 4.8),
    ("anchor3", 7.2, 2.4),
)


@dataclass(frozen=True)
class SmartObject:
    id: str
    x: float
    y: float
    width: float = DEFAULT_OBJECT_FOOTPRINT[0]
    depth: float = DEFAULT_OBJECT_FOOTPRINT[1]
    height: float = DEFAULT_OBJECT_HEIGHT


@dataclass(frozen=True)
class Anchor:
    id: str
    x: float
    y: float


@dataclass(frozen=True)
class DangerZone:
    id: str
    kind: str  # "disc" | "polygon"
    x: float = 0.0
    y: float = 0.0
    radius: float = 0.0
    points: tuple[tuple[float, float], ...] = ()
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind == "disc":
            if self.radius <= 0:
                raise ValueError(f"zone {self.id}: disc needs radius > 0")
        elif self.kind == "polygon":
            if len(self.points) < 3:
                raise ValueError(f"zone {self.id}: polygon needs >= 3 points")
        else:
            raise ValueError(f"zone {self.id}: kind must be disc or polygon")


@dataclass(frozen=True)
class FloorPlan:
    room: tuple[float, float, float] = ROOM_DEFAULT
    objects: tuple[SmartObject, ...] = ()
    anchors: tuple[Anchor, ...] = ()
    zones: tuple[DangerZone, ...] = ()

    def check(self) -> None:
        w, d, _ = self.room
        for o in self.objects:
            if not (0 <= o.x <= w and 0 <= o.y <= d):
                raise ValueError(f"object {o.id} at ({o.x}, {o.y}) outside {w} x {d} m room")
        for a in self.anchors:
            if not (-ANCHOR_SLACK_M <= a.x <= w + ANCHOR_SLACK_M
                    and -ANCHOR_SLACK_M <= a.y <= d + ANCHOR_SLACK_M):
                raise ValueError(f"anchor {a.id} at ({a.x}, {a.y}) too far outside the room")

    def object(self, object_id: str) -> SmartObject:
        for o in self.objects:
            if o.id == object_id:
                return o
        raise KeyError(f"no object {object_id}")


def default_plan(zones: tuple[DangerZone, ...] = ()) -> FloorPlan:
    return FloorPlan(
        room=ROOM_DEFAULT,
        objects=tuple(SmartObject(id=i, x=x, y=y) for i, x, y in DEFAULT_OBJECTS),
        anchors=tuple(Anchor(id=i, x=x, y=y) for i, x, y in DEFAULT_ANCHORS),
        zones=zones,
    )


@dataclass
class Waypoint:
    x: float
    y: float
    facing: float | None = None  # snap on arrival
    at_s: float | None = None    # do not depart toward this point before t


@dataclass
class PatientAgent:
    x: float
    y: float
    facing: float  # deg, [0, 360), 0 = +x, counterclockwise
    speed: float = 0.8  # m/s while traveling
    waypoints: list[Waypoint] = field(default_factory=list)
    worn: bool = True
    pulse_bpm: float = 72.0
    moved_s: float = 0.0  # accrued motion time since simulated midnight
    _wp_index: int = 0

    @property
    def moving_target(self) -> Waypoint | None:
        if self._wp_index < len(self.waypoints):
            return self.waypoints[self._wp_index]
        return None
