from .geometry import (
    bearing_deg,
    distance_dm,
    heading_deviation,
    in_danger_zone,
    zone_contains,
)
from .model import (
    Anchor,
    DangerZone,
    FloorPlan,
    PatientAgent,
    SmartObject,
    Waypoint,
    default_plan,
)
from .scenario import (
    SCENARIO_SCHEMA,
    SHIPPED_SCENARIOS,
    Scenario,
    ScenarioError,
    SensorSpec,
    load_scenario,
    parse_scenario,
)
from .world import HEARTBEAT_S, Emission, WorldState, daily_movement

__all__ = [
    "Anchor",
    "DangerZone",
    "Emission",
    "FloorPlan",
    "HEARTBEAT_S",
    "PatientAgent",
    "SCENARIO_SCHEMA",
    "SHIPPED_SCENARIOS",
    "Scenario",
    "ScenarioError",
    "SensorSpec",
    "SmartObject",
    "Waypoint",
    "WorldState",
    "bearing_deg",
    "daily_movement",
    "default_plan",
    "distance_dm",
    "heading_deviation",
    "in_danger_zone",
    "load_scenario",
    "parse_scenario",
    "zone_contains",
]
