"""Planar geometry for the virtual home: distances in decimeters, heading
deviation in degrees, danger-zone containment."""
from __future__ import annotations

import math
from typing import Iterable, Sequence

# a pose on/near a disc boundary counts as a breach within this margin (m)
ZONE_BOUNDARY_MARGIN_M = 0.5

M_PER_DM = 0.1


def distance_dm(px: float, py: float, ox: float, oy: float) -> float:
    """Center-to-center planar distance, reported in decimeters."""
    return math.hypot(ox - px, oy - py) / M_PER_DM


def bearing_deg(px: float, py: float, ox: float, oy: float) -> float:
    """Bearing from pose to object, degrees in [0, 360), 0 = +x, counterclockwise."""
    return math.degrees(math.atan2(oy - py, ox - px)) % 360.0


def heading_deviation(facing: float, px: float, py: float, ox: float, oy: float) -> float:
    """Absolute shortest-angle difference between facing and bearing, in [0, 180]."""
    d = (facing - bearing_deg(px, py, ox, oy)) % 360.0
    return min(d, 360.0 - d)


def _point_in_polygon(x: float, y: float, points: Sequence[tuple[float, float]]) -> bool:
    inside = False
    n = len(points)
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < x_cross:
                inside = not inside
    return inside


def zone_contains(zone, x: float, y: float) -> bool:
    """True when (x, y) breaches the zone: inside it, or within the boundary
    margin of a disc's edge."""
    if zone.kind == "disc":
        return math.hypot(x - zone.x, y - zone.y) <= zone.radius + ZONE_BOUNDARY_MARGIN_M
    return _point_in_polygon(x, y, zone.points)


def in_danger_zone(x: float, y: float, zones: Iterable) -> str | None:
    """ID of the first breached zone in declaration order, else None."""
    for zone in zones:
        if zone_contains(zone, x, y):
            return zone.id
    return None
