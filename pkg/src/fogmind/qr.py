"""Minimum printable QR-code size from scan distance and camera geometry.

Two independent lower bounds are computed and the larger one wins: a
scan-distance bound (how far away the code must still resolve, derated
by adverse conditions) and a sensor bound (how many of the camera's
pixels land on the code at the given field of view).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

GOLDEN_RATIO = (1 + math.sqrt(5)) / 2

# distance factor starts here and loses one per adverse condition
BASE_DISTANCE_FACTOR = 10
MIN_DISTANCE_FACTOR = 7

# the size normalization is anchored to a 25-module side
_NORM_MODULES = 25

# a frequently cited minimum for this exact configuration is 21*21 mm;
# the equations below give 25.2 mm from the same inputs and no
# documented parameter choice reproduces the smaller figure, so the
# computed value is reported unchanged alongside this note
DISCREPANCY_NOTE = (
    "note: a frequently cited minimum for this configuration is "
    "'at least 21*21mm'; these equations give 25.20 mm from the same "
    "inputs. The smaller figure cannot be reproduced from them (it would "
    "need a shorter scan distance or a lower distance factor), so the "
    "computed value is reported unchanged."
)

_NOTED_CONFIG = (300.0, 10, 21)  # scan distance, distance factor, modules


class QrSizingError(ValueError):
    pass


@dataclass(frozen=True)
class QrSizingParams:
    scan_distance_mm: float = 300.0
    distance_factor: int = BASE_DISTANCE_FACTOR
    modules_per_side: int = 21
    pixels_per_module: int = 10
    camera_pixels: float = 12_000_000
    fov_mm: float = 340.0
    aspect: float = GOLDEN_RATIO

    def __post_init__(self):
        for name in ("scan_distance_mm", "modules_per_side", "pixels_per_module",
                     "camera_pixels", "fov_mm", "aspect"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise QrSizingError(f"{name} must be positive, got {value!r}")
        if not MIN_DISTANCE_FACTOR <= self.distance_factor <= BASE_DISTANCE_FACTOR:
            raise QrSizingError(
                f"distance_factor must lie in "
                f"[{MIN_DISTANCE_FACTOR}, {BASE_DISTANCE_FACTOR}], "
                f"got {self.distance_factor!r}")


def adverse_distance_factor(low_light: bool = False,
                            light_colored: bool = False,
                            off_angle: bool = False) -> int:
    """Distance factor after derating for adverse scanning conditions."""
    return BASE_DISTANCE_FACTOR - int(low_light) - int(light_colored) - int(off_angle)


def qr_min_size(p: QrSizingParams) -> dict:
    """Both sizing bounds and their maximum, in millimetres."""
    l_min1 = (p.scan_distance_mm / p.distance_factor) * (p.modules_per_side / _NORM_MODULES)
    ppq = p.pixels_per_module * p.modules_per_side
    ccd_h = math.sqrt(p.camera_pixels / p.aspect)
    ccd_w = p.aspect * ccd_h
    l_min2 = ppq * p.fov_mm / ccd_w
    result = {
        "L_min1": l_min1,
        "L_min2": l_min2,
        "L_min": max(l_min1, l_min2),
        "ppq_px": ppq,
        "ccd_w_px": ccd_w,
        "ccd_h_px": ccd_h,
    }
    config = (p.scan_distance_mm, p.distance_factor, p.modules_per_side)
    if config == _NOTED_CONFIG:
        result["note"] = DISCREPANCY_NOTE
    return result
