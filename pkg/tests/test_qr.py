"""QR sizing bounds, frozen against a high-precision arithmetic oracle."""
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fogmind.qr import (
    GOLDEN_RATIO,
    QrSizingError,
    QrSizingParams,
    adverse_distance_factor,
    qr_min_size,
)

# mpmath at 50 digits, rounded to float
CCD_H_PX = 2723.308257432261
CCD_W_PX = 4406.405322368647
L_MIN2_MM = 16.203684131721953


def test_default_configuration_values():
    out = qr_min_size(QrSizingParams())
    assert out["L_min1"] == pytest.approx(25.2, abs=1e-12)
    assert out["ppq_px"] == 210
    assert out["ccd_h_px"] == pytest.approx(CCD_H_PX, rel=1e-12)
    assert out["ccd_w_px"] == pytest.approx(CCD_W_PX, rel=1e-12)
    assert out["L_min2"] == pytest.approx(L_MIN2_MM, rel=1e-12)
    # the scan-distance bound dominates
    assert out["L_min"] == out["L_min1"]


def test_sensor_aspect_is_golden():
    out = qr_min_size(QrSizingParams())
    assert out["ccd_w_px"] / out["ccd_h_px"] == pytest.approx(GOLDEN_RATIO)
    assert out["ccd_w_px"] * out["ccd_h_px"] == pytest.approx(12_000_000)


def test_note_only_on_the_contested_configuration():
    assert "at least 21*21mm" in qr_min_size(QrSizingParams())["note"]
    assert "note" not in qr_min_size(QrSizingParams(scan_distance_mm=400.0))
    assert "note" not in qr_min_size(QrSizingParams(distance_factor=9))
    assert "note" not in qr_min_size(QrSizingParams(modules_per_side=25))


def test_adverse_conditions_derate_the_factor():
    assert adverse_distance_factor() == 10
    assert adverse_distance_factor(low_light=True) == 9
    assert adverse_distance_factor(low_light=True, light_colored=True) == 8
    assert adverse_distance_factor(True, True, True) == 7


def test_derated_factor_grows_the_code():
    best = qr_min_size(QrSizingParams(distance_factor=10))
    worst = qr_min_size(QrSizingParams(
        distance_factor=adverse_distance_factor(True, True, True)))
    assert worst["L_min1"] == pytest.approx(300 / 7 * 21 / 25)
    assert worst["L_min"] > best["L_min"]


@pytest.mark.parametrize(
    "kwargs",
    [
        {"scan_distance_mm": 0.0},
        {"scan_distance_mm": -5.0},
        {"scan_distance_mm": float("nan")},
        {"scan_distance_mm": float("inf")},
        {"modules_per_side": 0},
        {"pixels_per_module": 0},
        {"camera_pixels": 0.0},
        {"fov_mm": -1.0},
        {"aspect": 0.0},
        {"distance_factor": 6},
        {"distance_factor": 11},
    ],
)
def test_invalid_parameters_rejected(kwargs):
    with pytest.raises(QrSizingError):
        QrSizingParams(**kwargs)


@given(
    d1=st.floats(10.0, 5000.0),
    d2=st.floats(10.0, 5000.0),
)
def test_longer_scan_distance_never_shrinks_the_code(d1, d2):
    lo, hi = sorted((d1, d2))
    near = qr_min_size(QrSizingParams(scan_distance_mm=lo))["L_min"]
    far = qr_min_size(QrSizingParams(scan_distance_mm=hi))["L_min"]
    assert far >= near


@given(factor=st.integers(7, 9))
def test_any_derating_never_shrinks_the_code(factor):
    derated = qr_min_size(QrSizingParams(distance_factor=factor))["L_min"]
    baseline = qr_min_size(QrSizingParams())["L_min"]
    assert derated >= baseline


def test_sensor_bound_can_dominate():
    # a wide field of view spreads the sensor's pixels thin, so the
    # sensor bound must win the max
    out = qr_min_size(QrSizingParams(fov_mm=1000.0))
    assert out["L_min"] == out["L_min2"]
    assert out["L_min2"] == pytest.approx(210 * 1000.0 / CCD_W_PX, rel=1e-12)
