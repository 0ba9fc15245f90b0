#!/usr/bin/env python3
"""
Test relativistic position inference

Covers radius and range conversions, the interval and lens regions, the
claimed-position check and the latency budget.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the src directory to sys.path to import the module
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from coherent_qpv import CausalityError, DomainError  # noqa: E402
from coherent_qpv.spacetime import (  # noqa: E402
    MEASURED_LATENCY,
    SPEED_OF_LIGHT,
    LatencyBudget,
    RegionKind,
    TimingRecord,
    VerifierGeometry,
    latency_budget,
    locate,
    ns_to_ps,
    position_region,
    radius_from_times,
    range_from_excess,
    region_contains,
    serial_link_delay,
)

LINE = VerifierGeometry(0.0, 2000.0)
PLANE = VerifierGeometry((0.0, 0.0), (2000.0, 0.0))


def test_speed_of_light():
    """c0 is the exact defined constant."""
    assert SPEED_OF_LIGHT == 299_792_458
    assert LINE.c0 == SPEED_OF_LIGHT

    print("✅ Speed of light test passed")


def test_radius_from_times():
    """Half the round trip at light speed."""
    assert radius_from_times(0, 0) == 0.0
    assert radius_from_times(1_000, 6_527_000) == pytest.approx(978.2, abs=0.1)
    assert radius_from_times(0, 2_000_000) == pytest.approx(
        2 * radius_from_times(0, 1_000_000), rel=1e-15
    )

    with pytest.raises(CausalityError):
        radius_from_times(1_000, 0)
    with pytest.raises(DomainError):
        radius_from_times(0, 1.5)

    print("✅ Radius conversion test passed")


def test_range_from_excess():
    """247.8 ns of excess latency is a 74.3 m range."""
    assert range_from_excess(0.0) == 0.0
    assert range_from_excess(247.8) == pytest.approx(74.29, abs=0.05)
    assert range_from_excess(247.8) == pytest.approx(74.3, abs=0.1)
    assert range_from_excess(1e6) == pytest.approx(299_792.458)

    with pytest.raises(DomainError):
        range_from_excess(-1.0)

    print("✅ Excess range test passed")


def test_geometry_validation():
    """Verifiers must be distinct points of equal dimension."""
    with pytest.raises(DomainError):
        VerifierGeometry(5.0, 5.0)
    with pytest.raises(DomainError):
        VerifierGeometry(0.0, (1.0, 2.0))
    with pytest.raises(DomainError):
        VerifierGeometry((0.0, 0.0, 0.0), (1.0, 0.0, 0.0))
    assert PLANE.dimension == 2
    assert PLANE.separation == 2000.0

    with pytest.raises(CausalityError):
        TimingRecord(t1_send=10, t1_recv=5, t2_send=0, t2_recv=0)

    print("✅ Geometry validation test passed")


def test_interval_regions():
    """Tangent, widened and disjoint intervals on a line."""
    tangent = position_region(LINE, 1000, 1000)
    assert tangent.kind is RegionKind.INTERVAL
    assert tangent.bounds == (1000.0, 1000.0)
    assert tangent.diameter == 0.0

    widened = position_region(LINE, 1037.15, 1037.15)
    assert widened.bounds[0] == pytest.approx(962.85)
    assert widened.bounds[1] == pytest.approx(1037.15)
    assert widened.diameter == pytest.approx(74.3, abs=0.1)

    disjoint = position_region(LINE, 500, 500)
    assert disjoint.kind is RegionKind.EMPTY
    assert disjoint.is_empty

    with pytest.raises(DomainError):
        position_region(LINE, -1, 1000)

    print("✅ Interval region test passed")


def test_tangency_identity():
    """Widening tangent radii by c0 dt / 2 yields a region of width c0 dt."""
    for excess_ns in (0.0, 1.0, 247.8, 5000.0):
        delta = range_from_excess(excess_ns)
        region = position_region(LINE, 1000 + delta / 2, 1000 + delta / 2)
        assert abs(region.diameter - delta) <= 1e-9

    print("✅ Tangency identity test passed")


def test_emptiness_matches_triangle_inequality():
    """A region is empty exactly when r1 + r2 < d."""
    rng = np.random.default_rng(8)
    for _ in range(200):
        r1, r2 = rng.uniform(0, 2500, size=2)
        for geom in (LINE, PLANE):
            region = position_region(geom, r1, r2)
            assert region.is_empty == (r1 + r2 < 2000)

    print("✅ Emptiness criterion test passed")


def test_lens_regions():
    """Proper lens, contained disk and the past-center case."""
    tangent = position_region(PLANE, 1000, 1000)
    assert tangent.kind is RegionKind.LENS
    assert tangent.diameter == pytest.approx(0.0, abs=1e-9)
    assert tangent.area == pytest.approx(0.0, abs=1e-6)

    r = 1000 + range_from_excess(247.8) / 2
    lens = position_region(PLANE, r, r)
    half_chord = math.sqrt(r * r - 1000 * 1000)
    assert lens.diameter == pytest.approx(2 * half_chord)
    flat = [coord for point in sorted(lens.points) for coord in point]
    assert flat == pytest.approx([1000.0, -half_chord, 1000.0, half_chord])
    expected_area = 2 * r * r * math.acos(1000 / r) - 1000 * 2 * half_chord
    assert lens.area == pytest.approx(expected_area, rel=1e-9)

    inner = position_region(VerifierGeometry((0, 0), (10, 0)), 100, 5)
    assert inner.diameter == pytest.approx(10.0)
    assert inner.area == pytest.approx(25 * math.pi)

    past_center = position_region(VerifierGeometry((0, 0), (10, 0)), 12, 5)
    assert past_center.diameter == pytest.approx(10.0)
    assert len(past_center.points) == 2

    print("✅ Lens region test passed")


def test_lens_diameter_is_monotone():
    """Growing either radius never shrinks a nonempty lens."""
    for r2 in (600.0, 1000.0, 1900.0):
        diameters = [
            position_region(PLANE, r1, r2).diameter
            for r1 in np.linspace(2000 - r2, 4500, 400)
        ]
        assert all(b >= a - 1e-9 for a, b in zip(diameters, diameters[1:]))

    print("✅ Lens monotonicity test passed")


def test_region_contains():
    """Claimed positions inside and outside the region."""
    interval = position_region(LINE, 1037.15, 1037.15)
    assert region_contains(interval, 1000.0)
    assert region_contains(interval, 962.85)
    assert not region_contains(interval, 900.0)
    assert not region_contains(position_region(LINE, 500, 500), 1000.0)

    lens = position_region(PLANE, 1100, 1100)
    assert region_contains(lens, (1000.0, 100.0))
    assert not region_contains(lens, (1000.0, 1000.0))
    with pytest.raises(DomainError):
        region_contains(lens, 1000.0)

    print("✅ Region containment test passed")


def test_locate_from_timing():
    """Tangent round trips plus 247.8 ns of excess give a 74.3 m interval."""
    light_ps = round(2000 / SPEED_OF_LIGHT * 1e12)
    excess_ps = ns_to_ps(247.8)
    timing = TimingRecord(
        t1_send=0,
        t1_recv=light_ps + excess_ps,
        t2_send=5_000,
        t2_recv=5_000 + light_ps + excess_ps,
    )
    region = locate(LINE, timing)

    assert region.kind is RegionKind.INTERVAL
    assert region.diameter == pytest.approx(74.3, abs=0.1)
    assert region_contains(region, 1000.0)
    assert region.to_dict()["kind"] == "interval"

    print("✅ Locate test passed")


def test_latency_budget():
    """Measured components sum to 249.44 ns."""
    total, breakdown = latency_budget(MEASURED_LATENCY)
    assert total == pytest.approx(249.44)
    assert abs(total - 247.8) / 247.8 <= 0.01
    assert breakdown[0] == ("boolean_function", 117.3)
    assert [value for _, value in breakdown] == sorted(
        (value for _, value in breakdown), reverse=True
    )

    assert latency_budget(LatencyBudget())[0] == 0.0
    total, _ = latency_budget(LatencyBudget(boolean_function=117.3))
    assert total == pytest.approx(117.3)

    with pytest.raises(DomainError):
        LatencyBudget(detector=-1.0)

    print("✅ Latency budget test passed")


def test_serial_link_delay():
    """Serial links wait n/2 - 1 bit periods; parallel links none."""
    assert serial_link_delay(40, 1.0) == pytest.approx(19.0)
    assert serial_link_delay(2, 5.0) == 0.0
    assert serial_link_delay(40, 1.0, parallel=True) == 0.0
    with pytest.raises(DomainError):
        serial_link_delay(7, 1.0)

    print("✅ Serial link delay test passed")


if __name__ == "__main__":
    print("🧪 Testing spacetime inference...")
    print("=" * 50)

    test_speed_of_light()
    test_radius_from_times()
    test_range_from_excess()
    test_geometry_validation()
    test_interval_regions()
    test_tangency_identity()
    test_emptiness_matches_triangle_inequality()
    test_lens_regions()
    test_lens_diameter_is_monotone()
    test_region_contains()
    test_locate_from_timing()
    test_latency_budget()
    test_serial_link_delay()

    print("=" * 50)
    print("🎉 All spacetime tests passed!")
