"""
Relativistic position inference and latency accounting.

A verifier that sends its challenge at ``t_send`` and receives the answer at
``t_recv`` knows the prover sits within ``(t_recv - t_send) * c0 / 2`` of it.
Intersecting the two verifiers' balls bounds the prover's position. Times are
integer picoseconds throughout; distances are meters.
"""

import enum
import logging
import math
from dataclasses import dataclass, fields
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from .exceptions import CausalityError, DomainError

logger = logging.getLogger(__name__)

PS_PER_NS = 1000
PS_PER_S = 10**12
NS_PER_S = 1e9
CONTAINMENT_TOL = 1e-9

Coordinate = Union[float, Sequence[float]]


def ns_to_ps(ns: float) -> int:
    return int(round(ns * PS_PER_NS))


def ps_to_ns(ps: int) -> float:
    return ps / PS_PER_NS


def _point(value: Coordinate, name: str) -> Tuple[float, ...]:
    coords = np.atleast_1d(np.asarray(value, dtype=float))
    if coords.ndim != 1 or coords.size not in (1, 2):
        raise DomainError(f"{name} must be a scalar or an (x, y) pair, got {value!r}")
    if not np.all(np.isfinite(coords)):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return tuple(float(x) for x in coords)


def _picoseconds(name: str, value: Any) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise DomainError(
            f"{name} must be an integer number of picoseconds, got {value!r}"
        )
    return int(value)


@dataclass(frozen=True)
class VerifierGeometry:
    """Positions of V1 and V2 on a line (scalars) or in a plane (pairs)."""

    v1: Coordinate
    v2: Coordinate

    def __post_init__(self):
        v1 = _point(self.v1, "v1")
        v2 = _point(self.v2, "v2")
        if len(v1) != len(v2):
            raise DomainError("v1 and v2 must have the same dimension")
        if v1 == v2:
            raise DomainError(f"verifiers must be at distinct positions, got {v1}")
        object.__setattr__(self, "v1", v1)
        object.__setattr__(self, "v2", v2)

    @property
    def c0(self) -> float:
        return SPEED_OF_LIGHT

    @property
    def dimension(self) -> int:
        return len(self.v1)

    @property
    def separation(self) -> float:
        return float(np.linalg.norm(np.subtract(self.v2, self.v1)))


@dataclass(frozen=True)
class TimingRecord:
    """Send and receive instants of both verifiers, in integer picoseconds."""

    t1_send: int
    t1_recv: int
    t2_send: int
    t2_recv: int

    def __post_init__(self):
        for f in fields(self):
            value = _picoseconds(f.name, getattr(self, f.name))
            object.__setattr__(self, f.name, value)
        for side in ("1", "2"):
            sent = getattr(self, f"t{side}_send")
            received = getattr(self, f"t{side}_recv")
            if received < sent:
                raise CausalityError(
                    f"V{side} received at {received} ps before sending at {sent} ps"
                )


class RegionKind(enum.Enum):
    INTERVAL = "interval"
    LENS = "lens"
    EMPTY = "empty"


@dataclass(frozen=True)
class PositionRegion:
    """
    Admissible prover positions.

    ``bounds`` is set for intervals; ``points`` holds the two circle
    intersection points of a proper lens and ``area`` its area. ``centers`` and
    ``radii`` keep the balls the region was built from.
    """

    kind: RegionKind
    diameter: float = 0.0
    bounds: Optional[Tuple[float, float]] = None
    points: Tuple[Tuple[float, float], ...] = ()
    area: Optional[float] = None
    centers: Tuple[Tuple[float, ...], ...] = ()
    radii: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.diameter < 0:
            raise DomainError(f"diameter must be >= 0, got {self.diameter}")

    @property
    def is_empty(self) -> bool:
        return self.kind is RegionKind.EMPTY

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "diameter_m": self.diameter,
            "bounds_m": list(self.bounds) if self.bounds is not None else None,
            "points_m": [list(p) for p in self.points],
            "area_m2": self.area,
            "radii_m": list(self.radii),
        }


@dataclass(frozen=True)
class LatencyBudget:
    """Prover-side delay components in nanoseconds."""

    boolean_function: float = 0.0
    classical_channel_1: float = 0.0
    classical_channel_2: float = 0.0
    detector: float = 0.0
    switch_driver: float = 0.0
    interconnect: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = float(getattr(self, f.name))
            if not math.isfinite(value) or value < 0:
                raise DomainError(
                    f"latency component {f.name} must be >= 0, got {value}"
                )
            object.__setattr__(self, f.name, value)

    def components(self) -> Dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# Measured delays of the reference deployment; the switch figure is an upper bound
MEASURED_LATENCY = LatencyBudget(
    boolean_function=117.3,
    classical_channel_1=22.05,
    classical_channel_2=22.39,
    detector=17.7,
    switch_driver=50.0,
    interconnect=20.0,
)


def radius_from_times(t_send: int, t_recv: int, c0: float = SPEED_OF_LIGHT) -> float:
    """Radius of the ball around a verifier implied by one round trip."""
    t_send = _picoseconds("t_send", t_send)
    t_recv = _picoseconds("t_recv", t_recv)
    if t_recv < t_send:
        raise CausalityError(f"received at {t_recv} ps before sending at {t_send} ps")
    return (t_recv - t_send) * c0 / (2 * PS_PER_S)


def range_from_excess(delta_t_ns: float) -> float:
    """Position uncertainty ``c0 * delta_t`` for an excess latency in nanoseconds."""
    if not math.isfinite(delta_t_ns) or delta_t_ns < 0:
        raise DomainError(f"excess latency must be >= 0, got {delta_t_ns}")
    return SPEED_OF_LIGHT * delta_t_ns / NS_PER_S


def _interval_region(geom: VerifierGeometry, r1: float, r2: float) -> PositionRegion:
    (x1,), (x2,) = geom.v1, geom.v2
    lower = max(x1 - r1, x2 - r2)
    upper = min(x1 + r1, x2 + r2)
    return PositionRegion(
        kind=RegionKind.INTERVAL,
        diameter=upper - lower,
        bounds=(lower, upper),
        centers=(geom.v1, geom.v2),
        radii=(r1, r2),
    )


def _lens_region(geom: VerifierGeometry, r1: float, r2: float) -> PositionRegion:
    p1 = np.asarray(geom.v1)
    p2 = np.asarray(geom.v2)
    d = geom.separation
    centers = (geom.v1, geom.v2)

    if d <= abs(r1 - r2):
        r = min(r1, r2)
        return PositionRegion(
            kind=RegionKind.LENS,
            diameter=2 * r,
            area=math.pi * r * r,
            centers=centers,
            radii=(r1, r2),
        )

    a1 = (d * d + r1 * r1 - r2 * r2) / (2 * d)
    a2 = d - a1
    h = math.sqrt(max(0.0, r1 * r1 - a1 * a1))
    axis = (p2 - p1) / d
    normal = np.array([-axis[1], axis[0]])
    foot = p1 + a1 * axis
    points = tuple(tuple(float(x) for x in foot + s * h * normal) for s in (1.0, -1.0))

    # Past a center, the smaller disk's full diameter lies inside the lens
    diameter = 2 * min(r1, r2) if a1 <= 0 or a2 <= 0 else 2 * h
    area = (
        r1 * r1 * math.acos(min(1.0, max(-1.0, a1 / r1)))
        + r2 * r2 * math.acos(min(1.0, max(-1.0, a2 / r2)))
        - d * h
    )
    return PositionRegion(
        kind=RegionKind.LENS,
        diameter=diameter,
        points=points,
        area=max(area, 0.0),
        centers=centers,
        radii=(r1, r2),
    )


def position_region(geom: VerifierGeometry, r1: float, r2: float) -> PositionRegion:
    """
    Intersect the balls of radius ``r1`` around V1 and ``r2`` around V2.

    Returns an interval on a line, a lens in the plane, or an empty region when
    ``r1 + r2`` is shorter than the verifier separation.
    """
    for name, r in (("r1", r1), ("r2", r2)):
        if not math.isfinite(r) or r < 0:
            raise DomainError(f"{name} must be a finite radius >= 0, got {r}")

    if r1 + r2 < geom.separation:
        logger.warning(
            "radii %.3f m + %.3f m do not reach across %.3f m: empty region",
            r1,
            r2,
            geom.separation,
        )
        return PositionRegion(
            kind=RegionKind.EMPTY, centers=(geom.v1, geom.v2), radii=(r1, r2)
        )
    if geom.dimension == 1:
        return _interval_region(geom, r1, r2)
    return _lens_region(geom, r1, r2)


def locate(geom: VerifierGeometry, timing: TimingRecord) -> PositionRegion:
    """Position region implied by both verifiers' round-trip times."""
    r1 = radius_from_times(timing.t1_send, timing.t1_recv)
    r2 = radius_from_times(timing.t2_send, timing.t2_recv)
    logger.debug("radii from timing: r1=%.6f m r2=%.6f m", r1, r2)
    return position_region(geom, r1, r2)


def region_contains(
    region: PositionRegion, point: Coordinate, tol: float = CONTAINMENT_TOL
) -> bool:
    """Whether a claimed position lies inside the region (within ``tol`` meters)."""
    if region.is_empty:
        return False
    target = np.asarray(_point(point, "point"))
    if len(region.centers[0]) != target.size:
        raise DomainError(
            f"point has dimension {target.size}, region has {len(region.centers[0])}"
        )
    return all(
        float(np.linalg.norm(target - np.asarray(center))) <= radius + tol
        for center, radius in zip(region.centers, region.radii)
    )


def latency_budget(budget: LatencyBudget) -> Tuple[float, List[Tuple[str, float]]]:
    """
    Sum the prover's delay components.

    Returns:
        Total in nanoseconds and the components sorted from largest to smallest
    """
    components = budget.components()
    breakdown = sorted(components.items(), key=lambda item: item[1], reverse=True)
    return math.fsum(components.values()), breakdown


def serial_link_delay(n: int, bit_period_ns: float, parallel: bool = False) -> float:
    """
    Extra delay for shipping an ``n/2``-bit string over one serial link.

    The first bit starts the evaluation, so ``n/2 - 1`` further bit periods
    are spent waiting. Wavelength-multiplexed links carry all bits at once.
    """
    if int(n) != n or n < 2 or n % 2:
        raise DomainError(f"n must be an even integer >= 2, got {n}")
    if not bit_period_ns >= 0:
        raise DomainError(f"bit period must be >= 0, got {bit_period_ns}")
    if parallel:
        return 0.0
    return (n // 2 - 1) * float(bit_period_ns)
