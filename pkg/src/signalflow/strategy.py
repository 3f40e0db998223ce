"""Markov stationary strategy profiles as finite region lists.

A profile partitions the extended real line into typed regions.  Both
types' efforts are constant inside a region except in a switched region,
where the bad type's effort is stored as a sampled table and interpolated
linearly.  The canonical shape used throughout the package is

    pooling (-inf, l_under] | switched (l_under, l0] | pooling (l0, l1)
    | scrutiny [l1, l_over) | pooling [l_over, +inf)

with a left-open/right-closed switched region and a closed-left scrutiny
region.  ``l_over`` may be ``+inf``, in which case the scrutiny region is
topmost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .model import INF, ModelParams, drift


class RegionKind(Enum):
    POOL_ZERO = "pool_zero"
    SCRUTINY = "scrutiny"
    SWITCHED = "switched"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Region:
    """One typed interval of the strategy profile.

    Effort conventions by kind: pooling plays (0, 0), scrutiny plays
    (1, 0), custom plays the stored constant pair, and a switched region
    plays (0, e_bad(l)) with e_bad interpolated from ``table_l``/``table_e``.
    """

    lower: float
    upper: float
    kind: RegionKind
    closed_left: bool = True
    closed_right: bool = False
    e_good: float = 0.0
    e_bad: float = 0.0
    table_l: np.ndarray | None = None
    table_e: np.ndarray | None = None

    def contains(self, l: float) -> bool:
        if l < self.lower or l > self.upper:
            return False
        if l == self.lower:
            return self.closed_left
        if l == self.upper:
            return self.closed_right
        return True

    def efforts(self, l: float) -> tuple[float, float]:
        if self.kind is RegionKind.POOL_ZERO:
            return (0.0, 0.0)
        if self.kind is RegionKind.SCRUTINY:
            return (1.0, 0.0)
        if self.kind is RegionKind.CUSTOM:
            return (self.e_good, self.e_bad)
        return (0.0, float(np.interp(l, self.table_l, self.table_e)))


@dataclass(frozen=True)
class StrategyProfile:
    """Ordered, non-overlapping region cover of the extended real line."""

    regions: tuple[Region, ...]
    l_under: float | None = None
    l0: float | None = None
    l1: float | None = None
    l_over: float | None = None

    def region_at(self, l: float) -> Region:
        for region in self.regions:
            if region.contains(l):
                return region
        raise RuntimeError(f"profile does not cover l={l!r}; run validate_profile")

    def efforts(self, l: float) -> tuple[float, float]:
        return effort_at(self, l)

    def switched_region(self) -> Region | None:
        for region in self.regions:
            if region.kind is RegionKind.SWITCHED:
                return region
        return None

    def scrutiny_region(self) -> Region | None:
        for region in self.regions:
            if region.kind is RegionKind.SCRUTINY:
                return region
        return None


def effort_at(profile: StrategyProfile, l: float) -> tuple[float, float]:
    """Effort pair (e_good, e_bad) the profile prescribes at ``l``.

    At l = +/-inf belief is frozen and signalling is pointless, so the
    unique best response (0, 0) is returned regardless of the region cover.
    """
    if l == INF or l == -INF:
        return (0.0, 0.0)
    return profile.region_at(l).efforts(l)


def validate_profile(profile: StrategyProfile) -> list[str]:
    """Check the region cover and effort invariants; violations come back as data."""
    problems: list[str] = []
    regions = profile.regions
    if not regions:
        return ["profile has no regions"]
    if regions[0].lower != -INF:
        problems.append("first region must start at -inf")
    if regions[-1].upper != INF:
        problems.append("last region must end at +inf")
    for i, region in enumerate(regions):
        if not region.lower < region.upper:
            problems.append(f"region {i} is empty or reversed: [{region.lower}, {region.upper}]")
        if region.kind is RegionKind.CUSTOM:
            for e in (region.e_good, region.e_bad):
                if not 0.0 <= e <= 1.0:
                    problems.append(f"region {i} effort {e} outside [0, 1]")
        if region.kind is RegionKind.SWITCHED:
            if region.table_l is None or region.table_e is None:
                problems.append(f"switched region {i} is missing its effort table")
            else:
                tl = np.asarray(region.table_l, dtype=float)
                te = np.asarray(region.table_e, dtype=float)
                if tl.shape != te.shape or tl.size < 2:
                    problems.append(f"switched region {i} table is malformed")
                else:
                    if np.any(np.diff(tl) <= 0):
                        problems.append(f"switched region {i} table grid is not strictly increasing")
                    if tl[0] > region.lower or tl[-1] < region.upper:
                        problems.append(f"switched region {i} table does not span the region")
                    if np.any(te <= 0.0) or np.any(te > 1.0):
                        problems.append(
                            f"switched region {i} effort must be strictly positive and <= 1"
                        )
    for i, (left, right) in enumerate(zip(regions, regions[1:])):
        if left.upper != right.lower:
            if left.upper < right.lower:
                problems.append(f"gap between regions {i} and {i + 1}")
            else:
                problems.append(f"overlap between regions {i} and {i + 1}")
            continue
        if left.closed_right == right.closed_left:
            owner = "both regions" if left.closed_right else "neither region"
            problems.append(f"boundary {left.upper} between regions {i} and {i + 1} owned by {owner}")
    for name in ("l_under", "l0", "l1", "l_over"):
        value = getattr(profile, name)
        if value is None or not math.isfinite(value):
            continue
        if not any(value in (r.lower, r.upper) for r in regions):
            problems.append(f"threshold {name}={value} is not a region boundary")
    return problems


def stasis_points(profile: StrategyProfile, params: ModelParams) -> list[tuple[float, float]]:
    """Boundary points the deterministic belief flow cannot leave.

    A boundary qualifies when the drift points (weakly) up from immediately
    below and strictly down from immediately above, so arriving flow is
    absorbed.  The occupancy weight w is the long-run fraction of time
    spent infinitesimally on the lower side,
    ``w = (d_good - d_bad + lam * e_bad_plus) / (lam * e_bad_plus)``,
    with ``e_bad_plus`` the right limit of the bad type's effort.
    """
    out: list[tuple[float, float]] = []
    for left, right in zip(profile.regions, profile.regions[1:]):
        b = left.upper
        if not math.isfinite(b):
            continue
        eg_lo, eb_lo = left.efforts(b)
        eg_hi, eb_hi = right.efforts(b)
        d_lo = drift(eg_lo, eb_lo, params)
        d_hi = drift(eg_hi, eb_hi, params)
        if d_hi < 0.0 <= d_lo:
            if eb_hi > 0.0:
                w = (params.d_good - params.d_bad + params.lam * eb_hi) / (params.lam * eb_hi)
            else:
                w = 1.0
            out.append((b, w))
    return out


def pooling_profile() -> StrategyProfile:
    """Zero effort by both types everywhere; the belief is frozen forever."""
    region = Region(-INF, INF, RegionKind.POOL_ZERO, closed_left=True, closed_right=True)
    return StrategyProfile(regions=(region,))


def extremal_profile(l1: float, l_over: float) -> StrategyProfile:
    """Scrutiny on [l1, l_over), pooling elsewhere."""
    if not l1 < l_over:
        raise ValueError("need l1 < l_over")
    regions = [Region(-INF, l1, RegionKind.POOL_ZERO, closed_left=True, closed_right=False)]
    if l_over == INF:
        regions.append(Region(l1, INF, RegionKind.SCRUTINY, closed_left=True, closed_right=True))
    else:
        regions.append(Region(l1, l_over, RegionKind.SCRUTINY, closed_left=True, closed_right=False))
        regions.append(Region(l_over, INF, RegionKind.POOL_ZERO, closed_left=True, closed_right=True))
    return StrategyProfile(regions=tuple(regions), l1=l1, l_over=l_over)


def switched_profile(
    l_under: float,
    l0: float,
    l1: float,
    l_over: float,
    table_l: np.ndarray,
    table_e: np.ndarray,
) -> StrategyProfile:
    """Canonical switched-effort shape with a sampled bad-type effort table.

    The table must span [l_under, l0]; its value at l_under is the right
    limit of the effort (the point l_under itself belongs to the pooling
    region below).
    """
    if not (l_under < l0 <= l1 < l_over):
        raise ValueError("need l_under < l0 <= l1 < l_over")
    table_l = np.asarray(table_l, dtype=float)
    table_e = np.asarray(table_e, dtype=float)
    regions = [
        Region(-INF, l_under, RegionKind.POOL_ZERO, closed_left=True, closed_right=True),
        Region(
            l_under,
            l0,
            RegionKind.SWITCHED,
            closed_left=False,
            closed_right=True,
            table_l=table_l,
            table_e=table_e,
        ),
    ]
    if l0 < l1:
        regions.append(Region(l0, l1, RegionKind.POOL_ZERO, closed_left=False, closed_right=False))
        scrutiny_closed_left = True
    else:
        # Degenerate gap: the switched region owns l0 == l1, scrutiny is open-left.
        scrutiny_closed_left = False
    if l_over == INF:
        regions.append(
            Region(l1, INF, RegionKind.SCRUTINY, closed_left=scrutiny_closed_left, closed_right=True)
        )
    else:
        regions.append(
            Region(l1, l_over, RegionKind.SCRUTINY, closed_left=scrutiny_closed_left, closed_right=False)
        )
        regions.append(Region(l_over, INF, RegionKind.POOL_ZERO, closed_left=True, closed_right=True))
    return StrategyProfile(
        regions=tuple(regions), l_under=l_under, l0=l0, l1=l1, l_over=l_over
    )
