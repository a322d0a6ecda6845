"""Regions, locations, distances, and point-process sampling.

Locations are stored in polar form (radius, angle) with the origin at the
region center; cartesian views are derived on demand. All distances are in
meters and all areas in square meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

__all__ = [
    "Location",
    "Disk",
    "Polygon",
    "AreaRegion",
    "NetworkLayout",
    "area_of",
    "distance",
    "contains",
    "sample_uniform",
    "sample_uniform_xy",
    "sample_hppp",
    "region_to_dict",
    "region_from_dict",
]

_TWO_PI = 2.0 * math.pi


def _normalize_angle(a: float) -> float:
    # IEEE remainder lands in [-pi, pi]
    r = math.remainder(a, _TWO_PI)
    return r


@dataclass(frozen=True)
class Location:
    """A point in polar coordinates about the region center."""

    radius: float
    angle: float

    def __post_init__(self) -> None:
        if not self.radius >= 0.0:
            raise ValueError(f"radius must be >= 0, got {self.radius}")
        object.__setattr__(self, "angle", _normalize_angle(self.angle))

    @property
    def x(self) -> float:
        return self.radius * math.cos(self.angle)

    @property
    def y(self) -> float:
        return self.radius * math.sin(self.angle)

    @staticmethod
    def from_xy(x: float, y: float) -> "Location":
        return Location(math.hypot(x, y), math.atan2(y, x))


def distance(a: Location, b: Location) -> float:
    """Euclidean distance via the polar law of cosines."""
    d2 = (
        a.radius * a.radius
        + b.radius * b.radius
        - 2.0 * a.radius * b.radius * math.cos(a.angle - b.angle)
    )
    return math.sqrt(max(d2, 0.0))


@dataclass(frozen=True)
class Disk:
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0.0:
            raise ValueError("disk radius must be > 0")


@dataclass(frozen=True)
class Polygon:
    """A simple polygon given by cartesian vertices (meters)."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if _polygon_area_signed(verts) == 0.0:
            raise ValueError("polygon area must be > 0")
        if _self_intersects(verts):
            raise ValueError("polygon must be simple (non-self-intersecting)")

    @property
    def vertex_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)


AreaRegion = Union[Disk, Polygon]


def _polygon_area_signed(verts: Sequence[tuple[float, float]]) -> float:
    s = 0.0
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def _segments_cross(p, q, r, s) -> bool:
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if v > 0:
            return 1
        if v < 0:
            return -1
        return 0

    o1, o2 = orient(p, q, r), orient(p, q, s)
    o3, o4 = orient(r, s, p), orient(r, s, q)
    return o1 != o2 and o3 != o4


def _self_intersects(verts: Sequence[tuple[float, float]]) -> bool:
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        for j in range(i + 1, n):
            # skip adjacent edges (share a vertex)
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            c, d = verts[j], verts[(j + 1) % n]
            if _segments_cross(a, b, c, d):
                return True
    return False


def area_of(region: AreaRegion) -> float:
    """Lebesgue measure of the region in square meters."""
    if isinstance(region, Disk):
        return math.pi * region.radius * region.radius
    return abs(_polygon_area_signed(region.vertices))


def _polygon_bounds(region: Polygon) -> tuple[float, float, float, float]:
    v = region.vertex_array
    return v[:, 0].min(), v[:, 0].max(), v[:, 1].min(), v[:, 1].max()


def contains_xy(region: AreaRegion, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized point-in-region test (boundary counts as inside)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if isinstance(region, Disk):
        return x * x + y * y <= region.radius * region.radius * (1.0 + 1e-12)
    verts = region.vertex_array
    inside = np.zeros(x.shape, dtype=bool)
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        crosses = (y0 > y) != (y1 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x0 + (y - y0) / (y1 - y0) * (x1 - x0)
        inside ^= crosses & (x < xint)
    return inside


def contains(region: AreaRegion, loc: Location) -> bool:
    return bool(contains_xy(region, np.array([loc.x]), np.array([loc.y]))[0])


def sample_uniform_xy(region: AreaRegion, count: int, rng: np.random.Generator) -> np.ndarray:
    """Sample i.i.d. uniform cartesian points; returns an (n, 2) array."""
    if count < 0:
        raise ValueError("count must be >= 0")
    if count == 0:
        return np.empty((0, 2))
    if isinstance(region, Disk):
        r = region.radius * np.sqrt(rng.random(count))
        theta = rng.uniform(-math.pi, math.pi, count)
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    # rejection from the bounding box
    xmin, xmax, ymin, ymax = _polygon_bounds(region)
    out = np.empty((count, 2))
    filled = 0
    while filled < count:
        need = count - filled
        # oversample by the box/area ratio to keep the loop short
        batch = max(16, int(need * (xmax - xmin) * (ymax - ymin) / area_of(region) * 1.2))
        xs = rng.uniform(xmin, xmax, batch)
        ys = rng.uniform(ymin, ymax, batch)
        ok = contains_xy(region, xs, ys)
        take = min(need, int(ok.sum()))
        out[filled : filled + take, 0] = xs[ok][:take]
        out[filled : filled + take, 1] = ys[ok][:take]
        filled += take
    return out


def sample_uniform(region: AreaRegion, count: int, rng: np.random.Generator) -> list[Location]:
    xy = sample_uniform_xy(region, count, rng)
    return [Location.from_xy(x, y) for x, y in xy]


def sample_hppp(density: float, region: AreaRegion, rng: np.random.Generator) -> list[Location]:
    """Sample a homogeneous Poisson point process over the region."""
    if density < 0:
        raise ValueError("density must be >= 0")
    count = int(rng.poisson(density * area_of(region)))
    return sample_uniform(region, count, rng)


def sample_hppp_xy(density: float, region: AreaRegion, rng: np.random.Generator) -> np.ndarray:
    if density < 0:
        raise ValueError("density must be >= 0")
    count = int(rng.poisson(density * area_of(region)))
    return sample_uniform_xy(region, count, rng)


def triangulate(region: Polygon) -> list[np.ndarray]:
    """Ear-clipping triangulation; returns (3, 2) vertex arrays."""
    verts = list(region.vertices)
    if _polygon_area_signed(verts) < 0:
        verts = verts[::-1]
    tris: list[np.ndarray] = []

    def is_ear(i: int) -> bool:
        n = len(verts)
        a, b, c = verts[i - 1], verts[i], verts[(i + 1) % n]
        cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if cross <= 0:
            return False
        for j, p in enumerate(verts):
            if j in ((i - 1) % n, i, (i + 1) % n):
                continue
            if _point_in_triangle(p, a, b, c):
                return False
        return True

    guard = 0
    while len(verts) > 3:
        guard += 1
        if guard > 10000:
            raise ValueError("triangulation failed; polygon may be degenerate")
        n = len(verts)
        for i in range(n):
            if is_ear(i):
                a, b, c = verts[i - 1], verts[i], verts[(i + 1) % n]
                tris.append(np.array([a, b, c]))
                del verts[i]
                break
        else:
            raise ValueError("triangulation failed; polygon may be degenerate")
    tris.append(np.array(verts))
    return tris


def _point_in_triangle(p, a, b, c) -> bool:
    def sgn(p1, p2, p3):
        return (p1[0] - p3[0]) * (p2[1] - p3[1]) - (p2[0] - p3[0]) * (p1[1] - p3[1])

    d1, d2, d3 = sgn(p, a, b), sgn(p, b, c), sgn(p, c, a)
    has_neg = d1 < 0 or d2 < 0 or d3 < 0
    has_pos = d1 > 0 or d2 > 0 or d3 > 0
    return not (has_neg and has_pos)


@dataclass(frozen=True)
class NetworkLayout:
    """Installed, candidate, and temporary base-station locations in a region."""

    installed: tuple[Location, ...]
    candidates: tuple[Location, ...]
    temporary: tuple[Location, ...]
    region: AreaRegion

    def __post_init__(self) -> None:
        object.__setattr__(self, "installed", tuple(self.installed))
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "temporary", tuple(self.temporary))
        for loc in (*self.installed, *self.candidates, *self.temporary):
            if not contains(self.region, loc):
                raise ValueError(f"location {loc} lies outside the region")
        taken = {(loc.x, loc.y) for loc in self.installed}
        if any((loc.x, loc.y) in taken for loc in self.candidates):
            raise ValueError("installed and candidate positions must be disjoint")

    @property
    def num_installed(self) -> int:
        return len(self.installed)

    @property
    def num_candidates(self) -> int:
        return len(self.candidates)

    @property
    def num_temporary(self) -> int:
        return len(self.temporary)

    def all_locations(self) -> tuple[Location, ...]:
        """Installed then candidates then temporary; index = location id."""
        return (*self.installed, *self.candidates, *self.temporary)

    def locations_xy(self) -> np.ndarray:
        locs = self.all_locations()
        return np.array([[p.x, p.y] for p in locs]) if locs else np.empty((0, 2))


def region_to_dict(region: AreaRegion) -> dict:
    if isinstance(region, Disk):
        return {"shape": "disk", "radius_m": region.radius}
    return {"shape": "polygon", "vertices_m": [list(v) for v in region.vertices]}


def region_from_dict(d: dict) -> AreaRegion:
    shape = d.get("shape")
    if shape == "disk":
        return Disk(float(d["radius_m"]))
    if shape == "polygon":
        return Polygon(tuple((float(x), float(y)) for x, y in d["vertices_m"]))
    raise ValueError(f"unknown region shape: {shape!r}")
