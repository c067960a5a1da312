"""Domains, boundary parametrizations and point-set generators.

Everything here is a pure function of its inputs.  Point sets are stored as
read-only ``(n, 2)`` float arrays; one-dimensional node sets on ``[-1, 1]``
are embedded on the segment ``y = 0`` so that the same evaluation machinery
serves both the 1D polynomial laboratory and the 2D solvers.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import GenerationFailure, InvalidArgument

ON_BOUNDARY_TOL = 1e-12
DUPLICATE_TOL = 1e-12


class Tag(str, enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    FICTITIOUS = "fictitious"


class Family(str, enum.Enum):
    EQUIDISTANT = "equidistant"
    CHEBYSHEV = "chebyshev"


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidArgument(f"non-finite point ({self.x}, {self.y})")


# --------------------------------------------------------------------------
# Domains


class Domain:
    """A bounded planar region with an arc-proportional boundary map."""

    kind: str

    def boundary(self, t) -> np.ndarray:
        raise NotImplementedError

    def contains(self, pts) -> np.ndarray:
        """Membership in the open domain."""
        raise NotImplementedError

    def boundary_distance(self, pts) -> np.ndarray:
        raise NotImplementedError

    @property
    def centroid(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        raise NotImplementedError

    @property
    def circumradius(self) -> float:
        """Largest distance from the centroid to the boundary."""
        raise NotImplementedError

    def outside_closure(self, pts) -> np.ndarray:
        pts = as_coords(pts)
        return ~self.contains(pts) & (self.boundary_distance(pts) > ON_BOUNDARY_TOL)

    def to_config(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_config(cfg: dict) -> "Domain":
        kind = cfg.get("kind")
        if kind == "unit_disk":
            return UnitDisk()
        if kind == "rectangle":
            return Rectangle(*map(float, cfg["bounds"]))
        raise InvalidArgument(f"unknown domain kind {kind!r}")


@dataclass(frozen=True)
class UnitDisk(Domain):
    kind: str = field(default="unit_disk", init=False)

    def boundary(self, t):
        t = 2 * np.pi * np.atleast_1d(np.asarray(t, dtype=float))
        return np.column_stack([np.cos(t), np.sin(t)])

    def contains(self, pts):
        p = as_coords(pts)
        return np.hypot(p[:, 0], p[:, 1]) < 1.0

    def boundary_distance(self, pts):
        p = as_coords(pts)
        return np.abs(np.hypot(p[:, 0], p[:, 1]) - 1.0)

    @property
    def centroid(self):
        return np.zeros(2)

    @property
    def bbox(self):
        return (-1.0, -1.0, 1.0, 1.0)

    @property
    def circumradius(self):
        return 1.0

    def to_config(self):
        return {"kind": "unit_disk"}


@dataclass(frozen=True)
class Rectangle(Domain):
    ax: float
    ay: float
    bx: float
    by: float
    kind: str = field(default="rectangle", init=False)

    def __post_init__(self):
        vals = (self.ax, self.ay, self.bx, self.by)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidArgument("rectangle bounds must be finite")
        if not (self.ax < self.bx and self.ay < self.by):
            raise InvalidArgument(f"degenerate rectangle {vals}")

    def boundary(self, t):
        # counterclockwise from (ax, ay), proportional to arc length
        w, h = self.bx - self.ax, self.by - self.ay
        s = (np.atleast_1d(np.asarray(t, dtype=float)) % 1.0) * 2 * (w + h)
        out = np.empty(s.shape + (2,))
        e1, e2, e3 = w, w + h, 2 * w + h
        m = s < e1
        out[m] = np.column_stack([self.ax + s[m], np.full(m.sum(), self.ay)])
        m = (s >= e1) & (s < e2)
        out[m] = np.column_stack([np.full(m.sum(), self.bx), self.ay + s[m] - e1])
        m = (s >= e2) & (s < e3)
        out[m] = np.column_stack([self.bx - (s[m] - e2), np.full(m.sum(), self.by)])
        m = s >= e3
        out[m] = np.column_stack([np.full(m.sum(), self.ax), self.by - (s[m] - e3)])
        return out

    def contains(self, pts):
        p = as_coords(pts)
        return (
            (p[:, 0] > self.ax) & (p[:, 0] < self.bx)
            & (p[:, 1] > self.ay) & (p[:, 1] < self.by)
        )

    def boundary_distance(self, pts):
        p = as_coords(pts)
        dx = np.maximum(self.ax - p[:, 0], p[:, 0] - self.bx)
        dy = np.maximum(self.ay - p[:, 1], p[:, 1] - self.by)
        outside = np.hypot(np.maximum(dx, 0), np.maximum(dy, 0))
        inside = -np.maximum(dx, dy)
        return np.where((dx > 0) | (dy > 0), outside, inside)

    @property
    def centroid(self):
        return np.array([(self.ax + self.bx) / 2, (self.ay + self.by) / 2])

    @property
    def bbox(self):
        return (self.ax, self.ay, self.bx, self.by)

    @property
    def circumradius(self):
        return 0.5 * math.hypot(self.bx - self.ax, self.by - self.ay)

    def to_config(self):
        return {"kind": "rectangle", "bounds": [self.ax, self.ay, self.bx, self.by]}


# --------------------------------------------------------------------------
# Point sets


def as_coords(pts) -> np.ndarray:
    """Return ``pts`` as an ``(n, 2)`` float array.

    Accepts a :class:`PointSet`, an ``(n, 2)`` array, or a 1D array of
    abscissae which is embedded on ``y = 0``.
    """
    if isinstance(pts, PointSet):
        return pts.points
    a = np.asarray(pts, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1)
    if a.ndim == 1:
        return np.column_stack([a, np.zeros_like(a)])
    if a.ndim == 2 and a.shape[1] == 2:
        return a
    raise InvalidArgument(f"cannot interpret array of shape {a.shape} as points")


@dataclass(frozen=True, eq=False)
class PointSet:
    """Ordered, duplicate-free set of planar points with a role tag.

    When ``domain`` is given, every point is checked against the tag:
    interior points lie in the open domain, boundary points on the boundary
    (to 1e-12), fictitious points outside the closed domain.
    """

    points: np.ndarray
    tag: Tag
    family: str = "custom"
    domain: Domain | None = None

    def __post_init__(self):
        p = np.array(as_coords(self.points), dtype=float)
        if not np.all(np.isfinite(p)):
            raise InvalidArgument("point set contains non-finite coordinates")
        if len(p) > 1 and cKDTree(p).query_pairs(DUPLICATE_TOL):
            raise InvalidArgument("point set contains duplicate points")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "tag", Tag(self.tag))
        if self.domain is not None:
            self._check_tag(self.domain)

    def _check_tag(self, domain):
        p = self.points
        if self.tag is Tag.INTERIOR:
            ok = domain.contains(p) & (domain.boundary_distance(p) > ON_BOUNDARY_TOL)
        elif self.tag is Tag.BOUNDARY:
            ok = domain.boundary_distance(p) <= ON_BOUNDARY_TOL
        else:
            ok = domain.outside_closure(p)
        if not np.all(ok):
            bad = int(np.flatnonzero(~ok)[0])
            raise InvalidArgument(
                f"point {p[bad]} violates tag {self.tag.value!r}"
            )

    def __len__(self):
        return len(self.points)

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]

    def union(self, other: "PointSet") -> "PointSet":
        """Points of ``self`` followed by the points of ``other`` not already present."""
        other_pts = as_coords(other)
        if len(self.points):
            d, _ = cKDTree(self.points).query(other_pts)
            other_pts = other_pts[d > DUPLICATE_TOL]
        return PointSet(
            np.vstack([self.points, other_pts]), self.tag,
            family=f"{self.family}+{getattr(other, 'family', 'custom')}",
            domain=self.domain,
        )

    @classmethod
    def segment(cls, xs, family="custom") -> "PointSet":
        """Embed abscissae in [-1, 1] on the segment ``y = 0``."""
        return cls(as_coords(np.asarray(xs, dtype=float)), Tag.INTERIOR, family=family)


# --------------------------------------------------------------------------
# Node generators


def _check_count(n):
    if int(n) != n or n < 1:
        raise InvalidArgument(f"point count must be a positive integer, got {n}")
    return int(n)


def equidistant_nodes(n: int) -> np.ndarray:
    n = _check_count(n)
    if n == 1:
        return np.zeros(1)
    return -1.0 + 2.0 * np.arange(n) / (n - 1)


def chebyshev_nodes(n: int) -> np.ndarray:
    """Chebyshev-Gauss points (roots of T_n), ascending."""
    n = _check_count(n)
    k = np.arange(n)
    # sin form keeps exact antisymmetry: cos((2k+1)pi/2n) = -sin((2k+1-n)pi/2n)
    return np.sin(np.pi * (2 * k + 1 - n) / (2 * n))


def boundary_points(domain: Domain, n: int, family="equidistant") -> PointSet:
    n = _check_count(n)
    family = Family(family)
    if family is Family.EQUIDISTANT:
        t = np.arange(n) / n
    else:
        t = (chebyshev_nodes(n) + 1.0) / 2.0
    return PointSet(domain.boundary(t), Tag.BOUNDARY, family=family.value, domain=domain)


def _grid(domain: Domain, m: int) -> np.ndarray:
    ax, ay, bx, by = domain.bbox
    gx = np.linspace(ax, bx, m + 2)[1:-1]
    gy = np.linspace(ay, by, m + 2)[1:-1]
    X, Y = np.meshgrid(gx, gy)
    p = np.column_stack([X.ravel(), Y.ravel()])
    keep = domain.contains(p) & (domain.boundary_distance(p) > ON_BOUNDARY_TOL)
    return p[keep]


def interior_points(domain: Domain, target: int, max_side: int = 4096) -> PointSet:
    """Smallest ``m x m`` grid (bounding box, endpoints excluded) with at least
    ``target`` points inside the open domain."""
    target = _check_count(target)
    m = max(1, math.isqrt(target))
    while m <= max_side:
        p = _grid(domain, m)
        if len(p) >= target:
            return PointSet(p, Tag.INTERIOR, family=f"grid{m}", domain=domain)
        m += 1
    raise GenerationFailure(f"could not place {target} interior points")


def fictitious_boundary(domain: Domain, factor: float, n: int) -> PointSet:
    if not factor > 1:
        raise InvalidArgument(f"dilation factor must exceed 1, got {factor}")
    n = _check_count(n)
    radius = factor * domain.circumradius
    t = 2 * np.pi * np.arange(n) / n
    pts = domain.centroid + radius * np.column_stack([np.cos(t), np.sin(t)])
    return PointSet(pts, Tag.FICTITIOUS, family=f"circle{factor:g}", domain=domain)


def fill_distance(points, reference) -> float:
    p, r = as_coords(points), as_coords(reference)
    if len(p) == 0 or len(r) == 0:
        raise InvalidArgument("fill distance needs nonempty point sets")
    d, _ = cKDTree(p).query(r)
    return float(d.max())
