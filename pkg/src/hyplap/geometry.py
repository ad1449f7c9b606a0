"""Poincare-ball model of hyperbolic space.

Points live in the open unit ball of R^n (n >= 2) carrying the
constant-curvature -1 metric.  This module provides distances, Busemann
coordinates and the families of (mostly unbounded) domains the solvers
operate on: geodesic balls and their exteriors, horoballs and their
exteriors, horoannuli, and hyperballs bounded by hypersurfaces
equidistant from a totally geodesic hyperplane through the origin.

Sign conventions:
  * Busemann depth is positive inside a horoball (deeper toward the
    ideal tangency point) and negative outside.
  * The signed distance to a diameter hyperplane is positive on the side
    of its unit normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ArgumentError, DomainError

__all__ = [
    "Point",
    "IdealPoint",
    "GeodesicBall",
    "ExteriorBall",
    "Horoball",
    "ExteriorHoroball",
    "Horoannulus",
    "Hyperball",
    "DomainSpec",
    "dist",
    "busemann_depth",
    "dist_to_boundary",
    "contains",
    "ray_point",
    "horosphere_point",
    "ball_dist_arr",
    "busemann_arr",
    "plane_signed_dist_arr",
]


def _coerce_vec(v, name="vector"):
    arr = np.array(v, dtype=float, copy=True).reshape(-1)
    if arr.size < 2:
        raise ArgumentError(f"{name} must have dimension >= 2")
    if not np.all(np.isfinite(arr)):
        raise ArgumentError(f"{name} must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Point:
    """A point of H^n in unit-ball coordinates (Euclidean norm < 1)."""

    coords: np.ndarray

    def __post_init__(self):
        arr = _coerce_vec(self.coords, "coords")
        if float(np.linalg.norm(arr)) >= 1.0:
            raise ArgumentError("point must lie strictly inside the unit ball")
        object.__setattr__(self, "coords", arr)

    @property
    def dim(self) -> int:
        return self.coords.size


@dataclass(frozen=True, eq=False)
class IdealPoint:
    """A point of the ideal boundary sphere (unit Euclidean norm)."""

    direction: np.ndarray

    def __post_init__(self):
        arr = _coerce_vec(self.direction, "direction")
        if abs(float(np.linalg.norm(arr)) - 1.0) > 1e-12:
            raise ArgumentError("ideal point direction must be a unit vector")
        object.__setattr__(self, "direction", arr)

    @property
    def dim(self) -> int:
        return self.direction.size


@dataclass(frozen=True, eq=False)
class GeodesicBall:
    center: Point
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ArgumentError("ball radius must be positive")


@dataclass(frozen=True, eq=False)
class ExteriorBall:
    center: Point
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ArgumentError("ball radius must be positive")


@dataclass(frozen=True, eq=False)
class Horoball:
    """Sublevel region of a Busemann function: depth > 0 inside."""

    xi: IdealPoint
    level: float = 0.0


@dataclass(frozen=True, eq=False)
class ExteriorHoroball:
    xi: IdealPoint
    level: float = 0.0


@dataclass(frozen=True, eq=False)
class Horoannulus:
    """Region between two parallel horospheres, depths in (a, b)."""

    xi: IdealPoint
    level: float
    a: float
    b: float

    def __post_init__(self):
        if not self.b - self.a > 0:
            raise ArgumentError("horoannulus requires b - a > 0")


@dataclass(frozen=True, eq=False)
class Hyperball:
    """Component of the complement of a hypersphere at distance `offset`
    from the totally geodesic diameter hyperplane with unit `normal`.

    The domain is {x : side * sdist(x) > -offset}, so it always contains
    the half-space on the chosen side; offset = 0 gives exactly that
    half-space, bounded by the totally geodesic hyperplane itself.
    """

    normal: np.ndarray
    offset: float = 0.0
    side: int = 1

    def __post_init__(self):
        arr = _coerce_vec(self.normal, "normal")
        if abs(float(np.linalg.norm(arr)) - 1.0) > 1e-12:
            raise ArgumentError("hyperball normal must be a unit vector")
        object.__setattr__(self, "normal", arr)
        if self.offset < 0:
            raise ArgumentError("hyperball offset must be >= 0")
        if self.side not in (1, -1):
            raise ArgumentError("hyperball side must be +1 or -1")


DomainSpec = Union[
    GeodesicBall, ExteriorBall, Horoball, ExteriorHoroball, Horoannulus, Hyperball
]


# ---------------------------------------------------------------------------
# array kernels (rows of X are ball-model coordinates)

def ball_dist_arr(X, y):
    """Hyperbolic distance from each row of X to the single point y."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    d2 = np.sum((X - y) ** 2, axis=1)
    denom = (1.0 - np.sum(X * X, axis=1)) * (1.0 - float(y @ y))
    arg = 1.0 + 2.0 * d2 / denom
    return np.arccosh(np.maximum(arg, 1.0))


def busemann_arr(X, xi):
    """Busemann value log((1-|x|^2)/|x-xi|^2); 0 on the horosphere through
    the origin, +inf toward xi."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    xi = np.asarray(xi, dtype=float)
    num = 1.0 - np.sum(X * X, axis=1)
    den = np.sum((X - xi) ** 2, axis=1)
    return np.log(num / den)


def plane_signed_dist_arr(X, normal):
    """Signed hyperbolic distance to the diameter hyperplane <x,normal>=0."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    normal = np.asarray(normal, dtype=float)
    return np.arcsinh(2.0 * (X @ normal) / (1.0 - np.sum(X * X, axis=1)))


# ---------------------------------------------------------------------------
# point-level operations

def dist(p: Point, q: Point) -> float:
    """Hyperbolic distance acosh(1 + 2|p-q|^2 / ((1-|p|^2)(1-|q|^2)))."""
    if p.dim != q.dim:
        raise ArgumentError(f"dimension mismatch: {p.dim} vs {q.dim}")
    return float(ball_dist_arr(p.coords[None, :], q.coords)[0])


def busemann_depth(p: Point, B) -> float:
    """Signed distance to the bounding horosphere of B: positive inside
    the horoball, negative outside; level sets are horospheres."""
    if not isinstance(B, (Horoball, ExteriorHoroball)):
        raise ArgumentError("busemann_depth expects a horoball-family domain")
    if p.dim != B.xi.dim:
        raise ArgumentError("dimension mismatch between point and horoball")
    return float(busemann_arr(p.coords[None, :], B.xi.direction)[0]) - B.level


def _depth(p: Point, xi: IdealPoint, level: float) -> float:
    return float(busemann_arr(p.coords[None, :], xi.direction)[0]) - level


def contains(D: DomainSpec, p: Point) -> bool:
    """Membership by the defining inequality of each domain variant."""
    if isinstance(D, GeodesicBall):
        return dist(p, D.center) < D.radius
    if isinstance(D, ExteriorBall):
        return dist(p, D.center) > D.radius
    if isinstance(D, Horoball):
        return _depth(p, D.xi, D.level) > 0.0
    if isinstance(D, ExteriorHoroball):
        return _depth(p, D.xi, D.level) < 0.0
    if isinstance(D, Horoannulus):
        d = _depth(p, D.xi, D.level)
        return D.a < d < D.b
    if isinstance(D, Hyperball):
        s = float(plane_signed_dist_arr(p.coords[None, :], D.normal)[0])
        return D.side * s > -D.offset
    raise ArgumentError(f"unknown domain variant {type(D).__name__}")


def dist_to_boundary(p: Point, D: DomainSpec) -> float:
    """Hyperbolic distance from an interior point to the boundary of D."""
    if not contains(D, p):
        raise DomainError("point lies outside the domain")
    if isinstance(D, GeodesicBall):
        return D.radius - dist(p, D.center)
    if isinstance(D, ExteriorBall):
        return dist(p, D.center) - D.radius
    if isinstance(D, Horoball):
        return _depth(p, D.xi, D.level)
    if isinstance(D, ExteriorHoroball):
        return -_depth(p, D.xi, D.level)
    if isinstance(D, Horoannulus):
        d = _depth(p, D.xi, D.level)
        return min(d - D.a, D.b - d)
    if isinstance(D, Hyperball):
        s = float(plane_signed_dist_arr(p.coords[None, :], D.normal)[0])
        return D.side * s + D.offset
    raise ArgumentError(f"unknown domain variant {type(D).__name__}")


# ---------------------------------------------------------------------------
# constructions

def ray_point(direction, t: float) -> Point:
    """Point at hyperbolic distance t from the origin along `direction`."""
    d = np.asarray(direction, dtype=float)
    n = float(np.linalg.norm(d))
    if n == 0:
        raise ArgumentError("direction must be nonzero")
    return Point(np.tanh(t / 2.0) * d / n)


def _unit_perp(xi: np.ndarray, k: int = 0) -> np.ndarray:
    """k-th deterministic unit vector orthogonal to xi."""
    n = xi.size
    basis = []
    for i in np.argsort(np.abs(xi)):
        e = np.zeros(n)
        e[i] = 1.0
        v = e - (e @ xi) * xi
        for b in basis:
            v -= (v @ b) * b
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
        if len(basis) > k:
            return basis[k]
    raise ArgumentError("could not build orthogonal direction")


def horosphere_point(B: Horoball, depth: float, angle: float,
                     perp_index: int = 0) -> Point:
    """Point on the horosphere of signed `depth` with respect to B.

    angle = 0 degenerates to the tangency ideal point; small angles give
    points close to it.  All horospheres of the family are Euclidean
    spheres tangent to the unit sphere at xi.
    """
    xi = B.xi.direction
    beta = B.level + depth
    t = math.tanh(beta / 2.0)
    center = 0.5 * (1.0 + t) * xi
    rho = 0.5 * (1.0 - t)
    if angle == 0.0:
        raise ArgumentError("angle 0 is the ideal tangency point, not in H^n")
    w = math.cos(angle) * xi + math.sin(angle) * _unit_perp(xi, perp_index)
    return Point(center + rho * w)
