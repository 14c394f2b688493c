"""Poincare disk geometry.

Points live in the open unit disk with the metric 4(dx^2 + dy^2)/(1 - x^2 - y^2)^2.
Internally everything is a Python ``complex`` (or a numpy complex array for the
vectorized helpers); :class:`DiskPoint` is the public, validated wrapper.

Isometries are stored as normalized SU(1,1) pairs ``(a, b)`` acting by
``z -> (a z + b) / (conj(b) z + conj(a))``, optionally preceded by complex
conjugation for orientation-reversing maps.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

BOUNDARY_GUARD = 1e-12
TAU_PT = 1e-9


class GeometryError(ValueError):
    pass


def _check_inside(z: complex) -> complex:
    if not (abs(z) < 1.0 - BOUNDARY_GUARD):
        raise GeometryError(f"point {z!r} is not inside the open unit disk")
    return z


@dataclass(frozen=True)
class DiskPoint:
    x: float
    y: float

    def __post_init__(self):
        _check_inside(complex(self.x, self.y))

    @classmethod
    def from_complex(cls, z: complex) -> "DiskPoint":
        return cls(float(z.real), float(z.imag))

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    def same_as(self, other: "DiskPoint", tol: float = TAU_PT) -> bool:
        return hyp_distance(self, other) < tol

    def __iter__(self):
        yield self.x
        yield self.y


def _as_complex(p) -> complex:
    if isinstance(p, DiskPoint):
        return p.z
    return complex(p)


# -- distances -------------------------------------------------------------

def dist_c(z: complex, w: complex) -> float:
    """Hyperbolic distance between two complex disk coordinates."""
    num = abs(z - w)
    if num == 0.0:
        return 0.0
    den = math.sqrt((1.0 - abs(z) ** 2) * (1.0 - abs(w) ** 2))
    return 2.0 * math.asinh(num / den)


def hyp_distance(p, q) -> float:
    return dist_c(_as_complex(p), _as_complex(q))


def dist_array(z, w):
    """Vectorized hyperbolic distance (broadcasts like numpy)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    den = np.sqrt((1.0 - np.abs(z) ** 2) * (1.0 - np.abs(w) ** 2))
    return 2.0 * np.arcsinh(np.abs(z - w) / den)


def radius_from_origin(d: float) -> float:
    """Euclidean radius of the point at hyperbolic distance ``d`` from 0."""
    return math.tanh(d / 2.0)


def to_klein(z):
    """Poincare -> Klein coordinates (geodesics become straight chords)."""
    z = np.asarray(z, dtype=complex)
    return 2.0 * z / (1.0 + np.abs(z) ** 2)


def from_klein(k):
    k = np.asarray(k, dtype=complex)
    return k / (1.0 + np.sqrt(np.maximum(0.0, 1.0 - np.abs(k) ** 2)))


def conformal_factor(z):
    """Length scale 2/(1-|z|^2) of the disk metric at z."""
    return 2.0 / (1.0 - np.abs(np.asarray(z)) ** 2)


# -- isometries ------------------------------------------------------------

@dataclass(frozen=True)
class HypIsometry:
    a: complex = 1.0 + 0j
    b: complex = 0j
    conj: bool = False

    def __post_init__(self):
        det = abs(self.a) ** 2 - abs(self.b) ** 2
        if det <= 0:
            raise GeometryError("isometry parameters must satisfy |a|^2 - |b|^2 > 0")
        s = math.sqrt(det)
        object.__setattr__(self, "a", complex(self.a) / s)
        object.__setattr__(self, "b", complex(self.b) / s)

    @classmethod
    def identity(cls) -> "HypIsometry":
        return cls()

    @classmethod
    def rotation(cls, angle: float) -> "HypIsometry":
        return cls(cmath.exp(0.5j * angle), 0j)

    @classmethod
    def to_origin(cls, p) -> "HypIsometry":
        """Hyperbolic translation sending ``p`` to 0 along the diameter through p."""
        z = _as_complex(p)
        return cls(1.0 + 0j, -z)

    @classmethod
    def conjugation(cls) -> "HypIsometry":
        return cls(1.0 + 0j, 0j, True)

    def apply(self, z):
        """Apply to a complex scalar or numpy complex array."""
        if self.conj:
            z = np.conj(z)
        a, b = self.a, self.b
        return (a * z + b) / (b.conjugate() * z + a.conjugate())

    def __call__(self, p):
        if isinstance(p, DiskPoint):
            return DiskPoint.from_complex(complex(self.apply(p.z)))
        return self.apply(p)

    def __matmul__(self, other: "HypIsometry") -> "HypIsometry":
        # (self o other)(z) = M_s . c_s(M_o . c_o(z)); conjugating M_o if self reverses orientation
        a2, b2 = (other.a.conjugate(), other.b.conjugate()) if self.conj else (other.a, other.b)
        a1, b1 = self.a, self.b
        return HypIsometry(a1 * a2 + b1 * b2.conjugate(), a1 * b2 + b1 * a2.conjugate(),
                           self.conj != other.conj)

    def inverse(self) -> "HypIsometry":
        if self.conj:
            return HypIsometry(self.a, -self.b.conjugate(), True)
        return HypIsometry(self.a.conjugate(), -self.b, False)


def frame(p, q) -> HypIsometry:
    """Isometry sending p to 0 and q onto the positive real axis."""
    T = HypIsometry.to_origin(p)
    w = complex(T.apply(_as_complex(q)))
    if abs(w) < 1e-300:
        raise GeometryError("degenerate mirror")
    return HypIsometry.rotation(-cmath.phase(w)) @ T


def reflection(p, q) -> HypIsometry:
    """Reflection across the complete geodesic through p and q."""
    if hyp_distance(p, q) < TAU_PT:
        raise GeometryError("degenerate mirror")
    T = frame(p, q)
    return T.inverse() @ HypIsometry.conjugation() @ T


# -- segments and circles --------------------------------------------------

@dataclass(frozen=True)
class GeodesicSegment:
    p: DiskPoint
    q: DiskPoint

    @property
    def length(self) -> float:
        return hyp_distance(self.p, self.q)

    def point_at(self, t: float) -> DiskPoint:
        return point_along_segment(self, t)

    def points(self, ts) -> np.ndarray:
        """Complex coordinates at the given fractions (vectorized)."""
        ts = np.asarray(ts, dtype=float)
        L = self.length
        if L < TAU_PT:
            return np.full(ts.shape, self.p.z, dtype=complex)
        T = frame(self.p, self.q)
        return T.inverse().apply(np.tanh(ts * L / 2.0) + 0j)

    def tangent_at(self, t: float) -> complex:
        """Unit Euclidean tangent (as complex) of the segment's direction at fraction t."""
        L = self.length
        T = frame(self.p, self.q)
        Tinv = T.inverse()
        r = math.tanh(t * L / 2.0)
        h = 1e-7
        d = complex(Tinv.apply(r + h)) - complex(Tinv.apply(r - h))
        return d / abs(d)


def point_along_segment(seg: GeodesicSegment, t: float) -> DiskPoint:
    if not (0.0 <= t <= 1.0):
        raise GeometryError("fraction must lie in [0, 1]")
    L = seg.length
    if L < TAU_PT:
        return seg.p
    if t == 0.0:
        return seg.p
    if t == 1.0:
        return seg.q
    T = frame(seg.p, seg.q)
    return DiskPoint.from_complex(complex(T.inverse().apply(math.tanh(t * L / 2.0) + 0j)))


def reflect_across(seg: GeodesicSegment, p: DiskPoint) -> DiskPoint:
    return reflection(seg.p, seg.q)(p)


def signed_distance_to_geodesic(z, p, q):
    """Signed distance from z to the geodesic through p, q; positive on the left of p->q."""
    w = frame(p, q).apply(np.asarray(z, dtype=complex))
    return np.arcsinh(2.0 * np.imag(w) / (1.0 - np.abs(w) ** 2))


def distance_to_geodesic(z, p, q):
    return np.abs(signed_distance_to_geodesic(z, p, q))


def distance_to_segment(z, p, q):
    """Distance from z to the closed geodesic segment [p, q]."""
    T = frame(p, q)
    w = T.apply(np.asarray(z, dtype=complex))
    L = hyp_distance(p, q)
    # foot of the perpendicular in the frame lies on the real axis; it is inside
    # the segment iff the point's projection coordinate is in [0, tanh(L/2)]
    x = np.real(w)
    y = np.imag(w)
    # the perpendicular through w hits the real axis at the point s solving
    # the geodesic foot formula: s = 2x / (1 + |w|^2 + sqrt((1+|w|^2)^2 - 4x^2))
    m = 1.0 + x * x + y * y
    s = 2.0 * x / (m + np.sqrt(np.maximum(m * m - 4.0 * x * x, 0.0)))
    perp = np.arcsinh(2.0 * np.abs(y) / (1.0 - np.abs(w) ** 2))
    d0 = dist_array(w, 0j)
    d1 = dist_array(w, math.tanh(L / 2.0) + 0j)
    inside = (s >= 0.0) & (s <= math.tanh(L / 2.0))
    return np.where(inside, perp, np.minimum(d0, d1))


def geodesic_circle(p, q):
    """Euclidean circle (center, radius) carrying the geodesic through p and q.

    Returns ``None`` when the geodesic is a diameter.
    """
    z1, z2 = _as_complex(p), _as_complex(q)
    # the geodesic circle also passes through the inversions 1/conj(z)
    pts = [z1, z2, 1.0 / z1.conjugate() if abs(z1) > 1e-12 else None]
    if pts[2] is None:
        return None
    a, b, c = pts
    d = 2.0 * (a.real * (b.imag - c.imag) + b.real * (c.imag - a.imag) + c.real * (a.imag - b.imag))
    if abs(d) < 1e-14:
        return None
    ux = (abs(a) ** 2 * (b.imag - c.imag) + abs(b) ** 2 * (c.imag - a.imag) + abs(c) ** 2 * (a.imag - b.imag)) / d
    uy = (abs(a) ** 2 * (c.real - b.real) + abs(b) ** 2 * (a.real - c.real) + abs(c) ** 2 * (b.real - a.real)) / d
    center = complex(ux, uy)
    radius = abs(a - center)
    if radius > 1e8:
        return None
    return center, radius


@dataclass(frozen=True)
class HypCircle:
    center: DiskPoint
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise GeometryError("circle radius must be nonnegative")

    @property
    def perimeter(self) -> float:
        return circle_perimeter(self)

    def points(self, thetas) -> np.ndarray:
        """Points at the given angles; hyperbolic arc length is radius-scaled angle."""
        T = HypIsometry.to_origin(self.center).inverse()
        r = math.tanh(self.radius / 2.0)
        return T.apply(r * np.exp(1j * np.asarray(thetas, dtype=float)))

    def euclidean(self) -> tuple[complex, float]:
        """Euclidean center and radius of the circle in the disk model."""
        c = self.center.z
        if abs(c) < 1e-15:
            return 0j, math.tanh(self.radius / 2.0)
        u = c / abs(c)
        T = HypIsometry.to_origin(self.center).inverse()
        r = math.tanh(self.radius / 2.0)
        far = complex(T.apply(r * u))
        near = complex(T.apply(-r * u))
        return (far + near) / 2.0, abs(far - near) / 2.0


def circle_perimeter(c: HypCircle) -> float:
    return 2.0 * math.pi * math.sinh(c.radius)


# -- triangles -------------------------------------------------------------

def _law_of_cosines_side(opposite: float, a1: float, a2: float) -> float:
    """Side length opposite angle ``opposite`` given the other two angles."""
    return math.acosh((math.cos(opposite) + math.cos(a1) * math.cos(a2)) / (math.sin(a1) * math.sin(a2)))


@dataclass(frozen=True)
class HypTriangle:
    vertices: tuple[DiskPoint, DiskPoint, DiskPoint]
    angles: tuple[float, float, float]

    def __post_init__(self):
        if sum(self.angles) >= math.pi:
            raise GeometryError("not hyperbolic")

    @property
    def zs(self) -> tuple[complex, complex, complex]:
        return tuple(v.z for v in self.vertices)

    def side_lengths(self) -> tuple[float, float, float]:
        """Lengths of the sides opposite A1, A2, A3."""
        A = self.vertices
        return (hyp_distance(A[1], A[2]), hyp_distance(A[2], A[0]), hyp_distance(A[0], A[1]))

    def law_of_cosines_sides(self) -> tuple[float, float, float]:
        al, be, ga = self.angles
        return (_law_of_cosines_side(al, be, ga), _law_of_cosines_side(be, ga, al),
                _law_of_cosines_side(ga, al, be))

    @property
    def area(self) -> float:
        return math.pi - sum(self.angles)

    @property
    def diameter(self) -> float:
        return max(self.side_lengths())

    def orientation(self) -> float:
        """+1 if vertices are counter-clockwise, -1 otherwise."""
        z = self.zs
        cross = ((z[1] - z[0]).conjugate() * (z[2] - z[0])).imag
        return 1.0 if cross > 0 else -1.0

    def contains(self, z, strict: bool = True):
        z = np.asarray(z, dtype=complex)
        A = self.zs
        o = self.orientation()
        ok = np.ones(z.shape, dtype=bool)
        for i in range(3):
            s = o * signed_distance_to_geodesic(z, A[i], A[(i + 1) % 3])
            ok &= (s > 0) if strict else (s >= -1e-12)
        return ok

    def moved(self, iso: HypIsometry) -> "HypTriangle":
        return HypTriangle(tuple(iso(v) for v in self.vertices), self.angles)

    def side_distances(self, z) -> np.ndarray:
        A = self.zs
        return np.array([distance_to_geodesic(z, A[(i + 1) % 3], A[(i + 2) % 3]) for i in range(3)])


def check_hyperbolic(p: int, q: int, r: int) -> None:
    for v in (p, q, r):
        if int(v) != v or v < 2:
            raise GeometryError("p, q, r must be integers >= 2")
    if 1.0 / p + 1.0 / q + 1.0 / r >= 1.0 - 1e-15:
        raise GeometryError("not hyperbolic")


def triangle_from_angles(p: int, q: int, r: int) -> HypTriangle:
    """The (pi/p, pi/q, pi/r) triangle with A1 at 0 and A1A2 on the positive x-axis."""
    check_hyperbolic(p, q, r)
    al, be, ga = math.pi / p, math.pi / q, math.pi / r
    c = _law_of_cosines_side(ga, al, be)  # |A1A2|
    b = _law_of_cosines_side(be, ga, al)  # |A1A3|
    A1 = DiskPoint(0.0, 0.0)
    A2 = DiskPoint(math.tanh(c / 2.0), 0.0)
    A3 = DiskPoint.from_complex(math.tanh(b / 2.0) * cmath.exp(1j * al))
    return HypTriangle((A1, A2, A3), (al, be, ga))


def _hyperboloid(z):
    z = np.asarray(z, dtype=complex)
    s = 1.0 - np.abs(z) ** 2
    return np.stack([(1.0 + np.abs(z) ** 2) / s, 2.0 * z.real / s, 2.0 * z.imag / s], axis=-1)


def _from_hyperboloid(X):
    return complex(X[1], X[2]) / (1.0 + X[0])


def incenter_and_inradius(T: HypTriangle) -> tuple[DiskPoint, float]:
    """Incenter as the sinh(side)-weighted hyperboloid barycenter of the vertices."""
    a, b, c = T.side_lengths()
    if min(a, b, c) < TAU_PT:
        raise GeometryError("degenerate triangle")
    X = _hyperboloid(np.array(T.zs))
    w = np.array([math.sinh(a), math.sinh(b), math.sinh(c)])
    Y = (w[:, None] * X).sum(axis=0)
    norm = math.sqrt(Y[0] ** 2 - Y[1] ** 2 - Y[2] ** 2)
    center = DiskPoint.from_complex(_from_hyperboloid(Y / norm))
    rho = float(T.side_distances(center.z).mean())
    return center, rho


def polygon_contains(zs: Sequence[complex], z) -> np.ndarray:
    """Point-in-geodesic-polygon test (any simple polygon), done in the Klein model."""
    k = to_klein(np.asarray(list(zs), dtype=complex))
    pts = to_klein(np.atleast_1d(np.asarray(z, dtype=complex)))
    x, y = pts.real[:, None], pts.imag[:, None]
    x0, y0 = k.real[None, :], k.imag[None, :]
    x1, y1 = np.roll(k.real, -1)[None, :], np.roll(k.imag, -1)[None, :]
    crosses = ((y0 > y) != (y1 > y)) & (x < (x1 - x0) * (y - y0) / (y1 - y0 + 1e-300) + x0)
    return (crosses.sum(axis=1) % 2) == 1


def points_from(zs: Iterable[complex]) -> list[DiskPoint]:
    return [DiskPoint.from_complex(complex(z)) for z in zs]
