import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from hypsteklov.hypgeo import (
    DiskPoint,
    GeodesicSegment,
    GeometryError,
    HypCircle,
    HypIsometry,
    HypTriangle,
    circle_perimeter,
    dist_array,
    dist_c,
    distance_to_segment,
    hyp_distance,
    incenter_and_inradius,
    point_along_segment,
    polygon_contains,
    reflect_across,
    reflection,
    signed_distance_to_geodesic,
    triangle_from_angles,
)


def radial_integral(r):
    val, _ = quad(lambda s: 2.0 / (1.0 - s * s), 0.0, r, epsabs=1e-14)
    return val


disk_points = st.builds(
    lambda rad, th: rad * cmath.exp(1j * th),
    st.floats(0.0, 0.95), st.floats(0.0, 2 * math.pi))


@st.composite
def isometries(draw):
    a = draw(disk_points)
    th = draw(st.floats(0.0, 2 * math.pi))
    conj = draw(st.booleans())
    iso = HypIsometry.rotation(th) @ HypIsometry.to_origin(a)
    return iso @ HypIsometry.conjugation() if conj else iso


def test_distance_examples():
    o = DiskPoint(0.0, 0.0)
    assert hyp_distance(o, o) == 0.0
    assert hyp_distance(o, DiskPoint(0.5, 0.0)) == pytest.approx(radial_integral(0.5), abs=1e-12)
    assert hyp_distance(o, DiskPoint(0.5, 0.0)) == pytest.approx(1.0986123, abs=1e-7)
    assert hyp_distance(o, DiskPoint(0.1, 0.0)) == pytest.approx(0.2006707, abs=1e-7)
    assert hyp_distance(o, DiskPoint(0.1, 0.0)) == pytest.approx(math.log(1.1 / 0.9), abs=1e-14)


def test_points_outside_disk_rejected():
    with pytest.raises(GeometryError):
        DiskPoint(1.0, 0.0)
    with pytest.raises(GeometryError):
        DiskPoint(0.8, 0.6)


@given(disk_points, disk_points, disk_points)
def test_distance_metric_axioms(z, w, u):
    assert dist_c(z, w) == pytest.approx(dist_c(w, z), abs=1e-12)
    assert dist_c(z, u) <= dist_c(z, w) + dist_c(w, u) + 1e-9


@given(isometries(), disk_points, disk_points)
def test_isometries_preserve_distance(iso, z, w):
    assert abs(dist_c(complex(iso.apply(z)), complex(iso.apply(w))) - dist_c(z, w)) < 1e-9


def test_isometry_distance_many_samples():
    rng = np.random.default_rng(1)
    z = 0.9 * np.sqrt(rng.random(1000)) * np.exp(2j * np.pi * rng.random(1000))
    w = 0.9 * np.sqrt(rng.random(1000)) * np.exp(2j * np.pi * rng.random(1000))
    for k in range(10):
        iso = HypIsometry.rotation(k) @ HypIsometry.to_origin(0.7 * cmath.exp(1j * k))
        if k % 2:
            iso = iso @ HypIsometry.conjugation()
        assert np.max(np.abs(dist_array(iso.apply(z), iso.apply(w)) - dist_array(z, w))) < 1e-9


@given(isometries(), isometries(), isometries(), disk_points)
def test_composition_associative_and_inverse(f, g, h, z):
    lhs = ((f @ g) @ h).apply(z)
    rhs = (f @ (g @ h)).apply(z)
    assert abs(lhs - rhs) < 1e-9
    assert abs(f.apply(g.apply(z)) - (f @ g).apply(z)) < 1e-9
    assert abs(f.inverse().apply(f.apply(z)) - z) < 1e-9


@given(isometries())
def test_isometry_normalized(f):
    assert abs(abs(f.a) ** 2 - abs(f.b) ** 2 - 1.0) < 1e-12


def test_point_along_segment():
    p, q = DiskPoint(0.0, 0.0), DiskPoint(0.5, 0.0)
    seg = GeodesicSegment(p, q)
    assert point_along_segment(seg, 0.0) == p
    assert point_along_segment(seg, 1.0) == q
    m = point_along_segment(seg, 0.5)
    assert m.x == pytest.approx(math.tanh(math.log(3) / 4), abs=1e-12)
    assert m.x == pytest.approx(0.2679, abs=1e-4)
    assert m.y == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(GeometryError):
        point_along_segment(seg, 1.5)
    assert point_along_segment(GeodesicSegment(p, p), 0.3) == p


@given(disk_points, disk_points, st.floats(0.0, 1.0))
def test_point_along_segment_properties(z, w, t):
    p, q = DiskPoint.from_complex(z), DiskPoint.from_complex(w)
    if hyp_distance(p, q) < 1e-6:
        return
    r = point_along_segment(GeodesicSegment(p, q), t)
    assert hyp_distance(p, r) == pytest.approx(t * hyp_distance(p, q), abs=1e-9)
    assert abs(signed_distance_to_geodesic(r.z, z, w)) < 1e-9


def test_length_matches_arc_length_quadrature():
    p, q = DiskPoint(-0.3, 0.4), DiskPoint(0.6, -0.2)
    seg = GeodesicSegment(p, q)

    def speed(t):
        h = 1e-6
        a, b = seg.points([max(t - h, 0)])[0], seg.points([min(t + h, 1)])[0]
        z = seg.points([t])[0]
        return abs(b - a) / (min(t + h, 1) - max(t - h, 0)) * 2 / (1 - abs(z) ** 2)

    val, _ = quad(speed, 0, 1, epsabs=1e-12)
    assert val == pytest.approx(seg.length, abs=1e-7)


def test_reflection_examples():
    mirror = GeodesicSegment(DiskPoint(-0.5, 0.0), DiskPoint(0.5, 0.0))
    r = reflect_across(mirror, DiskPoint(0.0, 0.3))
    assert r.x == pytest.approx(0.0, abs=1e-12) and r.y == pytest.approx(-0.3, abs=1e-12)
    on = DiskPoint(0.2, 0.0)
    assert reflect_across(mirror, on).same_as(on)
    with pytest.raises(GeometryError, match="degenerate mirror"):
        reflection(DiskPoint(0.1, 0.1), DiskPoint(0.1, 0.1))


def test_reflection_involution_random():
    rng = np.random.default_rng(3)
    R = reflection(0.2 + 0.3j, -0.4 + 0.1j)
    z = 0.9 * np.sqrt(rng.random(100)) * np.exp(2j * np.pi * rng.random(100))
    assert np.max(np.abs(R.apply(R.apply(z)) - z)) < 1e-9
    # points on the mirror are fixed
    seg = GeodesicSegment(DiskPoint.from_complex(0.2 + 0.3j), DiskPoint.from_complex(-0.4 + 0.1j))
    pts = seg.points(np.linspace(0, 1, 7))
    assert np.max(np.abs(R.apply(pts) - pts)) < 1e-9


def test_triangle_from_angles_237():
    T = triangle_from_angles(2, 3, 7)
    assert T.area == pytest.approx(math.pi / 42, abs=1e-15)
    assert T.area == pytest.approx(0.0747998, abs=1e-7)
    assert T.side_lengths()[2] == pytest.approx(math.acosh(math.cos(math.pi / 7) / math.sin(math.pi / 3)), abs=1e-12)
    assert T.side_lengths()[2] == pytest.approx(0.2831, abs=1e-4)
    assert T.vertices[0].z == 0
    assert T.vertices[1].y == 0 and T.vertices[1].x > 0


@pytest.mark.parametrize("pqr", [(2, 3, 7), (3, 3, 4), (2, 4, 5), (4, 4, 4), (3, 3, 5)])
def test_sides_satisfy_law_of_cosines(pqr):
    T = triangle_from_angles(*pqr)
    assert np.allclose(T.side_lengths(), T.law_of_cosines_sides(), atol=1e-9)
    # measured angles agree with the requested ones
    for i in range(3):
        A = T.zs[i]
        M = HypIsometry.to_origin(A)
        u, v = complex(M.apply(T.zs[(i + 1) % 3])), complex(M.apply(T.zs[(i + 2) % 3]))
        ang = abs(cmath.phase(v / u))
        assert ang == pytest.approx(T.angles[i], abs=1e-9)


def test_not_hyperbolic():
    with pytest.raises(GeometryError, match="not hyperbolic"):
        triangle_from_angles(2, 3, 6)
    with pytest.raises(GeometryError):
        triangle_from_angles(1, 3, 7)


@given(isometries(), isometries())
def test_triangle_congruence(f, g):
    T = triangle_from_angles(2, 3, 7)
    assert np.allclose(T.moved(f).side_lengths(), T.moved(g).side_lengths(), atol=1e-9)


def bisector_incenter(T):
    """Oracle: intersect two angle bisectors by bisection on the distance difference."""
    A = T.zs

    def on_bisector(i, s):
        M = HypIsometry.to_origin(A[i])
        u, v = complex(M.apply(A[(i + 1) % 3])), complex(M.apply(A[(i + 2) % 3]))
        d = cmath.exp(1j * (cmath.phase(u) + cmath.phase(v / u) / 2))
        return complex(M.inverse().apply(math.tanh(s / 2) * d))

    # walk along the bisector from A1 until distances to sides A1A2 and A2A3 agree
    lo, hi = 0.0, T.diameter
    for _ in range(200):
        mid = (lo + hi) / 2
        z = on_bisector(0, mid)
        d = T.side_distances(z)
        if d[1] < d[0]:  # still closer to the sides through A1
            lo = mid
        else:
            hi = mid
    return on_bisector(0, lo)


@pytest.mark.parametrize("pqr", [(2, 3, 7), (3, 3, 4), (2, 4, 5)])
def test_incenter(pqr):
    T = triangle_from_angles(*pqr)
    c, rho = incenter_and_inradius(T)
    assert rho > 0
    d = T.side_distances(c.z)
    assert np.ptp(d) < 1e-9 and d.mean() == pytest.approx(rho, abs=1e-12)
    assert T.contains(c.z)
    assert abs(bisector_incenter(T) - c.z) < 1e-9


def test_incenter_symmetric():
    s = math.tanh(0.5)
    T = HypTriangle(tuple(DiskPoint.from_complex(s * cmath.exp(2j * math.pi * k / 3)) for k in range(3)),
                    (math.pi / 4,) * 3)
    c, _ = incenter_and_inradius(T)
    assert abs(c.z) < 1e-12


def test_degenerate_triangle():
    p = DiskPoint(0.1, 0.1)
    T = HypTriangle((p, p, DiskPoint(0.2, 0.0)), (0.1, 0.1, 0.1))
    with pytest.raises(GeometryError):
        incenter_and_inradius(T)


def test_circle_perimeter():
    assert circle_perimeter(HypCircle(DiskPoint(0, 0), 0.0)) == 0.0
    sinh1 = sum(1.0 / math.factorial(2 * k + 1) for k in range(12))  # Taylor series oracle
    assert circle_perimeter(HypCircle(DiskPoint(0, 0), 1.0)) == pytest.approx(2 * math.pi * sinh1, abs=1e-12)
    assert circle_perimeter(HypCircle(DiskPoint(0, 0), 1.0)) == pytest.approx(7.38401, abs=1e-5)
    rs = np.linspace(0, 3, 20)
    per = [circle_perimeter(HypCircle(DiskPoint(0.1, 0.2), r)) for r in rs]
    assert all(b > a for a, b in zip(per, per[1:]))


def test_circle_points_and_euclidean_form():
    c = HypCircle(DiskPoint(0.3, -0.4), 0.7)
    pts = c.points(np.linspace(0, 2 * np.pi, 50))
    assert np.allclose(dist_array(pts, c.center.z), 0.7, atol=1e-12)
    ec, er = c.euclidean()
    assert np.allclose(np.abs(pts - ec), er, atol=1e-12)


@given(disk_points, disk_points, disk_points)
def test_distance_to_segment_brute_force(z, p, q):
    if dist_c(p, q) < 1e-3:
        return
    seg = GeodesicSegment(DiskPoint.from_complex(p), DiskPoint.from_complex(q))
    brute = dist_array(z, seg.points(np.linspace(0, 1, 4001))).min()
    got = float(distance_to_segment(z, p, q))
    assert got <= brute + 1e-9
    assert got >= brute - seg.length / 4000


def test_polygon_contains():
    T = triangle_from_angles(2, 3, 7)
    c, _ = incenter_and_inradius(T)
    assert polygon_contains(T.zs, c.z)[0]
    assert not polygon_contains(T.zs, -0.1 + 0j)[0]
