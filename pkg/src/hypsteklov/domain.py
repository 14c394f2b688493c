"""Hyperbolic domain associated with a subgraph of a triangle-tiling graph.

Every vertex of the subgraph contributes a shrunken copy of its tile, every
edge a thin quadrilateral between two shrunken tiles, and every tiling vertex
whose surrounding tiles form a closed cycle in the subgraph a small polygon
filling the gap. Balls of radius rho/2 are cut out around boundary vertices
and corners are rounded by hyperbolic circle fillets.

Polygons are handled in the Klein model, where geodesic edges are straight.
"""
from __future__ import annotations

import cmath
import functools
import json
import math
from dataclasses import dataclass, field

import numpy as np
import shapely
from scipy.integrate import quad

from .graphcore import GraphWithBoundary
from .hypgeo import (
    DiskPoint,
    GeodesicSegment,
    HypCircle,
    HypIsometry,
    HypTriangle,
    circle_perimeter,
    dist_array,
    dist_c,
    distance_to_segment,
    frame,
    incenter_and_inradius,
    point_along_segment,
    reflection,
    to_klein,
)
from .tiling import HostGraph

SHRINK = 0.9
FILLET_FRACTION = 0.1
CLASS_TOL = 1e-7
MAX_TANH_RADIUS = 0.5


class DomainError(RuntimeError):
    pass


def shrink_triangle(T: HypTriangle, factor: float = SHRINK) -> HypTriangle:
    """Pull each vertex toward the incenter so its distance becomes ``factor`` times the original."""
    v, _ = incenter_and_inradius(T)
    verts = tuple(point_along_segment(GeodesicSegment(v, A), factor) for A in T.vertices)
    return HypTriangle(verts, T.angles)


def _cluster(values, tol: float = CLASS_TOL) -> list[float]:
    vals = sorted(values)
    reps: list[float] = []
    for x in vals:
        if not reps or x - reps[-1] > tol:
            reps.append(x)
    return reps


@dataclass(frozen=True)
class DomainConstants:
    p: int
    q: int
    r: int
    seed_shrunk: HypTriangle
    rho: float  # inradius of the shrunken tile
    segment_classes: tuple[float, ...]  # 3 shrunken sides + 6 connectors

    @property
    def lam(self) -> float:
        return min(self.segment_classes)

    @property
    def trim(self) -> float:
        return FILLET_FRACTION * self.lam

    @property
    def ball_radius(self) -> float:
        return self.rho / 2.0

    @property
    def epsilon_max(self) -> float:
        return self.rho / 4.0


@functools.lru_cache(maxsize=None)
def domain_constants(p: int, q: int, r: int) -> DomainConstants:
    from .hypgeo import triangle_from_angles

    T = triangle_from_angles(p, q, r)
    Tp = shrink_triangle(T)
    _, rho = incenter_and_inradius(Tp)
    classes = list(Tp.side_lengths())
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        R = reflection(T.vertices[i], T.vertices[j])
        for m in (i, j):
            classes.append(dist_c(Tp.vertices[m].z, R(Tp.vertices[m]).z))
    return DomainConstants(p, q, r, Tp, rho, tuple(classes))


# -- pieces ----------------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    kind: str  # "triangle" | "quad" | "gon"
    tag: tuple
    keys: tuple  # corner keys (host id, label), counter-clockwise
    vertices: tuple  # complex coordinates matching ``keys``

    def klein_polygon(self) -> shapely.Polygon:
        k = to_klein(np.array(self.vertices))
        return shapely.Polygon(np.column_stack([k.real, k.imag]))


def _ccw(keys, zs):
    k = to_klein(np.asarray(zs))
    area = 0.5 * np.sum(k.real * np.roll(k.imag, -1) - np.roll(k.real, -1) * k.imag)
    if area < 0:
        return tuple(reversed(keys)), tuple(reversed(zs))
    return tuple(keys), tuple(zs)


# -- boundary primitives ---------------------------------------------------

def _point_at(x: complex, direction: complex, d: float) -> complex:
    """Point at hyperbolic distance d from x along the Euclidean unit direction at x."""
    T = HypIsometry.to_origin(x)
    return complex(T.inverse().apply(math.tanh(d / 2.0) * direction))


@dataclass(frozen=True)
class SegmentPrim:
    p: complex
    q: complex
    owner: tuple  # ("triangle", host) or ("quad", (h1, h2))

    kind = "segment"

    @property
    def length(self) -> float:
        return dist_c(self.p, self.q)

    def points(self, ts) -> np.ndarray:
        return GeodesicSegment(DiskPoint.from_complex(self.p), DiskPoint.from_complex(self.q)).points(ts)

    def sample(self, spacing: float):
        n = max(1, int(math.ceil(self.length / spacing)))
        ts = np.arange(n) / n
        pts = self.points(ts)
        return pts, self.inward_normals(pts)

    def inward_normals(self, pts) -> np.ndarray:
        # domain lies to the left of p -> q; rotate the tangent by +90 degrees
        T = frame(self.p, self.q)
        w = T.apply(np.asarray(pts, dtype=complex))
        Tinv = T.inverse()
        h = 1e-7
        tang = Tinv.apply(w + h) - Tinv.apply(w - h)
        tang = tang / np.abs(tang)
        return 1j * tang

    def distance(self, z) -> np.ndarray:
        return distance_to_segment(z, self.p, self.q)


@dataclass(frozen=True)
class FilletPrim:
    corner: complex
    corner_key: tuple
    start: complex
    end: complex
    center: complex
    radius: float
    angle0: float
    dangle: float
    convex: bool

    kind = "fillet"

    @property
    def _to_center(self) -> HypIsometry:
        return HypIsometry.to_origin(self.center)

    def points(self, ts) -> np.ndarray:
        ang = self.angle0 + self.dangle * np.asarray(ts, dtype=float)
        return self._to_center.inverse().apply(math.tanh(self.radius / 2.0) * np.exp(1j * ang))

    @property
    def length(self) -> float:
        return math.sinh(self.radius) * abs(self.dangle)

    def length_quadrature(self, rtol: float = 1e-10) -> float:
        Tinv = self._to_center.inverse()
        al, be = Tinv.a, Tinv.b
        rr = math.tanh(self.radius / 2.0)

        def speed(t):
            w = rr * cmath.exp(1j * (self.angle0 + self.dangle * t))
            z = (al * w + be) / (be.conjugate() * w + al.conjugate())
            # |M'(w)| = 1 / |conj(b) w + conj(a)|^2 for a normalized Moebius map
            dz = rr * abs(self.dangle) / abs(be.conjugate() * w + al.conjugate()) ** 2
            return dz * 2.0 / (1.0 - abs(z) ** 2)

        val, _ = quad(speed, 0.0, 1.0, epsrel=rtol, epsabs=0.0, limit=200)
        return val

    def sample(self, spacing: float):
        n = max(1, int(math.ceil(self.length / spacing)))
        ts = np.arange(n) / n
        pts = self.points(ts)
        return pts, self.inward_normals(pts)

    def inward_normals(self, pts) -> np.ndarray:
        S = self._to_center
        w = S.apply(np.asarray(pts, dtype=complex))
        radial = w / np.abs(w)  # outward from the circle center, in the center frame
        Sinv = S.inverse()
        h = 1e-7
        d = Sinv.apply(w + h * radial) - Sinv.apply(w - h * radial)
        d = d / np.abs(d)
        # convex corner: circle center sits inside the domain
        return -d if self.convex else d

    def distance(self, z) -> np.ndarray:
        w = self._to_center.apply(np.asarray(z, dtype=complex))
        ang = np.angle(w)
        rel = (ang - self.angle0) * np.sign(self.dangle)
        rel = np.mod(rel, 2 * np.pi)
        on_arc = rel <= abs(self.dangle)
        radial = np.abs(2.0 * np.arctanh(np.abs(w)) - self.radius)
        ends = np.minimum(dist_array(z, self.start), dist_array(z, self.end))
        return np.where(on_arc, radial, ends)


@dataclass(frozen=True)
class CirclePrim:
    host: int
    circle: HypCircle

    kind = "circle"

    @property
    def length(self) -> float:
        return circle_perimeter(self.circle)

    def points(self, ts) -> np.ndarray:
        return self.circle.points(2 * np.pi * np.asarray(ts, dtype=float))

    def sample(self, spacing: float):
        n = max(3, int(math.ceil(self.length / spacing)))
        pts = self.points(np.arange(n) / n)
        return pts, self.inward_normals(pts)

    def inward_normals(self, pts) -> np.ndarray:
        # the domain is outside the removed ball
        S = HypIsometry.to_origin(self.circle.center)
        w = S.apply(np.asarray(pts, dtype=complex))
        radial = w / np.abs(w)
        Sinv = S.inverse()
        h = 1e-7
        d = Sinv.apply(w + h * radial) - Sinv.apply(w - h * radial)
        return d / np.abs(d)

    def distance(self, z) -> np.ndarray:
        return np.abs(dist_array(z, self.circle.center.z) - self.circle.radius)


@dataclass
class BoundaryCurve:
    kind: str  # "polygonal" | "circle"
    primitives: list
    corner_keys: list = field(default_factory=list)
    corner_angles: list = field(default_factory=list)  # interior angles, radians

    @property
    def length(self) -> float:
        return sum(p.length for p in self.primitives)


@dataclass
class DomainModel:
    graph: GraphWithBoundary
    host: HostGraph
    constants: DomainConstants
    mode: str
    shrunk: dict  # host id -> (z0, z1, z2) shrunken tile corners by label
    pieces: list
    removed_balls: dict  # boundary host id -> HypCircle
    curves: list

    @property
    def omega_bar(self) -> tuple:
        return self.graph.host_ids

    @property
    def interior_hosts(self) -> tuple:
        return self.graph.host_ids[: self.graph.n_interior]

    @property
    def boundary_hosts(self) -> tuple:
        return self.graph.host_ids[self.graph.n_interior:]

    @property
    def n_boundary_components(self) -> int:
        return len(self.curves)

    @property
    def n_outer_curves(self) -> int:
        return sum(1 for c in self.curves if c.kind == "polygonal")

    def primitives(self):
        for c in self.curves:
            yield from c.primitives

    def pieces_of(self, kind: str) -> list:
        return [p for p in self.pieces if p.kind == kind]

    def cobblestone(self, w: int) -> HypTriangle:
        """Tile T_w; the cobblestone is its intersection with the domain."""
        return self.host.tiling.tiles[w].triangle

    def cobblestone_adjacency(self) -> set:
        return {tuple(sorted(p.tag)) for p in self.pieces if p.kind == "quad"}

    def klein_union(self):
        return shapely.union_all([p.klein_polygon() for p in self.pieces])

    def contains(self, z, margin_balls: float = 0.0) -> np.ndarray:
        """Membership in the polygon union minus the removed balls (fillets ignored)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        k = to_klein(z)
        U = self.klein_union()
        shapely.prepare(U)
        inside = shapely.contains_xy(U, k.real, k.imag)
        for c in self.removed_balls.values():
            inside &= dist_array(z, c.center.z) > c.radius + margin_balls
        return inside

    def to_dict(self) -> dict:
        lengths = boundary_length_breakdown(self)
        return {
            "format": "hypsteklov.domain",
            "version": 1,
            "pqr": [self.constants.p, self.constants.q, self.constants.r],
            "mode": self.mode,
            "rho": self.constants.rho,
            "lambda": self.constants.lam,
            "pieces": {
                "triangles": len(self.pieces_of("triangle")),
                "quadrilaterals": len(self.pieces_of("quad")),
                "cycle_gons": [{"tiling_vertex": p.tag[0], "sides": len(p.vertices)} for p in self.pieces_of("gon")],
            },
            "removed_balls": [{"host": h, "center": [c.center.x, c.center.y], "radius": c.radius}
                              for h, c in sorted(self.removed_balls.items())],
            "boundary_components": self.n_boundary_components,
            "polygonal_curves": self.n_outer_curves,
            "boundary_length": lengths,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


# -- construction ----------------------------------------------------------

def _cycle_gon_candidates(host: HostGraph, omega_bar: set, edge_set: set):
    """Tiling vertices whose full ring of tiles lies in the subgraph with consecutive E' edges."""
    t = host.tiling
    orders = t.orders
    seen = set()
    out = []
    for w in sorted(omega_bar):
        for vid in t.tile_vertices[w]:
            if vid in seen:
                continue
            seen.add(vid)
            ring = t.vertex_index[vid]
            lab = t.vertex_label[vid]
            if len(ring) != 2 * orders[lab] or not all(x in omega_bar for x in ring):
                continue
            zc = t.vertex_pos[vid]
            T = HypIsometry.to_origin(zc)
            ring = sorted(ring, key=lambda x: cmath.phase(complex(T.apply(host.positions[x]))))
            ok = all((min(a, b), max(a, b)) in edge_set for a, b in zip(ring, ring[1:] + ring[:1]))
            if ok:
                out.append((vid, lab, ring))
    return out


def _fillet(z: complex, u: complex, w: complex, key, trim: float):
    """Tangent circle fillet at corner z between incoming u->z and outgoing z->w.

    Returns (interior angle, fillet or None, trim actually used). Nearly straight
    corners get a shorter trim so that the tangent circle stays a genuine circle.
    """
    T = HypIsometry.to_origin(z)
    d_in = cmath.phase(complex(T.apply(u)))
    d_out = cmath.phase(complex(T.apply(w)))
    phi = (d_in - d_out) % (2 * math.pi)  # interior angle (domain on the left)
    if abs(phi - math.pi) < 1e-12:
        return phi, None, 0.0
    convex = phi < math.pi
    half = (phi if convex else 2 * math.pi - phi) / 2.0
    trim = min(trim, math.asinh(MAX_TANH_RADIUS / math.tan(half)))
    r = math.atanh(math.sinh(trim) * math.tan(half))
    h = math.acosh(math.cosh(trim) * math.cosh(r))
    bis = d_out + phi / 2.0 if convex else d_out + phi / 2.0 + math.pi
    Tinv = T.inverse()
    c = complex(Tinv.apply(math.tanh(h / 2.0) * cmath.exp(1j * bis)))
    x = complex(Tinv.apply(math.tanh(trim / 2.0) * cmath.exp(1j * d_in)))
    xp = complex(Tinv.apply(math.tanh(trim / 2.0) * cmath.exp(1j * d_out)))
    S = HypIsometry.to_origin(c)
    a0 = cmath.phase(complex(S.apply(x)))
    a1 = cmath.phase(complex(S.apply(xp)))
    da = (a1 - a0 + math.pi) % (2 * math.pi) - math.pi
    return phi, FilletPrim(z, key, x, xp, c, r, a0, da, convex), trim


def _trimmed(p: complex, q: complex, trim_p: float, trim_q: float, owner) -> SegmentPrim:
    seg = GeodesicSegment(DiskPoint.from_complex(p), DiskPoint.from_complex(q))
    L = seg.length
    a = seg.point_at(trim_p / L).z if trim_p > 0 else p
    b = seg.point_at(1.0 - trim_q / L).z if trim_q > 0 else q
    return SegmentPrim(a, b, owner)


def build_domain(G: GraphWithBoundary, host: HostGraph, mode: str = "smooth") -> DomainModel:
    if mode not in ("smooth", "sharp"):
        raise ValueError("mode must be 'smooth' or 'sharp'")
    if G.host_ids is None:
        raise DomainError("graph has no host back-references")
    t = host.tiling
    K = domain_constants(t.p, t.q, t.r)
    omega_bar = set(G.host_ids)
    interior = set(G.host_ids[: G.n_interior])
    for h in omega_bar:
        if not (0 <= h < len(t.tiles)):
            raise DomainError(f"no tile for host vertex {h}")

    seed_zs = K.seed_shrunk.zs
    shrunk = {h: tuple(complex(z) for z in t.tiles[h].isometry.apply(np.array(seed_zs))) for h in sorted(omega_bar)}

    pieces: list[Piece] = []
    for h in sorted(omega_bar):
        keys, zs = _ccw([(h, 0), (h, 1), (h, 2)], shrunk[h])
        pieces.append(Piece("triangle", (h,), keys, zs))

    host_edges = set()
    for a, b in G.edges:
        ha, hb = G.host_ids[a], G.host_ids[b]
        host_edges.add((min(ha, hb), max(ha, hb)))
    for h1, h2 in sorted(host_edges):
        i, j = host.shared_side(h1, h2)
        keys = [(h1, i), (h1, j), (h2, j), (h2, i)]
        keys, zs = _ccw(keys, [shrunk[h][lab] for h, lab in keys])
        pieces.append(Piece("quad", (h1, h2), keys, zs))

    for vid, lab, ring in _cycle_gon_candidates(host, omega_bar, host_edges):
        keys = [(h, lab) for h in ring]
        keys, zs = _ccw(keys, [shrunk[h][lab] for h in ring])
        pieces.append(Piece("gon", (vid,), keys, zs))

    # boundary = directed piece edges whose reverse is absent
    directed = {}
    for pc in pieces:
        n = len(pc.keys)
        for m in range(n):
            e = (pc.keys[m], pc.keys[(m + 1) % n])
            if e in directed:
                raise DomainError(f"overlapping pieces along edge {e}")
            directed[e] = pc
    nxt = {}
    for (a, b) in directed:
        if (b, a) not in directed:
            if a in nxt:
                raise DomainError(f"boundary is not a union of simple curves at {a}")
            nxt[a] = b

    def pos(key):
        return shrunk[key[0]][key[1]]

    def owner(a, b):
        return ("triangle", a[0]) if a[0] == b[0] else ("quad", tuple(sorted((a[0], b[0]))))

    loops = []
    remaining = set(nxt)
    while remaining:
        start = min(remaining)
        loop = [start]
        remaining.discard(start)
        cur = nxt[start]
        while cur != start:
            if cur not in remaining:
                raise DomainError("boundary chain does not close")
            loop.append(cur)
            remaining.discard(cur)
            cur = nxt[cur]
        loops.append(loop)

    trim = K.trim
    curves: list[BoundaryCurve] = []
    for loop in loops:
        n = len(loop)
        angles, fillets, trims = [], [], []
        for m in range(n):
            key = loop[m]
            phi, fil, tm = _fillet(pos(key), pos(loop[m - 1]), pos(loop[(m + 1) % n]), key, trim)
            if mode == "sharp":
                fil, tm = None, 0.0
            angles.append(phi)
            fillets.append(fil)
            trims.append(tm)
        prims = []
        for m in range(n):
            a, b = loop[m], loop[(m + 1) % n]
            prims.append(_trimmed(pos(a), pos(b), trims[m], trims[(m + 1) % n], owner(a, b)))
            if fillets[(m + 1) % n] is not None:
                prims.append(fillets[(m + 1) % n])
        curves.append(BoundaryCurve("polygonal", prims, list(loop), angles))

    balls = {}
    for h in G.host_ids[G.n_interior:]:
        c = HypCircle(DiskPoint.from_complex(complex(host.positions[h])), K.ball_radius)
        balls[h] = c
        curves.append(BoundaryCurve("circle", [CirclePrim(h, c)]))

    D = DomainModel(G, host, K, mode, shrunk, pieces, balls, curves)
    _check_overlap(D)
    return D


def _check_overlap(D: DomainModel) -> None:
    polys = [p.klein_polygon() for p in D.pieces]
    total = sum(p.area for p in polys)
    union = shapely.union_all(polys).area
    if abs(total - union) > 1e-9 * max(1.0, total):
        raise DomainError("overlapping pieces (construction bug)")


# -- measurements ----------------------------------------------------------

def boundary_length_breakdown(D: DomainModel) -> dict:
    seg = sum(p.length for p in D.primitives() if p.kind == "segment")
    fil = sum(p.length_quadrature() for p in D.primitives() if p.kind == "fillet")
    circ = sum(p.length for p in D.primitives() if p.kind == "circle")
    return {"segments": seg, "fillets": fil, "circles": circ, "total": seg + fil + circ}


def boundary_length(D: DomainModel) -> float:
    return boundary_length_breakdown(D)["total"]


def corner_count(D: DomainModel) -> int:
    return sum(len(c.corner_keys) for c in D.curves if c.kind == "polygonal")


def segment_length_classes(D: DomainModel) -> list[float]:
    """Distinct untrimmed boundary segment lengths."""
    lens = []
    for c in D.curves:
        if c.kind != "polygonal":
            continue
        keys = c.corner_keys
        for m in range(len(keys)):
            a, b = keys[m], keys[(m + 1) % len(keys)]
            lens.append(dist_c(D.shrunk[a[0]][a[1]], D.shrunk[b[0]][b[1]]))
    return _cluster(lens)


def corner_angle_classes(D: DomainModel) -> list[float]:
    return _cluster([a for c in D.curves for a in c.corner_angles], 1e-6)


def primitive_class_count(D: DomainModel) -> int:
    n = len(segment_length_classes(D))
    if D.mode == "smooth":
        n += len(_cluster([p.radius for p in D.primitives() if p.kind == "fillet"], 1e-6))
    if D.removed_balls:
        n += 1
    return n


# -- structural check ------------------------------------------------------

@dataclass
class EquivalenceReport:
    failures: list
    counts: dict

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"ok": self.ok, "failures": list(self.failures), "counts": dict(self.counts)}


def expected_cycle_gons(G: GraphWithBoundary, host: HostGraph) -> set:
    """Tiling vertices all of whose tiles are in the subgraph, linked by subgraph edges."""
    t = host.tiling
    omega_bar = set(G.host_ids)
    interior = set(G.host_ids[: G.n_interior])
    out = set()
    for vid, ring in t.vertex_index.items():
        if len(ring) != 2 * t.orders[t.vertex_label[vid]]:
            continue
        if not all(x in omega_bar for x in ring):
            continue
        ring_set = set(ring)
        # each tile of the ring must have exactly two ring neighbors joined by an E' edge
        good = True
        for x in ring:
            nb = [y for y in host.adjacency[x] if y in ring_set and (x in interior or y in interior)]
            if len(nb) != 2:
                good = False
                break
        if good:
            out.add(vid)
    return out


def structural_equivalence_check(D: DomainModel, G: GraphWithBoundary | None = None) -> EquivalenceReport:
    G = G or D.graph
    failures = []
    omega_bar = set(G.host_ids)
    boundary = set(G.host_ids[G.n_interior:])
    tri = [p.tag[0] for p in D.pieces if p.kind == "triangle"]
    quads = [tuple(sorted(p.tag)) for p in D.pieces if p.kind == "quad"]
    gons = [p.tag[0] for p in D.pieces if p.kind == "gon"]

    for h in sorted(omega_bar - set(tri)):
        failures.append(f"vertex {h}: missing shrunken triangle")
    for h in sorted(set(tri) - omega_bar):
        failures.append(f"triangle {h}: not a subgraph vertex")
    if len(tri) != len(set(tri)):
        failures.append("duplicate triangle pieces")

    edges = {tuple(sorted((G.host_ids[a], G.host_ids[b]))) for a, b in G.edges}
    for e in sorted(edges - set(quads)):
        failures.append(f"edge {e}: missing quadrilateral (cobblestones not adjacent)")
    for e in sorted(set(quads) - edges):
        failures.append(f"quadrilateral {e}: cobblestones adjacent without a subgraph edge")
    if len(quads) != len(set(quads)):
        failures.append("duplicate quadrilateral pieces")

    # quadrilaterals must glue to the two triangles they connect
    for p in D.pieces:
        if p.kind != "quad":
            continue
        for (h, lab), z in zip(p.keys, p.vertices):
            if h not in D.shrunk or abs(D.shrunk[h][lab] - z) > 1e-12:
                failures.append(f"quadrilateral {tuple(sorted(p.tag))}: corner {(h, lab)} detached")

    want_gons = expected_cycle_gons(G, D.host)
    for v in sorted(want_gons - set(gons)):
        failures.append(f"tiling vertex {v}: missing cycle polygon")
    for v in sorted(set(gons) - want_gons):
        failures.append(f"tiling vertex {v}: unexpected cycle polygon")

    centers = set(D.removed_balls)
    for h in sorted(boundary - centers):
        failures.append(f"boundary vertex {h}: no removed ball")
    for h in sorted(centers - boundary):
        failures.append(f"removed ball at {h}: not a boundary vertex")
    circle_curves = {c.primitives[0].host for c in D.curves if c.kind == "circle"}
    for h in sorted(boundary - circle_curves):
        failures.append(f"boundary vertex {h}: no boundary circle")
    for h, c in D.removed_balls.items():
        if h not in D.shrunk:
            continue
        if abs(c.center.z - D.host.positions[h]) > 1e-12:
            failures.append(f"removed ball at {h}: center is not the vertex")
        zs = D.shrunk[h]
        gap = min(distance_to_segment(c.center.z, zs[i], zs[(i + 1) % 3]) for i in range(3))
        if not gap > c.radius:
            failures.append(f"removed ball at {h}: leaves its shrunken triangle")

    counts = {
        "triangles": len(tri), "quadrilaterals": len(quads), "cycle_gons": len(gons),
        "vertices": len(omega_bar), "edges": len(edges), "boundary": len(boundary),
        "removed_balls": len(centers),
    }
    return EquivalenceReport(failures, counts)
