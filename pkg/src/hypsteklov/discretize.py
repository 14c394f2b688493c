"""Epsilon-nets of the domain, the discretization graph and the cobblestone map.

Sampling happens in the hyperbolic metric. The collar next to the boundary is
realized by pairing every boundary sample with a copy pushed inward along the
normal, at depth 4*eps, or at half the inward exit distance where the domain
is thinner than 8*eps.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import shapely
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path
from scipy.spatial import cKDTree

from .domain import DomainModel
from .graphcore import GraphWithBoundary
from .hypgeo import DiskPoint, HypIsometry, conformal_factor, dist_array, distance_to_segment, to_klein
from .tiling import fit_rough_isometry

QUANT = 1e-9
COLLAR_DEPTH = 4.0
EDGE_FACTOR = 3.0
CANDIDATE_FRACTION = 0.1
PAIR_CAP = 20_000_000


class DiscretizationError(RuntimeError):
    pass


# -- epsilon nets ----------------------------------------------------------

def _euclid_bound(eps: float) -> float:
    # |z - w| = sinh(d/2) sqrt((1-|z|^2)(1-|w|^2)) <= sinh(d/2)
    return math.sinh(eps / 2.0) * (1.0 + 1e-12) + 1e-15


def _lex_order(z: np.ndarray) -> np.ndarray:
    qx = np.round(z.real / QUANT).astype(np.int64)
    qy = np.round(z.imag / QUANT).astype(np.int64)
    return np.lexsort((qy, qx))


def greedy_net(z: np.ndarray, eps: float, preselected: np.ndarray | None = None) -> np.ndarray:
    """Indices of a maximal eps-separated subset of ``z`` (greedy, lexicographic order).

    Candidates within eps of a preselected point are dropped first.
    """
    z = np.asarray(z, dtype=complex)
    if z.size == 0:
        return np.zeros(0, dtype=int)
    xy = np.column_stack([z.real, z.imag])
    tree = cKDTree(xy)
    r = _euclid_bound(eps)
    dead = np.zeros(len(z), dtype=bool)

    def suppress(w: complex):
        idx = np.asarray(tree.query_ball_point([w.real, w.imag], r), dtype=int)
        if idx.size:
            near = idx[dist_array(z[idx], w) <= eps]
            dead[near] = True

    if preselected is not None:
        for w in np.asarray(preselected, dtype=complex):
            suppress(complex(w))
    chosen = []
    for i in _lex_order(z):
        if dead[i]:
            continue
        chosen.append(i)
        suppress(complex(z[i]))
    return np.array(sorted(chosen), dtype=int)


def maximal_separated_subset(candidates, eps: float) -> list[DiskPoint]:
    if eps <= 0:
        raise ValueError("eps must be positive")
    pts = [c if isinstance(c, DiskPoint) else DiskPoint.from_complex(complex(c)) for c in candidates]
    if not pts:
        raise ValueError("no candidates to sample from")
    z = np.array([p.z for p in pts], dtype=complex)
    idx = greedy_net(z, eps)
    return [pts[i] for i in _lex_sorted(idx, z)]


def _lex_sorted(idx, z):
    sub = z[idx]
    return [idx[j] for j in _lex_order(sub)]


# -- distance to the boundary -----------------------------------------------

def _prim_bbox(prim, pad: float):
    if prim.kind == "circle":
        pts = prim.points(np.linspace(0, 1, 64, endpoint=False))
    else:
        pts = prim.points(np.linspace(0, 1, 33))
    return (pts.real.min() - pad, pts.real.max() + pad, pts.imag.min() - pad, pts.imag.max() + pad)


def distance_to_boundary(D: DomainModel, z: np.ndarray, cutoff: float) -> np.ndarray:
    """min(d(z, Sigma), cutoff) computed exactly for points closer than ``cutoff``."""
    z = np.asarray(z, dtype=complex)
    out = np.full(z.shape, cutoff)
    pad = _euclid_bound(2.0 * cutoff)
    for prim in D.primitives():
        x0, x1, y0, y1 = _prim_bbox(prim, pad)
        m = (z.real >= x0) & (z.real <= x1) & (z.imag >= y0) & (z.imag <= y1)
        if np.any(m):
            out[m] = np.minimum(out[m], prim.distance(z[m]))
    return out


# -- candidates ------------------------------------------------------------

def boundary_candidates(D: DomainModel, spacing: float):
    """Arc-length samples of every boundary curve: points, inward normals, primitive index."""
    pts, nrm, src = [], [], []
    for j, prim in enumerate(D.primitives()):
        p, n = prim.sample(spacing)
        pts.append(p)
        nrm.append(n)
        src.append(np.full(len(p), j))
    return np.concatenate(pts), np.concatenate(nrm), np.concatenate(src)


def _piece_grid(piece, spacing: float) -> np.ndarray:
    """Grid of roughly uniform hyperbolic spacing covering one piece, clipped to it."""
    zs = np.array(piece.vertices)
    c = complex(np.mean(to_klein(zs)))
    c = c / (1.0 + math.sqrt(max(0.0, 1.0 - abs(c) ** 2)))  # Klein centroid -> Poincare
    T = HypIsometry.to_origin(c)
    w = T.apply(zs)
    R = float(np.max(np.abs(w))) * 1.05 + 1e-9
    h = spacing / float(conformal_factor(R))
    n = int(math.ceil(R / h))
    g = np.arange(-n, n + 1) * h
    X, Y = np.meshgrid(g, g)
    cand = (X + 1j * Y).ravel()
    cand = cand[np.abs(cand) <= R]
    pts = T.inverse().apply(cand)
    k = to_klein(pts)
    inside = shapely.contains_xy(piece.klein_polygon(), k.real, k.imag)
    return pts[inside]


def interior_candidates(D: DomainModel, eps: float, spacing: float) -> np.ndarray:
    band = COLLAR_DEPTH * eps
    out = []
    for piece in D.pieces:
        pts = _piece_grid(piece, spacing)
        for c in D.removed_balls.values():
            pts = pts[dist_array(pts, c.center.z) > c.radius]
        if pts.size:
            pts = pts[distance_to_boundary(D, pts, band * 1.5) > band]
        out.append(pts)
    return np.concatenate(out) if out else np.zeros(0, dtype=complex)


def _inward_exit(D: DomainModel, x: np.ndarray, u: np.ndarray, step: float, max_dist: float) -> np.ndarray:
    """Distance along the inward normal until the ray leaves the domain (capped)."""
    ks = np.arange(2, int(math.ceil(max_dist / step)) + 1)
    s = ks * step
    Tinv = [HypIsometry.to_origin(complex(xi)).inverse() for xi in x]
    ray = np.empty((len(x), len(s)), dtype=complex)
    th = np.tanh(s / 2.0)
    for i, (T, ui) in enumerate(zip(Tinv, u)):
        ray[i] = T.apply(th * ui)
    inside = D.contains(ray.ravel()).reshape(ray.shape)
    exit_ = np.full(len(x), max_dist)
    out = ~inside
    has = out.any(axis=1)
    exit_[has] = s[out[has].argmax(axis=1)]
    return exit_


# -- the graph -------------------------------------------------------------

@dataclass(frozen=True)
class DiscretizationGraph:
    epsilon: float
    boundary: np.ndarray  # V_Sigma
    boundary_source: np.ndarray  # primitive index per V_Sigma point
    copies: np.ndarray  # V'_Sigma, copies[i] pairs with boundary[i]
    copy_depth: np.ndarray
    extra: np.ndarray  # V_I minus the copies
    graph: GraphWithBoundary  # interior = copies then extra, boundary = V_Sigma

    @property
    def n_boundary(self) -> int:
        return len(self.boundary)

    @property
    def interior(self) -> np.ndarray:
        return np.concatenate([self.copies, self.extra])

    @property
    def positions(self) -> np.ndarray:
        return np.concatenate([self.copies, self.extra, self.boundary])

    def partner(self, i: int) -> int:
        """Graph index of the collar copy paired with V_Sigma point i."""
        return i

    def boundary_index(self, i: int) -> int:
        return self.graph.n_interior + i

    def to_dict(self) -> dict:
        pos = self.positions
        roles = ["collar"] * len(self.copies) + ["interior"] * len(self.extra) + ["boundary"] * len(self.boundary)
        return {
            "format": "hypsteklov.discretization",
            "version": 1,
            "epsilon": self.epsilon,
            "positions": [[float(z.real), float(z.imag)] for z in pos],
            "roles": roles,
            "edges": [list(e) for e in self.graph.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def build_discretization(D: DomainModel, eps: float, allow_large: bool = False) -> DiscretizationGraph:
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps > D.constants.epsilon_max * (1 + 1e-12) and not allow_large:
        raise DiscretizationError(
            f"epsilon {eps:.4g} exceeds eps_max = rho/4 = {D.constants.epsilon_max:.4g}")
    if not D.pieces or not D.curves:
        raise DiscretizationError("degenerate domain")
    spacing = CANDIDATE_FRACTION * eps

    bpts, bnrm, bsrc = boundary_candidates(D, spacing)
    keep = greedy_net(bpts, eps)
    keep = np.array(_lex_sorted(keep, bpts), dtype=int)
    vs, vn, vsrc = bpts[keep], bnrm[keep], bsrc[keep]

    depth_cap = COLLAR_DEPTH * eps
    exit_ = _inward_exit(D, vs, vn, spacing, 2.0 * depth_cap)
    depth = np.minimum(depth_cap, exit_ / 2.0)
    copies = np.array([HypIsometry.to_origin(complex(x)).inverse().apply(math.tanh(d / 2.0) * u)
                       for x, u, d in zip(vs, vn, depth)], dtype=complex)

    icand = interior_candidates(D, eps, spacing)
    sel = greedy_net(icand, eps, preselected=copies)
    extra = icand[np.array(_lex_sorted(sel, icand), dtype=int)] if sel.size else np.zeros(0, dtype=complex)

    ni = len(copies) + len(extra)
    pos = np.concatenate([copies, extra, vs])
    tree = cKDTree(np.column_stack([pos.real, pos.imag]))
    pairs = tree.query_pairs(_euclid_bound(EDGE_FACTOR * eps), output_type="ndarray")
    if len(pairs):
        d = dist_array(pos[pairs[:, 0]], pos[pairs[:, 1]])
        pairs = pairs[d <= EDGE_FACTOR * eps]
    pairing = np.column_stack([np.arange(len(vs)), ni + np.arange(len(vs))])
    allp = np.vstack([pairs.reshape(-1, 2), pairing])
    allp = np.sort(allp, axis=1)
    allp = np.unique(allp, axis=0)
    n = len(pos)
    A = csr_matrix((np.ones(len(allp)), (allp[:, 0], allp[:, 1])), shape=(n, n))
    ncomp, _ = connected_components(A, directed=False)
    if ncomp != 1:
        raise DiscretizationError(f"epsilon too large: discretization graph has {ncomp} components")
    G = GraphWithBoundary(ni, len(vs), tuple(map(tuple, allp.tolist())))
    return DiscretizationGraph(eps, vs, vsrc, copies, depth, extra, G)


def boundary_maximality_defect(D: DomainModel, dg: DiscretizationGraph) -> float:
    """Largest distance from a boundary probe point to V_Sigma, in units of eps.

    Probes are offset from the candidate samples by half a step.
    """
    spacing = CANDIDATE_FRACTION * dg.epsilon
    worst = 0.0
    tree = cKDTree(np.column_stack([dg.boundary.real, dg.boundary.imag]))
    for prim in D.primitives():
        n = max(1, int(math.ceil(prim.length / spacing)))
        probe = prim.points((np.arange(n) + 0.5) / n)
        # a few Euclidean neighbours suffice since the metric is conformal and slowly varying here
        k = min(8, len(dg.boundary))
        _, idx = tree.query(np.column_stack([probe.real, probe.imag]), k=k)
        idx = np.atleast_2d(idx.reshape(len(probe), -1))
        d = dist_array(probe[:, None], dg.boundary[idx]).min(axis=1)
        worst = max(worst, float(d.max()))
    return worst / dg.epsilon


# -- cobblestone map -------------------------------------------------------

@dataclass(frozen=True)
class CobblestoneMap:
    image: np.ndarray  # local target index (in G) for every source vertex (in dg.graph order)
    unplaced: int  # vertices outside every piece, assigned to the nearest piece

    def is_surjective(self, n_target: int) -> bool:
        return len(np.unique(self.image)) == n_target


def _piece_owner(piece, interior: set, host_adj) -> int:
    if piece.kind == "triangle":
        w = piece.tag[0]
        if w in interior:
            return w
        cands = [x for x in host_adj[w] if x in interior]
        if not cands:
            raise DiscretizationError(f"boundary vertex {w} has no interior neighbour")
        return min(cands)
    if piece.kind == "quad":
        ins = [h for h in piece.tag if h in interior]
        if not ins:
            raise DiscretizationError(f"quadrilateral {piece.tag} joins two boundary vertices")
        return min(ins)
    ins = sorted({k[0] for k in piece.keys if k[0] in interior})
    if not ins:
        raise DiscretizationError(f"cycle polygon {piece.tag} has no interior center")
    return ins[0]


def cobblestone_map(dg: DiscretizationGraph, D: DomainModel, G: GraphWithBoundary | None = None) -> CobblestoneMap:
    G = G or D.graph
    local = G.local_index()
    interior = set(G.host_ids[: G.n_interior])
    bhosts = list(G.host_ids[G.n_interior:])
    prims = list(D.primitives())

    # interior vertices: the piece containing the point decides
    zi = dg.interior
    polys = [p.klein_polygon() for p in D.pieces]
    owners = np.array([_piece_owner(p, interior, D.host.adjacency) for p in D.pieces])
    tree = shapely.STRtree(polys)
    k = to_klein(zi)
    geoms = shapely.points(k.real, k.imag)
    hit_src, hit_piece = tree.query(geoms, predicate="intersects")
    piece_of = np.full(len(zi), -1)
    # first hit in piece order for points on shared edges
    order = np.lexsort((hit_piece, hit_src))
    hit_src, hit_piece = hit_src[order], hit_piece[order]
    first = np.ones(len(hit_src), dtype=bool)
    first[1:] = hit_src[1:] != hit_src[:-1]
    piece_of[hit_src[first]] = hit_piece[first]
    miss = np.flatnonzero(piece_of < 0)
    if miss.size:
        piece_of[miss] = tree.query_nearest(geoms[miss], all_matches=False)[1]
    img_i = np.array([local[h] for h in owners[piece_of]], dtype=int)

    # boundary vertices: removed-ball circles go to their center, the rest to the nearest boundary tile
    bz = dg.boundary
    img_b = np.empty(len(bz), dtype=int)
    tri_d = np.empty((len(bz), len(bhosts)))
    for j, h in enumerate(bhosts):
        zs = D.shrunk[h]
        tri_d[:, j] = np.min([distance_to_segment(bz, zs[m], zs[(m + 1) % 3]) for m in range(3)], axis=0)
    nearest = np.argmin(tri_d, axis=1)
    for i, s in enumerate(dg.boundary_source):
        prim = prims[s]
        if prim.kind == "circle":
            img_b[i] = local[prim.host]
        else:
            img_b[i] = local[bhosts[nearest[i]]]
    if img_i.size and img_i.max() >= G.n_interior:
        raise DiscretizationError("interior sample mapped to a boundary vertex")
    return CobblestoneMap(np.concatenate([img_i, img_b]), int(miss.size))


# -- rough isometry constants ----------------------------------------------

@dataclass(frozen=True)
class RoughIsometryReport:
    C1: float
    C2: float
    C3: float
    witness_pairs: tuple  # ((v1, v2) attaining the lower bound, (v1, v2) attaining the upper bound)
    boundary_C1: float
    boundary_C2: float
    boundary_C3: float
    n_pairs: int
    sampled: bool

    def to_dict(self) -> dict:
        return {
            "C1": self.C1, "C2": self.C2, "C3": self.C3,
            "witness_pairs": [list(map(int, p)) for p in self.witness_pairs],
            "boundary": {"C1": self.boundary_C1, "C2": self.boundary_C2, "C3": self.boundary_C3},
            "n_pairs": self.n_pairs,
            "sampled": self.sampled,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


CHUNK = 256


class _PairTable:
    """Distinct (source distance, target distance) pairs with one witness each."""

    def __init__(self, m: int):
        self.m = m
        self.codes = []
        self.u = []
        self.v = []
        self.count = 0

    def add(self, a: np.ndarray, b: np.ndarray, u: np.ndarray, v: np.ndarray) -> None:
        code = a.astype(np.int64) * self.m + b.astype(np.int64)
        code, first = np.unique(code, return_index=True)
        self.codes.append(code)
        self.u.append(u[first])
        self.v.append(v[first])
        self.count += a.size

    def finish(self):
        if not self.codes:
            return None
        code, first = np.unique(np.concatenate(self.codes), return_index=True)
        return (code // self.m).astype(float), (code % self.m).astype(float), \
            np.concatenate(self.u)[first], np.concatenate(self.v)[first]


def _fit(table: _PairTable):
    got = table.finish()
    if got is None:
        return 1.0, 0.0, ((0, 0), (0, 0))
    a, b, u, v = got
    C1, C2 = fit_rough_isometry(a, b)
    lo = a / C1 - b
    hi = b - C1 * a
    if lo.max() - C2 > 1e-9 or hi.max() - C2 > 1e-9:
        raise DiscretizationError("rough isometry constants fail their own re-check")
    i, j = int(np.argmax(lo)), int(np.argmax(hi))
    return C1, C2, ((int(u[i]), int(v[i])), (int(u[j]), int(v[j])))


def _cover_radius(dt: np.ndarray, image: np.ndarray, targets) -> float:
    img = np.unique(image)
    return float(np.max(np.min(dt[np.ix_(list(targets), img)], axis=1)))


def rough_isometry_constants(phi, source: GraphWithBoundary, target: GraphWithBoundary,
                             sample: bool = False, n_sources: int = 400, seed: int = 0,
                             cap: int = PAIR_CAP) -> RoughIsometryReport:
    """Smallest constants making the two-sided distance inequality hold on all checked pairs.

    Above ``cap`` pairs, distances are taken from ``n_sources`` random source vertices.
    """
    image = np.asarray(phi.image if isinstance(phi, CobblestoneMap) else phi, dtype=int)
    if len(image) != source.n:
        raise ValueError("map must be total on the source vertices")
    n = source.n
    n_pairs = n * (n - 1) // 2
    sampled = n_pairs > cap
    if sampled and not sample:
        raise DiscretizationError(f"{n_pairs} pairs exceed the cap {cap}; pass sample=True")
    dt = target.distances()
    A = source.adjacency_matrix()
    if sampled:
        rng = np.random.default_rng(seed)
        srcs = np.sort(rng.choice(n, size=min(n_sources, n), replace=False))
    else:
        srcs = np.arange(n)
    bcols = np.arange(source.n_interior, n)
    m = int(dt.max()) + 1
    full, bnd = _PairTable(m), _PairTable(m)
    cols = np.arange(n)
    for start in range(0, len(srcs), CHUNK):
        rows = srcs[start:start + CHUNK]
        ds = shortest_path(A, method="D", unweighted=True, directed=False, indices=rows)
        dtr = dt[image[rows]]
        b = dtr[:, image]
        U = np.broadcast_to(rows[:, None], ds.shape)
        V = np.broadcast_to(cols[None, :], ds.shape)
        full.add(ds.ravel(), b.ravel(), U.ravel(), V.ravel())
        rb = rows >= source.n_interior
        if np.any(rb):
            sub = np.ix_(np.flatnonzero(rb), bcols)
            bnd.add(ds[sub].ravel(), b[sub].ravel(), U[sub].ravel(), V[sub].ravel())
    C1, C2, wit = _fit(full)
    bC1, bC2, _ = _fit(bnd)
    C3 = _cover_radius(dt, image, range(target.n))
    bC3 = _cover_radius(dt, image[bcols], target.boundary)
    return RoughIsometryReport(C1, C2, C3, wit, bC1, bC2, bC3, int(full.count), bool(sampled))
