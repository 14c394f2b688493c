"""Reflection tilings by (pi/p, pi/q, pi/r) triangles and their dual host graphs."""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .hypgeo import (
    DiskPoint,
    GeometryError,
    HypIsometry,
    HypTriangle,
    check_hyperbolic,
    dist_c,
    incenter_and_inradius,
    reflection,
    triangle_from_angles,
)

GRID = 1e-7
TAU_DEDUP = 1e-6
DEFAULT_DEPTH_CAP = 9
FORMAT_VERSION = 1


class TilingError(ValueError):
    pass


def quantize(z: complex) -> tuple[int, int]:
    return (int(round(z.real / GRID)), int(round(z.imag / GRID)))


class _CoarseIndex:
    """Dedup index on cells of size ``tol``; probing the 3x3 block is exhaustive."""

    def __init__(self, tol: float):
        self.tol = tol
        self.cell = tol
        self._cells: dict[tuple[int, int], list[tuple[complex, object]]] = {}

    def _key(self, z: complex):
        return (int(math.floor(z.real / self.cell)), int(math.floor(z.imag / self.cell)))

    def find(self, z: complex):
        i, j = self._key(z)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                for w, key in self._cells.get((i + di, j + dj), ()):
                    # Euclidean distance never exceeds half the hyperbolic one in the disk
                    if abs(z - w) < self.tol and dist_c(z, w) < self.tol:
                        return key
        return None

    def add(self, z: complex, key) -> None:
        self._cells.setdefault(self._key(z), []).append((z, key))


@dataclass(frozen=True)
class Tile:
    id: int
    triangle: HypTriangle
    incenter: DiskPoint
    isometry: HypIsometry
    depth: int


@dataclass
class Tiling:
    p: int
    q: int
    r: int
    max_depth: int
    seed: HypTriangle
    seed_incenter: DiskPoint
    seed_inradius: float
    tiles: list[Tile]
    side_index: dict[tuple[int, int], list[int]]
    vertex_index: dict[int, list[int]] = field(default_factory=dict)
    vertex_pos: dict[int, complex] = field(default_factory=dict)
    vertex_label: dict[int, int] = field(default_factory=dict)
    tile_vertices: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def orders(self) -> tuple[int, int, int]:
        return (self.p, self.q, self.r)

    def counts_by_depth(self) -> list[int]:
        out = [0] * (self.max_depth + 1)
        for t in self.tiles:
            out[t.depth] += 1
        return out


def _tile_sides(tri: HypTriangle):
    zs = tri.zs
    # side k is opposite vertex k: endpoints (k+1, k+2)
    return [((k + 1) % 3, (k + 2) % 3, zs[(k + 1) % 3], zs[(k + 2) % 3]) for k in range(3)]


def generate_tiling(p: int, q: int, r: int, max_depth: int, depth_cap: int = DEFAULT_DEPTH_CAP) -> Tiling:
    """Breadth-first reflection tiling up to ``max_depth`` side reflections from the seed."""
    try:
        check_hyperbolic(p, q, r)
    except GeometryError as e:
        raise TilingError(str(e)) from e
    if max_depth < 0:
        raise TilingError("max_depth must be >= 0")
    if max_depth > depth_cap:
        raise TilingError(f"max_depth {max_depth} exceeds depth cap {depth_cap}")

    seed = triangle_from_angles(p, q, r)
    inc, rho = incenter_and_inradius(seed)
    seed_mirrors = [reflection(a, b) for (_, _, a, b) in _tile_sides(seed)]

    index = _CoarseIndex(TAU_DEDUP)
    tiles: list[Tile] = []

    def make(iso: HypIsometry, depth: int) -> Tile:
        return Tile(len(tiles), seed.moved(iso), iso(inc), iso, depth)

    first = make(HypIsometry.identity(), 0)
    tiles.append(first)
    index.add(first.incenter.z, first.id)
    frontier = deque([first])
    while frontier:
        t = frontier.popleft()
        if t.depth >= max_depth:
            continue
        for k in range(3):
            # reflecting tile t across its side k equals t.isometry o (seed mirror k)
            iso = t.isometry @ seed_mirrors[k]
            c = iso(inc).z
            if index.find(c) is not None:
                continue
            nt = make(iso, t.depth + 1)
            tiles.append(nt)
            index.add(c, nt.id)
            frontier.append(nt)

    vindex = _CoarseIndex(TAU_DEDUP)
    vertex_index: dict[int, list[int]] = {}
    vertex_pos: dict[int, complex] = {}
    vertex_label: dict[int, int] = {}
    tile_vertices = []
    for t in tiles:
        ids = []
        for lab, z in enumerate(t.triangle.zs):
            vid = vindex.find(z)
            if vid is None:
                vid = len(vertex_pos)
                vindex.add(z, vid)
                vertex_pos[vid] = z
                vertex_label[vid] = lab
            elif vertex_label[vid] != lab:
                raise TilingError(f"tiling vertex {vid} carries two angle labels")
            vertex_index.setdefault(vid, []).append(t.id)
            ids.append(vid)
        tile_vertices.append(tuple(ids))

    # a side is keyed by its two deduplicated endpoint ids
    side_index: dict[tuple[int, int], list[int]] = {}
    for t in tiles:
        ids = tile_vertices[t.id]
        for k in range(3):
            a, b = ids[(k + 1) % 3], ids[(k + 2) % 3]
            side_index.setdefault((min(a, b), max(a, b)), []).append(t.id)

    for key, ids in side_index.items():
        if len(ids) > 2:
            raise TilingError(f"side {key} shared by {len(ids)} tiles (overlap)")
    return Tiling(p, q, r, max_depth, seed, inc, rho, tiles, side_index,
                  vertex_index, vertex_pos, vertex_label, tile_vertices)


@dataclass
class HostGraph:
    tiling: Tiling
    positions: np.ndarray  # complex incenters, indexed by tile id
    adjacency: list[list[int]]
    depth_of: list[int]

    @property
    def n(self) -> int:
        return len(self.adjacency)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nb in enumerate(self.adjacency) for v in nb if u < v]

    @property
    def max_depth(self) -> int:
        return self.tiling.max_depth

    @property
    def trusted_depth(self) -> int:
        return self.tiling.max_depth - 1

    def is_trusted(self, v: int) -> bool:
        return self.depth_of[v] <= self.trusted_depth

    def neighbors(self, v: int) -> list[int]:
        return self.adjacency[v]

    def bfs(self, source: int, limit: int | None = None) -> dict[int, int]:
        dist = {source: 0}
        dq = deque([source])
        while dq:
            u = dq.popleft()
            if limit is not None and dist[u] >= limit:
                continue
            for w in self.adjacency[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    dq.append(w)
        return dist

    def shared_side(self, u: int, v: int) -> tuple[int, int]:
        """Labels (i, j), i < j, of the tiling side shared by adjacent tiles u and v."""
        tu, tv = self.tiling.tile_vertices[u], self.tiling.tile_vertices[v]
        common = [lab for lab in range(3) if tu[lab] in tv]
        if len(common) != 2:
            raise TilingError(f"tiles {u} and {v} are not adjacent")
        return common[0], common[1]


def build_host_graph(t: Tiling) -> HostGraph:
    adj: list[set[int]] = [set() for _ in t.tiles]
    for ids in t.side_index.values():
        if len(ids) == 2:
            a, b = ids
            adj[a].add(b)
            adj[b].add(a)
    positions = np.array([tile.incenter.z for tile in t.tiles], dtype=complex)
    return HostGraph(t, positions, [sorted(s) for s in adj], [tile.depth for tile in t.tiles])


def fit_rough_isometry(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Constants (C1 >= 1, C2 >= 0) with C1^-1 a - C2 <= b <= C1 a + C2 on all pairs.

    For a given C1 the additive constant is forced; C1 is chosen to minimize C1 + C2.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0:
        return 1.0, 0.0

    def c2(c1):
        return max(0.0, float(np.max(a / c1 - b)), float(np.max(b - c1 * a)))

    # objective is convex in c1; breakpoints are where c1 is slope-like ratios
    from scipy.optimize import minimize_scalar

    pos = a > 0
    hi = 1.0
    if np.any(pos):
        hi = max(hi, float(np.max(b[pos] / a[pos])), float(np.max(a[pos] / np.maximum(b[pos], 1e-12))))
    hi = min(hi, 1e6)
    best_c1 = 1.0
    best = 1.0 + c2(1.0)
    if hi > 1.0:
        res = minimize_scalar(lambda c: c + c2(c), bounds=(1.0, hi), method="bounded",
                              options={"xatol": 1e-10})
        if res.fun < best - 1e-12:
            best_c1 = float(res.x)
    return best_c1, c2(best_c1)


def embedding_rough_isometry_check(g: HostGraph, sample_size: int, seed: int = 0):
    """Fit constants for the inclusion of trusted host vertices into the disk.

    Returns (C1, C2, C3); C3 is the covering radius bound given by the tile diameter.
    """
    trusted = [v for v in range(g.n) if g.is_trusted(v)]
    rng = np.random.default_rng(seed)
    n = len(trusted)
    all_pairs = n * (n - 1) // 2
    if all_pairs <= sample_size:
        pairs = [(trusted[i], trusted[j]) for i in range(n) for j in range(i + 1, n)]
    else:
        idx = rng.integers(0, n, size=(sample_size, 2))
        pairs = [(trusted[i], trusted[j]) for i, j in idx if i != j]
    dg_cache: dict[int, dict[int, int]] = {}
    a, b = [], []
    for u, v in pairs:
        if u not in dg_cache:
            dg_cache[u] = g.bfs(u)
        a.append(dg_cache[u][v])
        b.append(dist_c(g.positions[u], g.positions[v]))
    c1, c2 = fit_rough_isometry(np.array(a), np.array(b))
    return c1, c2, g.tiling.seed.diameter


# -- serialization ----------------------------------------------------------

def tiling_to_dict(t: Tiling, g: HostGraph | None = None) -> dict:
    g = g or build_host_graph(t)
    return {
        "format": "hypsteklov.tiling",
        "version": FORMAT_VERSION,
        "p": t.p, "q": t.q, "r": t.r,
        "max_depth": t.max_depth,
        "tiles": [
            {
                "id": tile.id,
                "depth": tile.depth,
                "incenter": [tile.incenter.x, tile.incenter.y],
                "vertices": [[v.x, v.y] for v in tile.triangle.vertices],
            }
            for tile in t.tiles
        ],
        "edges": [list(e) for e in g.edges],
    }


def tiling_to_json(t: Tiling, g: HostGraph | None = None) -> str:
    return json.dumps(tiling_to_dict(t, g), indent=1)


def host_graph_from_dict(d: dict) -> tuple[Tiling, HostGraph]:
    """Rebuild from a serialized document by regenerating and cross-checking positions."""
    if d.get("format") != "hypsteklov.tiling":
        raise TilingError("not a tiling document")
    if d.get("version") != FORMAT_VERSION:
        raise TilingError(f"unsupported tiling format version {d.get('version')}")
    t = generate_tiling(d["p"], d["q"], d["r"], d["max_depth"])
    g = build_host_graph(t)
    if len(t.tiles) != len(d["tiles"]):
        raise TilingError("tile count mismatch with regenerated tiling")
    for rec in d["tiles"]:
        z = complex(*rec["incenter"])
        if abs(z - g.positions[rec["id"]]) > 1e-9:
            raise TilingError(f"tile {rec['id']} position mismatch")
    if sorted(map(tuple, d["edges"])) != sorted(g.edges):
        raise TilingError("edge list mismatch")
    return t, g
