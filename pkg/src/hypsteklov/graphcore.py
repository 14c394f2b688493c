"""Finite graphs with boundary and subgraphs of a host graph."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .tiling import HostGraph


class SubgraphError(ValueError):
    pass


@dataclass(frozen=True)
class GraphWithBoundary:
    """Vertices ``0..n_interior-1`` are interior, the rest are boundary.

    ``host_ids`` maps local indices back to host vertex ids when the graph was
    induced from a host graph.
    """

    n_interior: int
    n_boundary: int
    edges: tuple[tuple[int, int], ...]
    host_ids: tuple[int, ...] | None = None

    def __post_init__(self):
        n = self.n
        if self.n_boundary < 1:
            raise SubgraphError("boundary must be nonempty")
        seen = set()
        for u, v in self.edges:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise SubgraphError(f"invalid edge {(u, v)}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise SubgraphError(f"duplicate edge {key}")
            seen.add(key)
        ncomp, _ = connected_components(self.adjacency_matrix(), directed=False)
        if ncomp != 1:
            raise SubgraphError("graph with boundary must be connected")

    @property
    def n(self) -> int:
        return self.n_interior + self.n_boundary

    @property
    def interior(self) -> range:
        return range(self.n_interior)

    @property
    def boundary(self) -> range:
        return range(self.n_interior, self.n)

    def is_boundary(self, i: int) -> bool:
        return i >= self.n_interior

    def adjacency_matrix(self) -> csr_matrix:
        n = self.n
        if not self.edges:
            return csr_matrix((n, n))
        e = np.array(self.edges, dtype=int)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))

    def neighbor_lists(self) -> list[list[int]]:
        nb: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].append(v)
            nb[v].append(u)
        return nb

    def local_index(self) -> dict[int, int]:
        if self.host_ids is None:
            raise SubgraphError("graph has no host back-references")
        return {h: i for i, h in enumerate(self.host_ids)}

    def distances(self) -> np.ndarray:
        """All-pairs hop distances in (vertices, edges)."""
        return shortest_path(self.adjacency_matrix(), method="D", unweighted=True, directed=False)

    def to_dict(self) -> dict:
        return {
            "format": "hypsteklov.graph",
            "version": 1,
            "roles": ["interior"] * self.n_interior + ["boundary"] * self.n_boundary,
            "edges": [list(e) for e in self.edges],
            "host_ids": list(self.host_ids) if self.host_ids is not None else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> "GraphWithBoundary":
        roles = d["roles"]
        ni = roles.count("interior")
        if roles != ["interior"] * ni + ["boundary"] * (len(roles) - ni):
            raise SubgraphError("roles must list interior vertices first")
        hosts = tuple(d["host_ids"]) if d.get("host_ids") is not None else None
        return cls(ni, len(roles) - ni, tuple(tuple(e) for e in d["edges"]), hosts)


def _connected(host: HostGraph, vertices: set[int]) -> bool:
    start = next(iter(vertices))
    seen = {start}
    dq = deque([start])
    while dq:
        u = dq.popleft()
        for w in host.adjacency[u]:
            if w in vertices and w not in seen:
                seen.add(w)
                dq.append(w)
    return len(seen) == len(vertices)


def induce_subgraph(host: HostGraph, interior: Iterable[int]) -> GraphWithBoundary:
    """Graph with boundary induced by a connected set of host vertices."""
    omega = set(int(v) for v in interior)
    if not omega:
        raise SubgraphError("interior must be nonempty")
    for v in omega:
        if not (0 <= v < host.n):
            raise SubgraphError(f"vertex {v} is not in the host graph")
    if not _connected(host, omega):
        raise SubgraphError("interior is not connected in the host graph")
    boundary = {w for v in omega for w in host.adjacency[v] if w not in omega}
    for v in omega | boundary:
        if not host.is_trusted(v):
            raise SubgraphError(
                f"vertex {v} (depth {host.depth_of[v]}) lies beyond trusted depth {host.trusted_depth}; "
                "generate a deeper tiling")
    order = sorted(omega) + sorted(boundary)
    local = {h: i for i, h in enumerate(order)}
    edges = set()
    for v in omega:
        for w in host.adjacency[v]:
            if w in local:
                a, b = local[v], local[w]
                edges.add((min(a, b), max(a, b)))
    return GraphWithBoundary(len(omega), len(boundary), tuple(sorted(edges)), tuple(order))


def ball(host: HostGraph, center: int, radius: int) -> set[int]:
    if radius < 0:
        raise SubgraphError("radius must be >= 0")
    return set(host.bfs(center, limit=radius))


def ball_subgraph(host: HostGraph, center: int, radius: int) -> GraphWithBoundary:
    return induce_subgraph(host, ball(host, center, radius))


def punctured_ball(host: HostGraph, center: int, radius: int, removed: int) -> GraphWithBoundary:
    """Ball minus one vertex; the removed vertex becomes an (isolated-looking) boundary vertex."""
    omega = ball(host, center, radius)
    if removed not in omega:
        raise SubgraphError(f"vertex {removed} is not inside the ball")
    omega.discard(removed)
    if not omega:
        raise SubgraphError("puncturing leaves an empty interior")
    if not _connected(host, omega):
        raise SubgraphError("interior becomes disconnected after removal")
    return induce_subgraph(host, omega)


def graph_distance(G: GraphWithBoundary, u: int, v: int) -> int:
    if u == v:
        return 0
    nb = G.neighbor_lists()
    dist = {u: 0}
    dq = deque([u])
    while dq:
        x = dq.popleft()
        for y in nb[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                if y == v:
                    return dist[y]
                dq.append(y)
    raise SubgraphError("vertices are not connected")


def host_distance(host: HostGraph, u: int, v: int) -> int:
    d = host.bfs(u).get(v)
    if d is None:
        raise SubgraphError("vertices are not connected in the host graph")
    return d


def path_graph() -> GraphWithBoundary:
    """b1 - i - b2."""
    return GraphWithBoundary(1, 2, ((0, 1), (0, 2)))


def star_graph(leaves: int = 3) -> GraphWithBoundary:
    """K_{1,leaves} with the center as the only interior vertex."""
    return GraphWithBoundary(1, leaves, tuple((0, k) for k in range(1, leaves + 1)))
