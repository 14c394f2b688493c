"""Independent enumerations shared by several test modules."""
import itertools

import numpy as np

from hypsteklov.graphcore import SubgraphError, ball, induce_subgraph
from hypsteklov.hypgeo import incenter_and_inradius, triangle_from_angles
from hypsteklov.tiling import build_host_graph, generate_tiling


def small_subgraph_family(max_size: int = 12):
    """Balls of radius <= 1 in the depth-4 (2,3,7) host and their single interior deletions."""
    host = build_host_graph(generate_tiling(2, 3, 7, 4))
    seen = {}
    for c in range(host.n):
        for radius in (0, 1):
            try:
                omega = ball(host, c, radius)
                bases = [omega] + [omega - {v} for v in omega if len(omega) > 1]
            except SubgraphError:
                continue
            for om in bases:
                key = frozenset(om)
                if key in seen:
                    continue
                try:
                    G = induce_subgraph(host, set(om))
                except SubgraphError:
                    continue
                if G.n <= max_size:
                    seen[key] = G
    return list(seen.values())


def circle_inversion_mirror(a: complex, b: complex):
    """Reflection in the geodesic through a, b done as Euclidean inversion (or line reflection)."""
    pts = [a, b, 1 / a.conjugate()] if abs(a) > 1e-12 else [b, 1 / b.conjugate(), None]
    if pts[2] is None or abs(((pts[1] - pts[0]).conjugate() * (pts[2] - pts[0])).imag) < 1e-14:
        u = (b - a) / abs(b - a) if abs(a) > 1e-12 else b / abs(b)
        return lambda z: u * (u.conjugate() * z).conjugate()
    M = np.array([[2 * (pts[1] - pts[0]).real, 2 * (pts[1] - pts[0]).imag],
                  [2 * (pts[2] - pts[0]).real, 2 * (pts[2] - pts[0]).imag]])
    rhs = np.array([abs(pts[1]) ** 2 - abs(pts[0]) ** 2, abs(pts[2]) ** 2 - abs(pts[0]) ** 2])
    cx, cy = np.linalg.solve(M, rhs)
    c = complex(cx, cy)
    R2 = abs(a - c) ** 2
    return lambda z: c + R2 / (z - c).conjugate()


def word_enumeration_count(p, q, r, length):
    T = triangle_from_angles(p, q, r)
    inc, _ = incenter_and_inradius(T)
    A = T.zs
    gens = [circle_inversion_mirror(A[(k + 1) % 3], A[(k + 2) % 3]) for k in range(3)]
    seen = set()
    for n in range(length + 1):
        for word in itertools.product(range(3), repeat=n):
            z = inc.z
            for k in reversed(word):
                z = gens[k](z)
            seen.add((round(z.real * 1e6), round(z.imag * 1e6)))
    return len(seen)
