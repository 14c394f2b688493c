import json

import pytest
from hypothesis import given, strategies as st

from hypsteklov.graphcore import (
    GraphWithBoundary,
    SubgraphError,
    ball,
    ball_subgraph,
    graph_distance,
    host_distance,
    induce_subgraph,
    path_graph,
    punctured_ball,
    star_graph,
)


def def13_check(host, G, omega):
    """Recompute B, E' and Omega-bar from the definition and compare."""
    B = {w for v in omega for w in host.adjacency[v] if w not in omega}
    bar = omega | B
    Ep = {tuple(sorted((v, w))) for v in omega for w in host.adjacency[v] if w in bar}
    hid = G.host_ids
    assert set(hid[: G.n_interior]) == omega
    assert set(hid[G.n_interior:]) == B
    assert {tuple(sorted((hid[a], hid[b]))) for a, b in G.edges} == Ep
    assert list(hid[: G.n_interior]) == sorted(omega)
    assert list(hid[G.n_interior:]) == sorted(B)


def test_single_vertex(host237):
    G = induce_subgraph(host237, {0})
    assert (G.n, G.n_boundary, len(G.edges)) == (4, 3, 3)


def test_radius_one_has_five_boundary_vertices(host237):
    for c in (0, 1, 5, 10):
        G = ball_subgraph(host237, c, 1)
        assert G.n_interior == 4 and G.n_boundary == 5


def test_radius_zero(host237):
    G = ball_subgraph(host237, 0, 0)
    assert G.n_interior == 1 and G.n_boundary == 3


def test_boundary_grows(host237):
    sizes = [ball_subgraph(host237, 0, r).n_boundary for r in range(7)]
    assert all(b > a for a, b in zip(sizes, sizes[1:]))


@pytest.mark.parametrize("radius", [0, 1, 2, 3, 4, 5])
def test_definition_equalities(host237, radius):
    omega = ball(host237, 0, radius)
    G = induce_subgraph(host237, omega)
    def13_check(host237, G, omega)
    nb = G.neighbor_lists()
    for i in G.boundary:
        assert any(not G.is_boundary(j) for j in nb[i])
    for i in G.interior:
        assert len(nb[i]) == 3
    for a, b in G.edges:
        assert not (G.is_boundary(a) and G.is_boundary(b))


@given(st.integers(0, 40), st.integers(1, 12), st.integers(0, 2**31))
def test_random_connected_subgraphs(host237, start, size, seed):
    import random
    rnd = random.Random(seed)
    omega = {start}
    while len(omega) < size:
        v = rnd.choice(sorted(omega))
        w = rnd.choice(host237.adjacency[v])
        if host237.depth_of[w] <= 5:
            omega.add(w)
        elif all(host237.depth_of[x] > 5 for x in host237.adjacency[v]):
            break
    if any(host237.depth_of[v] > 5 for v in omega):
        return
    G = induce_subgraph(host237, omega)
    def13_check(host237, G, omega)
    D = G.distances()
    n = G.n
    for _ in range(20):
        u, v, w = rnd.randrange(n), rnd.randrange(n), rnd.randrange(n)
        assert D[u, w] <= D[u, v] + D[v, w]
        assert graph_distance(G, u, v) == D[u, v] == graph_distance(G, v, u)


def test_errors(host237):
    with pytest.raises(SubgraphError):
        induce_subgraph(host237, set())
    a, b = 0, max(host237.bfs(0, 4), key=lambda v: host237.bfs(0)[v])
    with pytest.raises(SubgraphError, match="not connected"):
        induce_subgraph(host237, {a, b})
    deep = [v for v in range(host237.n) if host237.depth_of[v] == host237.max_depth][0]
    with pytest.raises(SubgraphError, match="trusted depth"):
        induce_subgraph(host237, {deep})
    with pytest.raises(SubgraphError, match="trusted depth"):
        ball_subgraph(host237, 0, host237.max_depth - 1)


def test_punctured_ball(host237):
    G0 = ball_subgraph(host237, 0, 3)
    G = punctured_ball(host237, 0, 3, 0)
    assert 0 in G.host_ids[G.n_interior:]
    assert G.n_boundary == G0.n_boundary + 1
    # in (2,3,7) the radius-2 ball falls apart without its center
    with pytest.raises(SubgraphError, match="disconnected"):
        punctured_ball(host237, 0, 2, 0)
    outside = [v for v in range(host237.n) if host237.depth_of[v] == 5][0]
    with pytest.raises(SubgraphError, match="not inside"):
        punctured_ball(host237, 0, 2, outside)


def test_distances_small():
    S = star_graph()
    assert graph_distance(S, 1, 1) == 0
    assert graph_distance(S, 1, 2) == 2
    P = path_graph()
    assert graph_distance(P, 1, 2) == 2


def test_host_distance(host237):
    assert host_distance(host237, 0, 0) == 0
    assert host_distance(host237, 0, host237.adjacency[0][0]) == 1


def test_graph_validation():
    with pytest.raises(SubgraphError):
        GraphWithBoundary(1, 0, ())
    with pytest.raises(SubgraphError):
        GraphWithBoundary(1, 2, ((0, 1),))
    with pytest.raises(SubgraphError):
        GraphWithBoundary(1, 2, ((0, 1), (0, 1), (0, 2)))
    with pytest.raises(SubgraphError):
        GraphWithBoundary(1, 2, ((0, 0), (0, 1), (0, 2)))


def test_json_roundtrip(host237):
    G = ball_subgraph(host237, 0, 2)
    G2 = GraphWithBoundary.from_dict(json.loads(G.to_json()))
    assert G2 == G
