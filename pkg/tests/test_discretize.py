import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypsteklov.discretize import (
    DiscretizationError,
    boundary_maximality_defect,
    build_discretization,
    cobblestone_map,
    greedy_net,
    maximal_separated_subset,
    rough_isometry_constants,
)
from hypsteklov.domain import build_domain
from hypsteklov.graphcore import GraphWithBoundary, ball_subgraph, path_graph
from hypsteklov.hypgeo import DiskPoint, dist_array, dist_c, polygon_contains


@pytest.fixture(scope="module")
def disc1(host237):
    G = ball_subgraph(host237, 0, 1)
    D = build_domain(G, host237)
    eps = D.constants.epsilon_max / 2
    return G, D, build_discretization(D, eps)


def test_maximal_separated_examples():
    a, b = DiskPoint(0.0, 0.0), DiskPoint(0.1, 0.0)
    assert maximal_separated_subset([a, b], 1.0) == [a]
    assert maximal_separated_subset([a, b], 0.1) == [a, b]
    assert maximal_separated_subset([b], 0.3) == [b]
    with pytest.raises(ValueError):
        maximal_separated_subset([], 0.1)
    with pytest.raises(ValueError):
        maximal_separated_subset([a], 0.0)


@given(st.lists(st.tuples(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9)), min_size=1, max_size=60),
       st.floats(0.05, 1.5))
def test_net_is_separated_and_maximal(pts, eps):
    z = np.array([complex(x, y) for x, y in pts if x * x + y * y < 0.81])
    if z.size == 0:
        return
    idx = greedy_net(z, eps)
    S = z[idx]
    D = dist_array(S[:, None], S[None, :])
    assert np.all(D[~np.eye(len(S), dtype=bool)] > eps)
    # brute-force maximality: every candidate is within eps of the net
    assert np.all(dist_array(z[:, None], S[None, :]).min(axis=1) <= eps)


def test_discretization_basic(disc1):
    G, D, dg = disc1
    eps = dg.epsilon
    assert dg.n_boundary > 0
    # V_Sigma is separated
    B = dg.boundary
    d = dist_array(B[:, None], B[None, :])
    assert np.all(d[~np.eye(len(B), dtype=bool)] > eps)
    # interior net points are separated from each other and from the copies
    E = dg.extra
    d = dist_array(E[:, None], dg.interior[None, :])
    d[np.arange(len(E)), len(dg.copies) + np.arange(len(E))] = np.inf
    assert np.all(d > eps)
    # maximality on a probe set 10x denser than eps, offset from the candidates
    assert boundary_maximality_defect(D, dg) <= 1.1
    # pairing edges and the 3 eps rule
    edges = set(dg.graph.edges)
    ni = dg.graph.n_interior
    for i in range(dg.n_boundary):
        assert (dg.partner(i), dg.boundary_index(i)) in edges
    pos = dg.positions
    e = np.array(dg.graph.edges)
    lens = dist_array(pos[e[:, 0]], pos[e[:, 1]])
    pairing = (e[:, 1] >= ni) & (e[:, 1] - ni == e[:, 0])
    assert np.all(lens[~pairing] <= 3 * eps)
    assert np.all(dg.copy_depth <= 4 * eps + 1e-12)


def test_edge_rule_is_complete(disc1):
    _, _, dg = disc1
    pos = dg.positions
    rng = np.random.default_rng(0)
    edges = set(dg.graph.edges)
    for i in rng.choice(len(pos), 200, replace=False):
        d = dist_array(pos, pos[i])
        for j in np.flatnonzero(d <= 3 * dg.epsilon):
            if j != i:
                assert (min(i, j), max(i, j)) in edges


def test_circle_packing_bound(disc1):
    _, D, dg = disc1
    prims = list(D.primitives())
    for s, prim in enumerate(prims):
        if prim.kind != "circle":
            continue
        n = int(np.sum(dg.boundary_source == s))
        assert n >= math.ceil(prim.length / dg.epsilon) / 3


def test_halving_epsilon_doubles_boundary(disc1):
    _, D, dg = disc1
    fine = build_discretization(D, dg.epsilon / 2)
    assert fine.n_boundary >= 2 * dg.n_boundary


def test_epsilon_limit(disc1):
    _, D, _ = disc1
    with pytest.raises(DiscretizationError, match="exceeds"):
        build_discretization(D, 2 * D.constants.epsilon_max)
    with pytest.raises(ValueError):
        build_discretization(D, -1.0)


def test_cobblestone_rules(disc1):
    G, D, dg = disc1
    phi = cobblestone_map(dg, D, G)
    assert len(phi.image) == dg.graph.n
    assert phi.is_surjective(G.n)
    ni = dg.graph.n_interior
    assert np.all(phi.image[:ni] < G.n_interior)
    assert np.all(phi.image[ni:] >= G.n_interior)
    prims = list(D.primitives())
    for i, s in enumerate(dg.boundary_source):
        if prims[s].kind == "circle":
            assert G.host_ids[phi.image[ni + i]] == prims[s].host
    local = G.local_index()
    for h in G.host_ids[: G.n_interior]:
        inside = polygon_contains(D.shrunk[h], dg.interior)
        assert np.all(phi.image[:ni][inside] == local[h])


def test_identity_map():
    G = GraphWithBoundary(2, 3, ((0, 1), (0, 2), (1, 3), (1, 4)))
    rep = rough_isometry_constants(np.arange(G.n), G, G)
    assert (rep.C1, rep.C2, rep.C3) == (1.0, 0.0, 0.0)
    assert (rep.boundary_C1, rep.boundary_C2, rep.boundary_C3) == (1.0, 0.0, 0.0)


def test_collapse_map():
    # path of diameter 3 collapsed onto one vertex
    G = GraphWithBoundary(2, 2, ((0, 1), (0, 2), (1, 3)))
    T = path_graph()
    rep = rough_isometry_constants(np.zeros(G.n, dtype=int), G, T)
    Ds, Dt = G.distances(), T.distances()
    img = np.zeros(G.n, dtype=int)
    for u in range(G.n):
        for v in range(G.n):
            a, b = Ds[u, v], Dt[img[u], img[v]]
            assert a / rep.C1 - rep.C2 <= b + 1e-9
            assert b <= rep.C1 * a + rep.C2 + 1e-9
    assert rep.C1 >= 1 and rep.C2 >= 3 / rep.C1 - 1e-9
    assert rep.C3 == 1.0


def test_pair_cap():
    G = GraphWithBoundary(2, 3, ((0, 1), (0, 2), (1, 3), (1, 4)))
    with pytest.raises(DiscretizationError, match="cap"):
        rough_isometry_constants(np.arange(G.n), G, G, cap=3)
    rep = rough_isometry_constants(np.arange(G.n), G, G, cap=3, sample=True, n_sources=3)
    assert rep.sampled and rep.C1 == 1.0


def test_constants_stable_across_family(host237):
    reports = {}
    for R in (2, 5):
        G = ball_subgraph(host237, 0, R)
        D = build_domain(G, host237)
        dg = build_discretization(D, D.constants.epsilon_max / 2)
        phi = cobblestone_map(dg, D, G)
        assert phi.is_surjective(G.n)
        reports[R] = rough_isometry_constants(phi, dg.graph, G, sample=True)
    a, b = reports[2], reports[5]
    assert b.C1 <= 1.5 * a.C1 and b.C2 <= 1.5 * a.C2 + 1e-9 and b.C3 <= 1.5 * a.C3 + 1e-9


def test_json(disc1):
    _, _, dg = disc1
    d = json.loads(dg.to_json())
    assert len(d["positions"]) == dg.graph.n == len(d["roles"])
    assert d["roles"].count("boundary") == dg.n_boundary
