"""Experiment runners: eigenvalue scaling, punctured balls, horseshoes and discretization comparison."""
from __future__ import annotations

import csv
import io
import json
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .discretize import build_discretization, cobblestone_map, rough_isometry_constants
from .domain import build_domain, structural_equivalence_check
from .graphcore import ball_subgraph, SubgraphError, graph_distance, induce_subgraph, punctured_ball
from .hypgeo import check_hyperbolic
from .steklov import steklov_spectrum
from .tiling import DEFAULT_DEPTH_CAP, HostGraph, build_host_graph, generate_tiling

RESIDUAL_TOL = 1e-8
FAMILIES = ("balls", "punctured-balls", "horseshoe", "custom-list")


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    p: int = 2
    q: int = 3
    r: int = 7
    family: str = "balls"
    radii: tuple[int, ...] = (2, 3, 4, 5, 6)
    k_max: int = 5
    epsilon_factor: float = 0.5
    seed: int = 0
    depth: int | None = None  # tiling depth; default: just deep enough for the family
    center: int = 0
    removed: int | None = None  # punctured balls: vertex to remove (default: see default_puncture)
    custom: tuple[tuple[int, ...], ...] = ()  # custom-list family: interior vertex sets
    min_separation: int = 10  # horseshoe: required subgraph distance between the tips
    workers: int = 1
    out_dir: str | None = None

    def tiling_depth(self) -> int:
        if self.depth is not None:
            return self.depth
        if self.family == "horseshoe":
            # (2,3,7) needs depth 8: the shortest cycle that can carry a horseshoe has 14 tiles
            return DEFAULT_DEPTH_CAP
        return max(self.radii, default=0) + 2

    def validate(self) -> None:
        try:
            check_hyperbolic(self.p, self.q, self.r)
        except ValueError as e:
            raise ExperimentError(f"config: {e}") from e
        if self.family not in FAMILIES:
            raise ExperimentError(f"config: unknown family {self.family!r}")
        d = self.tiling_depth()
        if d > DEFAULT_DEPTH_CAP:
            raise ExperimentError(f"config: tiling depth {d} exceeds cap {DEFAULT_DEPTH_CAP}")
        if self.family in ("balls", "punctured-balls"):
            if not self.radii or min(self.radii) < 0:
                raise ExperimentError("config: radii must be nonnegative and nonempty")
            if self.center != 0 and self.depth is None:
                raise ExperimentError("config: off-center balls need an explicit depth")
            if max(self.radii) + 2 > d:
                raise ExperimentError(
                    f"config: radius {max(self.radii)} needs tiling depth >= {max(self.radii) + 2}, got {d}")
        if self.k_max < 1:
            raise ExperimentError("config: k_max must be >= 1")
        if not (0 < self.epsilon_factor <= 1):
            raise ExperimentError("config: epsilon_factor must be in (0, 1]")
        if self.workers < 1:
            raise ExperimentError("config: workers must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["radii"] = list(self.radii)
        d["custom"] = [list(c) for c in self.custom]
        return d


def host_for(cfg: ExperimentConfig) -> HostGraph:
    return build_host_graph(generate_tiling(cfg.p, cfg.q, cfg.r, cfg.tiling_depth()))


def _provenance(cfg: ExperimentConfig) -> dict:
    return {"config": cfg.to_dict(), "versions": {
        "hypsteklov": __version__, "numpy": np.__version__, "scipy": scipy.__version__}}


def _num(x) -> str:
    return "" if x is None else repr(float(x))


def _write(out_dir: str | None, name: str, text: str) -> None:
    if out_dir is None:
        return
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    (path / name).write_text(text)


def _family(cfg: ExperimentConfig, host: HostGraph):
    if cfg.family == "balls":
        return [(l, ball_subgraph(host, cfg.center, l)) for l in cfg.radii]
    if cfg.family == "punctured-balls":
        out = []
        for l in cfg.radii:
            rm = default_puncture(host, cfg.center, l) if cfg.removed is None else cfg.removed
            out.append((l, punctured_ball(host, cfg.center, l, rm)))
        return out
    if cfg.family == "custom-list":
        return [(i, induce_subgraph(host, om)) for i, om in enumerate(cfg.custom)]
    hs = find_horseshoe(host, cfg.min_separation)
    return [(0, hs.graph)]


def default_puncture(host: HostGraph, center: int, radius: int) -> int:
    """First vertex in BFS order from the center that can be punched out cleanly.

    Removal must keep the interior connected and keep every old boundary vertex, so
    the boundary gains exactly the removed vertex.
    """
    nb = ball_subgraph(host, center, radius).n_boundary
    dist = host.bfs(center, limit=radius)
    for v in sorted(dist, key=lambda v: (dist[v], v)):
        try:
            G = punctured_ball(host, center, radius, v)
        except SubgraphError:
            continue
        if G.n_boundary == nb + 1:
            return v
    raise ExperimentError(f"no vertex can be removed from the radius-{radius} ball")


def _parallel_map(fn, items, workers: int):
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# -- scaling ----------------------------------------------------------------

@dataclass
class ScalingRow:
    l: int
    k: int
    n_interior: int
    n_boundary: int
    sigma: float | None
    residual: float | None

    @property
    def defined(self) -> bool:
        return self.sigma is not None

    @property
    def product(self) -> float | None:
        return None if self.sigma is None else self.sigma * self.n_boundary

    @property
    def ratio(self) -> float | None:
        return None if self.sigma is None else self.sigma * self.n_boundary / self.k ** 2

    @property
    def flagged(self) -> bool:
        return self.residual is not None and self.residual > RESIDUAL_TOL


@dataclass
class ScalingReport:
    config: ExperimentConfig
    rows: list[ScalingRow]
    timings: dict = field(default_factory=dict)

    def row(self, l: int, k: int) -> ScalingRow:
        for r in self.rows:
            if r.l == l and r.k == k:
                return r
        raise KeyError((l, k))

    def summary(self) -> dict[int, float | None]:
        """Per k, the maximum over the family of sigma_k |B| / k^2."""
        out = {}
        for k in range(1, self.config.k_max + 1):
            vals = [r.ratio for r in self.rows if r.k == k and r.defined]
            out[k] = max(vals) if vals else None
        return out

    def running_max(self, k: int, upto: int) -> float | None:
        vals = [r.ratio for r in self.rows if r.k == k and r.l <= upto and r.defined]
        return max(vals) if vals else None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["l", "k", "n_interior", "n_boundary", "defined", "sigma", "sigma_times_B",
                    "sigma_B_over_k2", "residual", "flagged"])
        for r in self.rows:
            w.writerow([r.l, r.k, r.n_interior, r.n_boundary, int(r.defined), _num(r.sigma),
                        _num(r.product), _num(r.ratio), _num(r.residual), int(r.flagged)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        d = _provenance(self.config)
        d["rows"] = [{"l": r.l, "k": r.k, "n_interior": r.n_interior, "n_boundary": r.n_boundary,
                      "sigma": r.sigma, "sigma_times_B": r.product, "sigma_B_over_k2": r.ratio,
                      "residual": r.residual, "flagged": r.flagged} for r in self.rows]
        d["summary"] = {str(k): v for k, v in self.summary().items()}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)


def _spectrum_rows(l, G, k_max):
    spec = steklov_spectrum(G)
    rows = []
    for k in range(1, k_max + 1):
        if k < G.n_boundary:
            rows.append(ScalingRow(l, k, G.n_interior, G.n_boundary, spec.sigma(k), float(spec.residuals[k])))
        else:
            rows.append(ScalingRow(l, k, G.n_interior, G.n_boundary, None, None))
    return rows


def run_scaling(cfg: ExperimentConfig) -> ScalingReport:
    cfg.validate()
    t0 = time.perf_counter()
    host = host_for(cfg)
    fam = _family(cfg, host)
    t1 = time.perf_counter()
    chunks = _parallel_map(lambda item: _spectrum_rows(item[0], item[1], cfg.k_max), fam, cfg.workers)
    rows = sorted((r for c in chunks for r in c), key=lambda r: (r.l, r.k))
    rep = ScalingReport(cfg, rows, {"host": t1 - t0, "spectra": time.perf_counter() - t1})
    _write(cfg.out_dir, "scaling.csv", rep.to_csv())
    _write(cfg.out_dir, "scaling.json", rep.to_json())
    # timings vary between runs and are kept apart from the reproducible outputs
    _write(cfg.out_dir, "timings.json", json.dumps(rep.timings, indent=1))
    bad = [(r.l, r.k) for r in rows if r.flagged]
    if bad:
        raise ExperimentError(f"eigenpair residual above {RESIDUAL_TOL} at (l, k) = {bad}")
    return rep


# -- punctured ball --------------------------------------------------------

def run_punctured(cfg: ExperimentConfig, radius: int | None = None) -> dict:
    cfg.validate()
    host = host_for(cfg)
    R = max(cfg.radii) if radius is None else radius
    rm = default_puncture(host, cfg.center, R) if cfg.removed is None else cfg.removed
    G0 = ball_subgraph(host, cfg.center, R)
    G1 = punctured_ball(host, cfg.center, R, rm)
    D0, D1 = build_domain(G0, host), build_domain(G1, host)
    s0, s1 = steklov_spectrum(G0), steklov_spectrum(G1)
    k = min(cfg.k_max + 1, len(s0), len(s1))
    out = {
        **_provenance(cfg),
        "radius": R, "removed": rm,
        "ball": {"n_interior": G0.n_interior, "n_boundary": G0.n_boundary,
                 "boundary_components": D0.n_boundary_components, "polygonal_curves": D0.n_outer_curves,
                 "sigma": [float(x) for x in s0.eigenvalues[:k]]},
        "punctured": {"n_interior": G1.n_interior, "n_boundary": G1.n_boundary,
                      "boundary_components": D1.n_boundary_components, "polygonal_curves": D1.n_outer_curves,
                      "sigma": [float(x) for x in s1.eigenvalues[:k]]},
    }
    out["checks"] = {
        "boundary_gains_one": G1.n_boundary == G0.n_boundary + 1,
        "components_gain_one": D1.n_boundary_components == D0.n_boundary_components + 1,
        "sigma0_zero": bool(s0.eigenvalues[0] == 0.0 and s1.eigenvalues[0] == 0.0),
    }
    _write(cfg.out_dir, "punctured.json", json.dumps(out, indent=1, sort_keys=True))
    return out


# -- horseshoe -------------------------------------------------------------

@dataclass
class Horseshoe:
    w1: int
    w2: int
    interior: tuple[int, ...]
    graph: object
    host_distance: int
    subgraph_distance: int


def _path_avoiding(host: HostGraph, a: int, b: int, forbidden: set, allowed) -> list[int] | None:
    prev = {a: None}
    dq = deque([a])
    while dq:
        u = dq.popleft()
        if u == b:
            path = []
            while u is not None:
                path.append(u)
                u = prev[u]
            return path[::-1]
        for w in host.adjacency[u]:
            if w not in prev and w not in forbidden and allowed(w):
                prev[w] = u
                dq.append(w)
    return None


def find_horseshoe(host: HostGraph, min_separation: int = 10) -> Horseshoe:
    """Interior path from a neighbour of w1 around to a neighbour of w2, for a host edge w1-w2.

    The path avoids every other neighbour of w1 and w2, so the edge w1-w2 joins two
    boundary vertices that are far apart inside the subgraph.
    """
    inner = host.trusted_depth - 1  # interior vertices need trusted boundary neighbours

    def allowed(v):
        return host.depth_of[v] <= inner

    for w1, w2 in sorted(host.edges):
        if not (host.is_trusted(w1) and host.is_trusted(w2)):
            continue
        n1 = [x for x in host.adjacency[w1] if x != w2]
        n2 = [x for x in host.adjacency[w2] if x != w1]
        for a1 in n1:
            for a2 in n2:
                if a1 == a2 or not (allowed(a1) and allowed(a2)):
                    continue
                forbidden = ({w1, w2} | set(n1) | set(n2)) - {a1, a2}
                path = _path_avoiding(host, a1, a2, forbidden, allowed)
                if path is None:
                    continue
                G = induce_subgraph(host, path)
                loc = G.local_index()
                if w1 not in loc or w2 not in loc or not (G.is_boundary(loc[w1]) and G.is_boundary(loc[w2])):
                    continue
                d = graph_distance(G, loc[w1], loc[w2])
                if d >= min_separation:
                    return Horseshoe(w1, w2, tuple(sorted(path)), G, 1, d)
    raise ExperimentError(f"no horseshoe with tip separation >= {min_separation} within trusted depth")


def run_horseshoe(cfg: ExperimentConfig) -> dict:
    cfg.validate()
    host = host_for(cfg)
    hs = find_horseshoe(host, cfg.min_separation)
    D = build_domain(hs.graph, host)
    rep = structural_equivalence_check(D)
    pair = tuple(sorted((hs.w1, hs.w2)))
    quad_between = any(p.kind == "quad" and tuple(sorted(p.tag)) == pair for p in D.pieces)
    gon_between = any(p.kind == "gon" and {hs.w1, hs.w2} <= {k[0] for k in p.keys} for p in D.pieces)
    out = {
        **_provenance(cfg),
        "w1": hs.w1, "w2": hs.w2, "interior": list(hs.interior),
        "host_distance": hs.host_distance, "subgraph_distance": hs.subgraph_distance,
        "connector_between_tips": quad_between or gon_between,
        "structural_check": rep.to_dict(),
    }
    _write(cfg.out_dir, "horseshoe.json", json.dumps(out, indent=1, sort_keys=True))
    return out


# -- discretization comparison ----------------------------------------------

@dataclass
class CompareRow:
    l: int
    n_boundary: int
    n_vertices: int
    n_samples_boundary: int
    sigma_graph: list
    sigma_disc: list
    constants: dict

    def ratios(self) -> list:
        return [sd / sg for sg, sd in zip(self.sigma_graph, self.sigma_disc)]


def _compare_one(host, l, G, cfg, kk):
    D = build_domain(G, host)
    eps = cfg.epsilon_factor * D.constants.epsilon_max
    dg = build_discretization(D, eps)
    phi = cobblestone_map(dg, D, G)
    if not phi.is_surjective(G.n):
        raise ExperimentError(f"cobblestone map is not surjective at l={l}")
    rep = rough_isometry_constants(phi, dg.graph, G, sample=True, seed=cfg.seed)
    sg = steklov_spectrum(G)
    sd = steklov_spectrum(dg.graph)
    ks = [k for k in range(1, kk + 1) if k < G.n_boundary]
    return CompareRow(l, G.n_boundary, dg.graph.n, dg.n_boundary,
                      [sg.sigma(k) for k in ks], [sd.sigma(k) for k in ks], rep.to_dict())


def run_discretize_compare(cfg: ExperimentConfig, k_max: int = 3) -> dict:
    cfg.validate()
    if cfg.family in ("balls", "punctured-balls") and max(cfg.radii) > 4:
        raise ExperimentError("config: discretization comparison is limited to radii <= 4")
    host = host_for(cfg)
    fam = _family(cfg, host)
    rows = _parallel_map(lambda item: _compare_one(host, item[0], item[1], cfg, k_max), fam, cfg.workers)
    spread = {}
    for k in range(1, k_max + 1):
        col = [r.ratios()[k - 1] for r in rows if len(r.ratios()) >= k]
        spread[str(k)] = max(col) / min(col) if col else None
    out = {
        **_provenance(cfg),
        "rows": [{"l": r.l, "n_boundary": r.n_boundary, "n_vertices": r.n_vertices,
                  "n_samples_boundary": r.n_samples_boundary, "sigma_graph": r.sigma_graph,
                  "sigma_disc": r.sigma_disc, "ratios": r.ratios(), "rough_isometry": r.constants}
                 for r in rows],
        "ratio_spread": spread,
    }
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["l", "k", "sigma_graph", "sigma_disc", "ratio"])
    for r in rows:
        for k, (a, b) in enumerate(zip(r.sigma_graph, r.sigma_disc), start=1):
            w.writerow([r.l, k, _num(a), _num(b), _num(b / a)])
    _write(cfg.out_dir, "compare.csv", buf.getvalue())
    _write(cfg.out_dir, "compare.json", json.dumps(out, indent=1, sort_keys=True))
    return out

