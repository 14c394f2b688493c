"""Command line interface: ``hypsteklov <subcommand> [flags]``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .discretize import (
    DiscretizationError,
    build_discretization,
    cobblestone_map,
    rough_isometry_constants,
)
from .domain import DomainError, build_domain, structural_equivalence_check
from .experiments import (
    ExperimentConfig,
    ExperimentError,
    run_discretize_compare,
    run_horseshoe,
    run_punctured,
    run_scaling,
)
from .graphcore import SubgraphError, ball_subgraph
from .hypgeo import GeometryError
from .render import domain_svg, tiling_svg
from .steklov import SpectrumError, steklov_spectrum
from .tiling import TilingError, build_host_graph, generate_tiling, tiling_to_json

ERRORS = (GeometryError, TilingError, SubgraphError, SpectrumError, DomainError,
          DiscretizationError, ExperimentError)


class CheckFailed(RuntimeError):
    pass


def parse_radii(text: str) -> tuple[int, ...]:
    """``"4"`` -> (4,), ``"2..6"`` -> (2, 3, 4, 5, 6), ``"1,3"`` -> (1, 3)."""
    try:
        if ".." in text:
            a, b = text.split("..")
            return tuple(range(int(a), int(b) + 1))
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad radius spec {text!r}") from None


def _emit(args, name: str, text: str) -> None:
    if args.out_dir:
        p = Path(args.out_dir)
        p.mkdir(parents=True, exist_ok=True)
        (p / name).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _config(args, **kw) -> ExperimentConfig:
    base = dict(p=args.p, q=args.q, r=args.r, seed=args.seed, depth=args.depth, out_dir=args.out_dir,
                k_max=args.k_max, epsilon_factor=args.epsilon_factor)
    if getattr(args, "radius", None) is not None:
        base["radii"] = args.radius
    if getattr(args, "workers", None):
        base["workers"] = args.workers
    base.update(kw)
    return ExperimentConfig(**base)


def _host(args, radius: int | None = None):
    depth = args.depth if args.depth is not None else (radius + 2 if radius is not None else 6)
    return build_host_graph(generate_tiling(args.p, args.q, args.r, depth))


def _single_radius(args) -> int:
    if args.radius is None:
        return 2
    if len(args.radius) != 1:
        raise ExperimentError("this command takes a single --radius")
    return args.radius[0]


# -- subcommands -------------------------------------------------------------

def cmd_tile(args) -> None:
    t = generate_tiling(args.p, args.q, args.r, args.depth if args.depth is not None else 4)
    g = build_host_graph(t)
    if args.format == "svg":
        _emit(args, "tiling.svg", tiling_svg(t))
    else:
        _emit(args, "tiling.json", tiling_to_json(t, g))
    print(json.dumps({"tiles": len(t.tiles), "by_depth": t.counts_by_depth()}), file=sys.stderr)


def cmd_subgraph(args) -> None:
    R = _single_radius(args)
    host = _host(args, R)
    G = ball_subgraph(host, args.center, R)
    if args.format == "svg":
        _emit(args, "subgraph.svg", tiling_svg(host.tiling, host, G))
    else:
        _emit(args, "subgraph.json", G.to_json())


def cmd_spectrum(args) -> None:
    R = _single_radius(args)
    host = _host(args, R)
    s = steklov_spectrum(ball_subgraph(host, args.center, R))
    if args.format == "json":
        _emit(args, "spectrum.json", s.to_json())
    else:
        _emit(args, "spectrum.csv", s.to_csv())


def cmd_domain(args) -> None:
    R = _single_radius(args)
    host = _host(args, R)
    G = ball_subgraph(host, args.center, R)
    D = build_domain(G, host, mode=args.mode)
    rep = structural_equivalence_check(D)
    if args.format == "svg":
        _emit(args, "domain.svg", domain_svg(D))
    else:
        doc = D.to_dict()
        doc["structural_check"] = rep.to_dict()
        _emit(args, "domain.json", json.dumps(doc, indent=1))
    if not rep.ok:
        raise CheckFailed("; ".join(rep.failures))


def cmd_discretize(args) -> None:
    R = _single_radius(args)
    host = _host(args, R)
    G = ball_subgraph(host, args.center, R)
    D = build_domain(G, host)
    dg = build_discretization(D, args.epsilon_factor * D.constants.epsilon_max)
    phi = cobblestone_map(dg, D, G)
    rep = rough_isometry_constants(phi, dg.graph, G, sample=True, seed=args.seed)
    if args.format == "svg":
        _emit(args, "discretization.svg", domain_svg(D, dg))
    else:
        doc = dg.to_dict()
        doc["rough_isometry"] = rep.to_dict()
        doc["surjective"] = phi.is_surjective(G.n)
        _emit(args, "discretization.json", json.dumps(doc, indent=1))


def cmd_scaling(args) -> None:
    rep = run_scaling(_config(args))
    if not args.out_dir:
        sys.stdout.write(rep.to_json() + "\n" if args.format == "json" else rep.to_csv())


def cmd_punctured(args) -> None:
    cfg = _config(args, family="punctured-balls", removed=args.removed)
    out = run_punctured(cfg)
    if not args.out_dir:
        print(json.dumps(out, indent=1, sort_keys=True))
    if not all(out["checks"].values()):
        raise CheckFailed(f"punctured-ball checks failed: {out['checks']}")


def cmd_horseshoe(args) -> None:
    out = run_horseshoe(_config(args, family="horseshoe", min_separation=args.min_separation))
    if not args.out_dir:
        print(json.dumps(out, indent=1, sort_keys=True))
    if out["connector_between_tips"] or not out["structural_check"]["ok"]:
        raise CheckFailed("horseshoe domain joins the two tips")


def cmd_compare(args) -> None:
    out = run_discretize_compare(_config(args))
    if not args.out_dir:
        print(json.dumps(out, indent=1, sort_keys=True))


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=2)
    common.add_argument("--q", type=int, default=3)
    common.add_argument("--r", type=int, default=7)
    common.add_argument("--depth", type=int, default=None, help="tiling depth (default depends on command)")
    common.add_argument("--radius", type=parse_radii, default=None, help="R, a..b or a,b,c")
    common.add_argument("--center", type=int, default=0)
    common.add_argument("--k-max", type=int, default=5)
    common.add_argument("--epsilon-factor", type=float, default=0.5, help="fraction of eps_max")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out-dir", default=None)
    common.add_argument("--format", choices=("csv", "json", "svg"), default="json")

    ap = argparse.ArgumentParser(prog="hypsteklov", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("tile", parents=[common], help="generate a tiling").set_defaults(fn=cmd_tile)
    sub.add_parser("subgraph", parents=[common], help="ball subgraph").set_defaults(fn=cmd_subgraph)
    sub.add_parser("spectrum", parents=[common], help="Steklov spectrum of a ball").set_defaults(fn=cmd_spectrum)
    sp = sub.add_parser("domain", parents=[common], help="build the hyperbolic domain of a ball")
    sp.add_argument("--mode", choices=("smooth", "sharp"), default="smooth")
    sp.set_defaults(fn=cmd_domain)
    sub.add_parser("discretize", parents=[common], help="epsilon-discretization").set_defaults(fn=cmd_discretize)
    sp = sub.add_parser("scaling", parents=[common], help="sigma_k |B| / k^2 over a ball family")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(fn=cmd_scaling)
    sp = sub.add_parser("punctured", parents=[common], help="ball versus punctured ball")
    sp.add_argument("--removed", type=int, default=None)
    sp.set_defaults(fn=cmd_punctured)
    sp = sub.add_parser("horseshoe", parents=[common], help="horseshoe-shaped subgraph")
    sp.add_argument("--min-separation", type=int, default=10)
    sp.set_defaults(fn=cmd_horseshoe)
    sp = sub.add_parser("compare", parents=[common], help="graph versus discretization spectra")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(fn=cmd_compare)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.fn(args)
    except ERRORS + (CheckFailed,) as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
