"""SVG figures: the tiling with a ball subgraph, its domain, and a discretized domain."""
import argparse
from pathlib import Path

from hypsteklov.discretize import build_discretization
from hypsteklov.domain import build_domain
from hypsteklov.graphcore import ball_subgraph
from hypsteklov.render import domain_svg, tiling_svg
from hypsteklov.tiling import build_host_graph, generate_tiling


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pqr", type=int, nargs=3, default=[2, 3, 7])
    ap.add_argument("--radius", type=int, default=2)
    ap.add_argument("--out-dir", default="results/figures")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    host = build_host_graph(generate_tiling(*args.pqr, args.radius + 2))
    G = ball_subgraph(host, 0, args.radius)
    D = build_domain(G, host)
    (out / "ball.svg").write_text(tiling_svg(host.tiling, host, G))
    (out / "domain.svg").write_text(domain_svg(D))
    (out / "domain_sharp.svg").write_text(domain_svg(build_domain(G, host, mode="sharp")))
    dg = build_discretization(D, D.constants.epsilon_max)
    (out / "discretization.svg").write_text(domain_svg(D, dg))
    print(f"wrote 4 figures to {out}")


if __name__ == "__main__":
    main()
