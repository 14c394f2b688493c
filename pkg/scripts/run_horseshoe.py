"""Horseshoe subgraph: tips adjacent in the host but far apart inside the subgraph."""
import argparse

from hypsteklov.experiments import ExperimentConfig, run_horseshoe


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pqr", type=int, nargs=3, default=[2, 3, 7])
    ap.add_argument("--depth", type=int, default=None)
    ap.add_argument("--min-separation", type=int, default=10)
    ap.add_argument("--out-dir", default="results/horseshoe")
    args = ap.parse_args()
    p, q, r = args.pqr
    cfg = ExperimentConfig(p=p, q=q, r=r, family="horseshoe", depth=args.depth,
                           min_separation=args.min_separation, out_dir=args.out_dir)
    out = run_horseshoe(cfg)
    print(f"w1={out['w1']} w2={out['w2']} d_host={out['host_distance']} d_sub={out['subgraph_distance']} "
          f"interior={len(out['interior'])} connector={out['connector_between_tips']} "
          f"structure_ok={out['structural_check']['ok']}")


if __name__ == "__main__":
    main()
