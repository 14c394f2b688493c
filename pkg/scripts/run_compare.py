"""Graph spectrum versus the spectrum of the epsilon-discretized domain, radii <= 4."""
import argparse

from hypsteklov.experiments import ExperimentConfig, run_discretize_compare


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radii", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--epsilon-factor", type=float, default=0.5)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out-dir", default="results/compare")
    args = ap.parse_args()
    cfg = ExperimentConfig(radii=tuple(args.radii), epsilon_factor=args.epsilon_factor,
                           workers=args.workers, out_dir=args.out_dir)
    out = run_discretize_compare(cfg)
    for row in out["rows"]:
        ri = row["rough_isometry"]
        ratios = " ".join(f"{x:.3f}" for x in row["ratios"])
        print(f"l={row['l']} |V|={row['n_vertices']} ratios {ratios} "
              f"C=({ri['C1']:.2f}, {ri['C2']:.2f}, {ri['C3']:.2f})")
    print("ratio spread per k:", out["ratio_spread"])


if __name__ == "__main__":
    main()
