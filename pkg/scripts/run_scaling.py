"""Scaling of sigma_k |B| / k^2 over (2,3,7) balls; writes scaling.csv/json under results/scaling."""
import argparse

from hypsteklov.experiments import ExperimentConfig, run_scaling


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radii", type=int, nargs="+", default=[2, 3, 4, 5, 6])
    ap.add_argument("--k-max", type=int, default=5)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out-dir", default="results/scaling")
    args = ap.parse_args()
    cfg = ExperimentConfig(radii=tuple(args.radii), k_max=args.k_max, workers=args.workers, out_dir=args.out_dir)
    rep = run_scaling(cfg)
    for k, v in rep.summary().items():
        first, last = rep.running_max(k, min(cfg.radii)), rep.running_max(k, max(cfg.radii))
        print(f"k={k}: max sigma_k|B|/k^2 = {v:.4f}  (running max {first:.4f} -> {last:.4f})")


if __name__ == "__main__":
    main()
