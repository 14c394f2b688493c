"""Ball versus punctured ball: boundary size, boundary components and low spectrum."""
import argparse
import json

from hypsteklov.experiments import ExperimentConfig, run_punctured


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=int, default=2)
    ap.add_argument("--removed", type=int, default=None)
    ap.add_argument("--out-dir", default="results/punctured")
    args = ap.parse_args()
    cfg = ExperimentConfig(family="punctured-balls", radii=(args.radius,), removed=args.removed,
                           out_dir=args.out_dir)
    out = run_punctured(cfg)
    print(json.dumps({k: out[k] for k in ("radius", "removed", "ball", "punctured", "checks")}, indent=1))


if __name__ == "__main__":
    main()
