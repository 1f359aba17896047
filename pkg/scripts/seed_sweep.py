"""Hyperbolic-2d versus euclidean-2d at one labeled fraction across seeds.

Each seed changes the walks, the initialization, the negatives and the
splits. Prints one line per seed and a summary:

    python3 scripts/seed_sweep.py --dataset karate --seeds 20
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from hyperskip import config as cfgmod
from hyperskip.evaluate import run_protocol
from hyperskip.trainer import TrainConfig, train, train_euclidean
from hyperskip.walks import generate_walks


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dataset", default="karate")
    ap.add_argument("--data-dir", default=str(Path(__file__).resolve().parents[1] / "data"))
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--fraction", type=float, default=0.6)
    ap.add_argument("--learning-rate", type=float, default=0.1)
    args = ap.parse_args(argv)

    g = cfgmod.load_dataset(args.dataset, args.data_dir)
    hyp, euc = [], []
    for seed in range(args.seeds):
        corpus = generate_walks(g, 10, seed)
        cfg = TrainConfig(seed=seed, learning_rate=args.learning_rate)
        h = train(g, corpus, cfg).features()
        e = train_euclidean(g, corpus, TrainConfig(seed=seed, learning_rate=args.learning_rate)).input_table
        rep = run_protocol({"h": h, "e": e}, g, [args.fraction], 10, seed)
        hyp.append(rep.row("h", args.fraction).mean_macro_f1)
        euc.append(rep.row("e", args.fraction).mean_macro_f1)
        print(f"seed {seed:>3}  hyperbolic {hyp[-1]:.4f}  euclidean {euc[-1]:.4f}")
    hyp, euc = np.array(hyp), np.array(euc)
    diff = hyp - euc
    print(
        f"mean hyperbolic {hyp.mean():.4f}, euclidean {euc.mean():.4f}; "
        f"hyperbolic ahead on {(diff > 0).sum()}/{len(diff)} seeds; "
        f"mean difference {diff.mean():+.4f} (se {diff.std(ddof=1) / np.sqrt(len(diff)):.4f})"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
