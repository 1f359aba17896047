"""Macro F1 versus labeled fraction for every available benchmark.

Runs the full pipeline (walks, 1 hyperbolic + 7 euclidean models, paired
evaluation over the fraction grid) per dataset and seed, then writes one
combined CSV for plotting:

    python3 scripts/run_fraction_grid.py --seeds 0 1 2 --out runs/grid

Datasets missing from --data-dir are reported and skipped; fetch them
with scripts/fetch_datasets.py.
"""

import argparse
import csv
import sys
from pathlib import Path

from hyperskip import cli
from hyperskip import config as cfgmod
from hyperskip.config import RunConfig


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--datasets", nargs="+", default=list(cfgmod.DATASETS))
    ap.add_argument("--seeds", nargs="+", type=int, default=[0])
    ap.add_argument("--data-dir", default=str(Path(__file__).resolve().parents[1] / "data"))
    ap.add_argument("--out", default="runs/grid")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--dims", nargs="+", type=int, default=list(cfgmod.EUCLIDEAN_DIMS))
    args = ap.parse_args(argv)

    rows = []
    for name in args.datasets:
        ds = cfgmod.dataset_config(name, args.data_dir)
        if not Path(ds.path).is_file():
            print(f"{name}: missing {ds.path}, skipped", file=sys.stderr)
            continue
        for seed in args.seeds:
            out = Path(args.out) / name / f"seed{seed}"
            cfg = RunConfig(dataset=ds, seed=seed, out=str(out), euclidean_dims=args.dims, jobs=args.jobs)
            cfg.validate()
            print(f"== {name} seed {seed}")
            report = cli.cmd_pipeline(cfg)
            for r in report.rows:
                rows.append([name, seed, r.model, r.fraction, r.mean_macro_f1, r.stderr, r.reps])

    if not rows:
        print("nothing ran", file=sys.stderr)
        return 1
    path = Path(args.out) / "grid.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["dataset", "seed", "model", "fraction", "mean_macro_f1", "stderr", "reps"])
        wr.writerows(rows)
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
