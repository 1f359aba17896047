"""Command-line driver: walks -> train -> eval, plus dataset stats.

Output directory layout::

    <out>/config.yaml          resolved configuration
    <out>/walks.txt            one walk per line, vertex names
    <out>/walks.meta.json      seed, steps and config digest for walks.txt
    <out>/embeddings/<tag>.tsv
    <out>/loss/<tag>.csv
    <out>/report.csv
    <out>/report.json
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import config as cfgmod
from . import evaluate, trainer, walks
from .config import ConfigError, DatasetConfig, RunConfig
from .graphio import GraphParseError, LabeledGraph, stats

logger = logging.getLogger("hyperskip")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_TRAIN = 4
EXIT_EVAL = 5


class StageError(RuntimeError):
    def __init__(self, stage: str, code: int, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.code = code


def _digest(cfg: RunConfig) -> str:
    # where and how parallel a run executes does not change its results
    data = {k: v for k, v in cfg.to_dict().items() if k not in ("out", "jobs")}
    return trainer.config_digest(data)


def _provenance(cfg: RunConfig) -> str:
    return f"seed={cfg.seed} config_sha256={_digest(cfg)}"


def _load_graph(cfg: RunConfig) -> LabeledGraph:
    try:
        return cfg.dataset.load()
    except (GraphParseError, OSError, ValueError) as e:
        raise StageError("parse", EXIT_PARSE, str(e)) from e


def _write_config(cfg: RunConfig, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.yaml").write_text(cfg.dump(), encoding="utf-8")


def _walks_meta(cfg: RunConfig, graph: LabeledGraph) -> dict:
    return {
        "seed": cfg.seed,
        "steps": cfg.walk_steps,
        "vertices": graph.num_vertices,
        "config_sha256": _digest(cfg),
    }


def cmd_walks(cfg: RunConfig, graph: LabeledGraph | None = None) -> walks.WalkCorpus:
    graph = graph if graph is not None else _load_graph(cfg)
    corpus = walks.generate_walks(graph, cfg.walk_steps, cfg.seed)
    out = Path(cfg.out)
    _write_config(cfg, out)
    corpus.write(out / "walks.txt", graph.names)
    (out / "walks.meta.json").write_text(
        json.dumps(_walks_meta(cfg, graph), indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    lengths = [len(w) for w in corpus.walks]
    print(
        f"walks: {len(corpus.walks)} walks, length {min(lengths)}-{max(lengths)}, "
        f"{len(walks.pairs(corpus, cfg.train.window))} pairs at window {cfg.train.window}"
    )
    return corpus


def _corpus_for(cfg: RunConfig, graph: LabeledGraph) -> walks.WalkCorpus:
    out = Path(cfg.out)
    meta_path = out / "walks.meta.json"
    if meta_path.is_file() and (out / "walks.txt").is_file():
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        if meta == _walks_meta(cfg, graph):
            text = (out / "walks.txt").read_text(encoding="utf-8")
            return walks.WalkCorpus.from_text(text, graph, cfg.walk_steps, cfg.seed)
    return cmd_walks(cfg, graph)


def _train_one(args):
    tag, mode, tcfg, corpus, names, provenance = args
    model = trainer.train_model(mode, None, corpus, tcfg)
    emb = trainer.export(model, names, tag, provenance=provenance)
    return tag, emb, trainer.loss_trace_csv(model, provenance), model.loss_trace


def cmd_train(cfg: RunConfig, graph: LabeledGraph | None = None) -> None:
    graph = graph if graph is not None else _load_graph(cfg)
    corpus = _corpus_for(cfg, graph)
    out = Path(cfg.out)
    _write_config(cfg, out)
    (out / "embeddings").mkdir(exist_ok=True)
    (out / "loss").mkdir(exist_ok=True)
    prov = _provenance(cfg)
    jobs = [(tag, *cfg.train_config(tag), corpus, graph.names, prov) for tag in cfg.tags()]
    try:
        if cfg.jobs > 1:
            with ProcessPoolExecutor(cfg.jobs) as pool:
                results = list(pool.map(_train_one, jobs))
        else:
            results = [_train_one(j) for j in jobs]
    except trainer.TrainingError as e:
        raise StageError("train", EXIT_TRAIN, str(e)) from e
    for tag, emb, trace_csv, trace in results:
        (out / "embeddings" / f"{tag}.tsv").write_text(emb, encoding="utf-8")
        (out / "loss" / f"{tag}.csv").write_text(trace_csv, encoding="utf-8")
        print(f"train: {tag:<16} loss {trace[0]:.4f} -> {trace[-1]:.4f}")


def cmd_eval(cfg: RunConfig, graph: LabeledGraph | None = None) -> evaluate.EvalReport:
    graph = graph if graph is not None else _load_graph(cfg)
    if graph.labels is None:
        raise StageError("eval", EXIT_EVAL, "dataset has no labels")
    out = Path(cfg.out)
    feats = {}
    for tag in cfg.tags():
        path = out / "embeddings" / f"{tag}.tsv"
        try:
            feats[tag] = trainer.read_embeddings(path).aligned(graph.names)
        except (OSError, KeyError, ValueError) as e:
            raise StageError("eval", EXIT_EVAL, f"{path}: {e}") from e
    report = evaluate.run_protocol(
        feats, graph, cfg.eval.fractions, cfg.eval.repetitions, cfg.seed, cfg.eval.l2
    )
    report.provenance = {
        "config": {k: v for k, v in cfg.to_dict().items() if k not in ("out", "jobs")},
        "config_sha256": _digest(cfg),
    }
    _write_config(cfg, out)
    (out / "report.csv").write_text(f"# {_provenance(cfg)}\n" + report.to_csv(), encoding="utf-8")
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    print(report.table())
    return report


def cmd_pipeline(cfg: RunConfig) -> evaluate.EvalReport:
    graph = _load_graph(cfg)
    cmd_walks(cfg, graph)
    cmd_train(cfg, graph)
    return cmd_eval(cfg, graph)


def cmd_stats(cfg: RunConfig) -> None:
    graph = _load_graph(cfg)
    s = stats(graph)
    print(f"vertices {s.vertex_count}")
    print(f"edges    {s.edge_count}")
    if s.class_count is not None:
        print(f"classes  {s.class_count}")
        print(f"largest  {s.largest_class_fraction:.4f}")
    if graph.dropped_self_loops or graph.dropped_duplicates:
        print(f"dropped  {graph.dropped_self_loops} self-loops, {graph.dropped_duplicates} duplicate edges")


COMMANDS = {
    "walks": cmd_walks,
    "train": cmd_train,
    "eval": cmd_eval,
    "pipeline": cmd_pipeline,
    "stats": cmd_stats,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperskip", description="Hyperbolic skipgram graph embeddings and evaluation."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML run configuration")
        p.add_argument("--graph", help="graph file (overrides the config dataset path)")
        p.add_argument("--labels", help="TSV vertex labels")
        p.add_argument("--dataset", help=f"benchmark name from --data-dir: {', '.join(cfgmod.DATASETS)}")
        p.add_argument("--data-dir", default="data")
        p.add_argument("--format", choices=["edgelist", "gml", "json"])
        p.add_argument("--seed", type=int)
        p.add_argument("--out")
        p.add_argument("--jobs", type=int, help="train model tags in parallel processes")
        p.add_argument("--dry-run", action="store_true", help="validate the config and exit")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    if args.config:
        cfg = cfgmod.load(args.config)
    else:
        if not (args.graph or args.dataset):
            raise ConfigError("give --config, --graph or --dataset")
        cfg = RunConfig(dataset=DatasetConfig(path=""))
    if args.dataset:
        cfg.dataset = cfgmod.dataset_config(args.dataset, args.data_dir)
    if args.graph:
        cfg.dataset = DatasetConfig(path=args.graph, labels=args.labels)
    elif args.labels:
        cfg.dataset.labels = args.labels
    if args.format:
        cfg.dataset.format = args.format
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.train.seed = args.seed
    if args.out:
        cfg.out = args.out
    if args.jobs:
        cfg.jobs = args.jobs
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = resolve_config(args)
    except (ConfigError, KeyError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if args.dry_run:
        print(cfg.dump(), end="")
        print(f"dry run: {args.command} would write to {cfg.out} ({', '.join(cfg.tags())})")
        return EXIT_OK
    try:
        COMMANDS[args.command](cfg)
    except StageError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
