"""Run configuration and the registry of benchmark datasets."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml

from . import graphio
from .evaluate import DEFAULT_FRACTIONS
from .graphio import LabeledGraph
from .trainer import TrainConfig

EUCLIDEAN_DIMS = (2, 4, 8, 16, 32, 64, 128)
PRUNE_MODES = ("none", "isolated", "largest_component")


class ConfigError(ValueError):
    pass


@dataclass
class DatasetConfig:
    path: str
    format: str | None = None
    labels: str | None = None
    prune: str = "none"
    directed: bool = False

    def load(self) -> LabeledGraph:
        graph = graphio.read_graph(self.path, self.format, self.labels, self.directed)
        if self.prune == "isolated":
            graph = graphio.drop_isolated(graph)
        elif self.prune == "largest_component":
            graph = graphio.largest_component(graph)
        return graph


@dataclass
class EvalConfig:
    fractions: list[float] = field(default_factory=lambda: list(DEFAULT_FRACTIONS))
    repetitions: int = 10
    l2: float = 1e-4


@dataclass
class RunConfig:
    dataset: DatasetConfig
    seed: int = 0
    out: str = "runs/default"
    walk_steps: int = 10
    train: TrainConfig = field(default_factory=TrainConfig)
    hyperbolic: bool = True
    euclidean_dims: list[int] = field(default_factory=lambda: list(EUCLIDEAN_DIMS))
    eval: EvalConfig = field(default_factory=EvalConfig)
    jobs: int = 1

    def __post_init__(self) -> None:
        # one master seed drives every stage
        self.train.seed = self.seed

    def tags(self) -> list[str]:
        tags = ["hyperbolic-2d"] if self.hyperbolic else []
        return tags + [f"euclidean-{d}d" for d in self.euclidean_dims]

    def train_config(self, tag: str) -> tuple[str, TrainConfig]:
        if tag == "hyperbolic-2d":
            return "hyperbolic", TrainConfig(**{**asdict(self.train), "dimension": 2})
        dim = int(tag.removeprefix("euclidean-").removesuffix("d"))
        return "euclidean", TrainConfig(**{**asdict(self.train), "dimension": dim})

    def to_dict(self) -> dict:
        return asdict(self)

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True)

    def validate(self) -> None:
        ds = self.dataset
        if not Path(ds.path).is_file():
            raise ConfigError(f"dataset file not found: {ds.path}")
        if ds.labels is not None and not Path(ds.labels).is_file():
            raise ConfigError(f"label file not found: {ds.labels}")
        if ds.format not in (None, "edgelist", "gml", "json"):
            raise ConfigError(f"unknown format {ds.format!r}")
        if ds.prune not in PRUNE_MODES:
            raise ConfigError(f"prune must be one of {PRUNE_MODES}")
        if self.walk_steps < 1:
            raise ConfigError("walk_steps must be >= 1")
        if not self.tags():
            raise ConfigError("no models configured")
        if any(d < 1 for d in self.euclidean_dims):
            raise ConfigError("euclidean dimensions must be >= 1")
        if self.eval.repetitions < 1 or not all(0 < f < 1 for f in self.eval.fractions):
            raise ConfigError("bad evaluation grid")


def _build(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a mapping")
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    return cls(**data)


def from_dict(data: dict, base_dir: str | Path | None = None) -> RunConfig:
    data = dict(data)
    if "dataset" not in data:
        raise ConfigError("config needs a 'dataset' section")
    ds = dict(data.pop("dataset"))
    if base_dir is not None:
        for key in ("path", "labels"):
            if ds.get(key) and not Path(ds[key]).is_absolute():
                ds[key] = str(Path(base_dir) / ds[key])
    try:
        dataset = _build(DatasetConfig, ds, "dataset")
        train = _build(TrainConfig, data.pop("train", {}) or {}, "train")
        ev = _build(EvalConfig, data.pop("eval", {}) or {}, "eval")
        return _build(RunConfig, {**data, "dataset": dataset, "train": train, "eval": ev}, "config")
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e


def load(path: str | Path) -> RunConfig:
    path = Path(path)
    data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    return from_dict(data, base_dir=path.parent)


# --- benchmark datasets ---------------------------------------------------------
# File names match scripts/fetch_datasets.py output.

DATASETS: dict[str, dict] = {
    "karate": {"path": "karate.edgelist", "labels": "karate.labels"},
    "polbooks": {"path": "polbooks.gml"},
    "football": {"path": "football.gml"},
    "adjnoun": {"path": "adjnoun.gml"},
    # hyperlinks are directed; blogs without any link are dropped
    "polblogs": {"path": "polblogs.gml", "directed": True, "prune": "isolated"},
}


def dataset_config(name: str, data_dir: str | Path = "data") -> DatasetConfig:
    if name not in DATASETS:
        raise KeyError(f"unknown dataset {name!r}; known: {sorted(DATASETS)}")
    entry = dict(DATASETS[name])
    entry["path"] = str(Path(data_dir) / entry["path"])
    if "labels" in entry:
        entry["labels"] = str(Path(data_dir) / entry["labels"])
    return DatasetConfig(**entry)


def load_dataset(name: str, data_dir: str | Path = "data") -> LabeledGraph:
    cfg = dataset_config(name, data_dir)
    if not Path(cfg.path).is_file():
        raise FileNotFoundError(
            f"{cfg.path} is missing; run scripts/fetch_datasets.py to download {name}"
        )
    return cfg.load()
