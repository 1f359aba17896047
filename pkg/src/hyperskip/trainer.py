"""Skipgram with negative sampling on the Poincaré disk, plus a Euclidean twin.

Hyperbolic tables store one ``(r_h, theta)`` row per vertex in natural
polar coordinates. The similarity of an input vector and an output vector
is the polar inner product ``u = r_I r_j cos(theta_I - theta_j)``, and
SGD steps are taken directly in ``(r, theta)`` with the angular step
scaled by ``1 / sinh(r)``.

The Euclidean trainer consumes the same pair stream, the same negative
draws and the same learning-rate schedule, so a comparison between the
two isolates the geometry.
"""

from __future__ import annotations

import hashlib
import io
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import geometry
from .geometry import NaturalPoint, normalize_angle
from .graphio import LabeledGraph
from .walks import NoiseTable, WalkCorpus, build_noise_table, pairs as make_pairs

logger = logging.getLogger(__name__)

HYPERBOLIC = "hyperbolic"
EUCLIDEAN = "euclidean"


class TrainingError(RuntimeError):
    """Non-finite coordinates appeared during training."""


@dataclass
class TrainConfig:
    epochs: int = 5
    window: int = 5
    negatives: int = 5
    learning_rate: float = 0.1
    lr_floor_fraction: float = 1e-4
    seed: int = 0
    dimension: int = 2  # euclidean only; hyperbolic is always the 2-d disk
    base_radius: float = 1.0
    min_radius: float = 1e-3
    shuffle: bool = False

    def __post_init__(self) -> None:
        for name in ("epochs", "window", "dimension"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.negatives < 0:
            raise ValueError("negatives must be >= 0")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if not 0 < self.lr_floor_fraction <= 1:
            raise ValueError("lr_floor_fraction must lie in (0, 1]")
        if not 0 < self.min_radius < 0.9 * self.base_radius:
            raise ValueError("min_radius must be positive and below the initial patch")


@dataclass
class EmbeddingModel:
    """Input table ``W`` and output table ``W'``.

    Hyperbolic mode: arrays of shape ``(V, 2)`` holding ``(r_h, theta)``.
    Euclidean mode: arrays of shape ``(V, d)`` of Cartesian coordinates.
    """

    mode: str
    input_table: np.ndarray
    output_table: np.ndarray
    loss_trace: list[float] = field(default_factory=list)

    @property
    def vocab_size(self) -> int:
        return self.input_table.shape[0]

    @property
    def dimension(self) -> int:
        return 2 if self.mode == HYPERBOLIC else self.input_table.shape[1]

    def input_point(self, v: int) -> NaturalPoint:
        r, t = self.input_table[v]
        return NaturalPoint(float(r), float(t))

    def output_point(self, v: int) -> NaturalPoint:
        r, t = self.output_table[v]
        return NaturalPoint(float(r), float(t))

    def features(self) -> np.ndarray:
        """Per-vertex feature vectors: disk ``(x, y)`` or raw Euclidean rows."""
        if self.mode == HYPERBOLIC:
            return geometry.to_cartesian(self.input_table[:, 0], self.input_table[:, 1])
        return self.input_table.copy()

    def copy(self) -> EmbeddingModel:
        return EmbeddingModel(
            self.mode, self.input_table.copy(), self.output_table.copy(), list(self.loss_trace)
        )


# --- scalar pieces --------------------------------------------------------------


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def log_sigmoid(x: float) -> float:
    if x >= 0:
        return -math.log1p(math.exp(-x))
    return x - math.log1p(math.exp(x))


def prediction_error(u: float, is_positive: bool) -> float:
    """``dE/du``: ``sigmoid(u) - 1`` for the observed context, ``sigmoid(u)`` for noise."""
    return sigmoid(u) - (1.0 if is_positive else 0.0)


def loss(v_in: NaturalPoint, v_out: NaturalPoint, negatives: Iterable[NaturalPoint]) -> float:
    """Negative-sampling loss for one observed pair and its noise samples."""
    e = -log_sigmoid(geometry.inner(v_out, v_in))
    for v in negatives:
        e -= log_sigmoid(-geometry.inner(v, v_in))
    return e


def loss_gradients(
    v_in: NaturalPoint, v_out: NaturalPoint, negatives: Sequence[NaturalPoint]
) -> tuple[tuple[float, float], list[tuple[float, float]]]:
    """Raw partials of :func:`loss` in natural coordinates.

    Returns ``((dE/dr_I, dE/dtheta_I), [(dE/dr'_j, dE/dtheta'_j), ...])`` with
    the observed context first. No metric scaling is applied.
    """
    g_r_in = 0.0
    g_t_in = 0.0
    out = []
    for j, v in enumerate([v_out, *negatives]):
        d = v_in.theta - v.theta
        c, s = math.cos(d), math.sin(d)
        eps = prediction_error(v_in.r_h * v.r_h * c, j == 0)
        g_r_in += eps * v.r_h * c
        g_t_in -= eps * v_in.r_h * v.r_h * s
        out.append((eps * v_in.r_h * c, eps * v_in.r_h * v.r_h * s))
    return (g_r_in, g_t_in), out


def update_output(
    v_out: NaturalPoint, v_in: NaturalPoint, eps: float, eta: float, min_radius: float = 1e-3
) -> NaturalPoint:
    """One step on an output vector that took part in the current pair."""
    d = v_in.theta - v_out.theta
    r = v_out.r_h - eta * eps * v_in.r_h * math.cos(d)
    t = v_out.theta - eta * eps * (v_in.r_h * v_out.r_h / math.sinh(v_out.r_h)) * math.sin(d)
    return NaturalPoint(max(r, min_radius), normalize_angle(t))


def update_input(
    v_in: NaturalPoint,
    candidates: Iterable[tuple[NaturalPoint, float]],
    eta: float,
    min_radius: float = 1e-3,
) -> NaturalPoint:
    """One step on the input vector given ``(output vector, error)`` pairs.

    The angular step descends along ``dE/dtheta_I``, which carries a minus
    sign relative to the output-side partial.
    """
    g_r = 0.0
    g_t = 0.0
    for v, eps in candidates:
        d = v_in.theta - v.theta
        g_r += eps * v.r_h * math.cos(d)
        g_t += eps * v_in.r_h * v.r_h * math.sin(d)
    r = v_in.r_h - eta * g_r
    t = v_in.theta + eta * g_t / math.sinh(v_in.r_h)
    return NaturalPoint(max(r, min_radius), normalize_angle(t))


def softmax_conditional(model: EmbeddingModel, w_in: int) -> np.ndarray:
    """Full softmax ``p(w_O | w_I)`` over the vocabulary. Diagnostic only."""
    if model.mode == HYPERBOLIC:
        r_in, t_in = model.input_table[w_in]
        r, t = model.output_table[:, 0], model.output_table[:, 1]
        u = r_in * r * np.cos(t_in - t)
    else:
        u = model.output_table @ model.input_table[w_in]
    u = u - u.max()
    p = np.exp(u)
    return p / p.sum()


# --- initialization -------------------------------------------------------------


def init_model(vocab: int, config: TrainConfig, mode: str = HYPERBOLIC, rng=None) -> EmbeddingModel:
    """Random starting tables.

    Hyperbolic vectors start in the annulus ``r_h in [0.9, 1.1] * base_radius``
    with uniform angles: a patch thin compared with its distance from the
    origin. Euclidean components are uniform in ``[-0.5/d, 0.5/d]``.
    """
    if vocab < 1:
        raise ValueError("vocab must be >= 1")
    if rng is None:
        rng = np.random.default_rng([config.seed, 0])
    if mode == HYPERBOLIC:
        tables = []
        for _ in range(2):
            r = rng.uniform(0.9 * config.base_radius, 1.1 * config.base_radius, vocab)
            t = rng.uniform(0.0, geometry.TWO_PI, vocab)
            tables.append(np.column_stack([r, geometry.normalize_angles(t)]))
        return EmbeddingModel(HYPERBOLIC, tables[0], tables[1])
    if mode == EUCLIDEAN:
        d = config.dimension
        w = rng.uniform(-0.5 / d, 0.5 / d, (vocab, d))
        w_out = rng.uniform(-0.5 / d, 0.5 / d, (vocab, d))
        return EmbeddingModel(EUCLIDEAN, w, w_out)
    raise ValueError(f"unknown mode {mode!r}")


# --- training loop ---------------------------------------------------------------


def learning_rates(config: TrainConfig, total_steps: int) -> np.ndarray:
    """Linear decay from ``eta0`` to ``eta0 * lr_floor_fraction`` over all steps."""
    eta0 = config.learning_rate
    if total_steps <= 1:
        return np.full(total_steps, eta0)
    frac = np.arange(total_steps) / (total_steps - 1)
    return eta0 - (eta0 - eta0 * config.lr_floor_fraction) * frac


def sample_negatives(
    table: NoiseTable, outputs: np.ndarray, k: int, rng: np.random.Generator
) -> np.ndarray:
    """``k`` noise draws per pair, redrawing any that hit the pair's context."""
    if k == 0:
        return np.empty((len(outputs), 0), dtype=np.int64)
    for o in np.unique(outputs):
        p = table.probabilities
        if p[o] > 0 and (p > 0).sum() == 1:
            raise ValueError(f"noise support is only the excluded vertex {o}")
    neg = table.sample((len(outputs), k), rng)
    bad = neg == outputs[:, None]
    while bad.any():
        neg[bad] = table.sample(int(bad.sum()), rng)
        bad = neg == outputs[:, None]
    return neg


def _epoch_stream(config: TrainConfig, corpus: WalkCorpus, table: NoiseTable):
    """Yield ``(pairs, negatives)`` per epoch from a single seeded generator."""
    base = make_pairs(corpus, config.window)
    rng = np.random.default_rng([config.seed, 1])
    for _ in range(config.epochs):
        p = base[rng.permutation(len(base))] if config.shuffle else base
        yield p, sample_negatives(table, p[:, 1], config.negatives, rng)


def _hyperbolic_step(r_in, t_in, r_out, t_out, i, targets, eta, r_min) -> float:
    """In-place SGD step on list-backed tables; returns the pre-step loss.

    ``targets[0]`` is the observed context, the rest are noise samples.
    All errors are computed from pre-step values before anything moves.
    """
    ri = r_in[i]
    ti = t_in[i]
    sinh_ri = math.sinh(ri)
    g_r = 0.0
    g_t = 0.0
    e = 0.0
    moves: dict[int, list[float]] = {}
    for n, j in enumerate(targets):
        rj = r_out[j]
        d = ti - t_out[j]
        c = math.cos(d)
        s = math.sin(d)
        u = ri * rj * c
        if n == 0:
            eps = sigmoid(u) - 1.0
            e -= log_sigmoid(u)
        else:
            eps = sigmoid(u)
            e -= log_sigmoid(-u)
        g_r += eps * rj * c
        g_t += eps * rj * s
        dr = -eta * eps * ri * c
        dt = -eta * eps * (ri * rj / math.sinh(rj)) * s
        m = moves.get(j)
        if m is None:
            moves[j] = [dr, dt]
        else:
            m[0] += dr
            m[1] += dt
    for j, (dr, dt) in moves.items():
        r = r_out[j] + dr
        r_out[j] = r if r > r_min else r_min
        t_out[j] = normalize_angle(t_out[j] + dt)
    r = ri - eta * g_r
    r_in[i] = r if r > r_min else r_min
    t_in[i] = normalize_angle(ti + eta * ri * g_t / sinh_ri)
    return e


def _check_finite(step: int, pair, *values: float) -> None:
    for x in values:
        if not math.isfinite(x):
            raise TrainingError(f"non-finite coordinate at step {step}, pair {tuple(int(v) for v in pair)}")


def train(
    graph: LabeledGraph | None,
    corpus: WalkCorpus,
    config: TrainConfig,
    model: EmbeddingModel | None = None,
    noise: NoiseTable | None = None,
) -> EmbeddingModel:
    """Hyperbolic negative-sampling skipgram over the corpus pair stream.

    ``model`` overrides the random initialization; it is copied, not
    mutated. ``graph`` is only used for a vocabulary check.
    """
    if graph is not None and graph.num_vertices != corpus.vocab_size:
        raise ValueError("corpus and graph disagree on the vertex count")
    noise = noise if noise is not None else build_noise_table(corpus)
    model = model.copy() if model is not None else init_model(corpus.vocab_size, config, HYPERBOLIC)
    if model.mode != HYPERBOLIC:
        raise ValueError("train() needs a hyperbolic model")

    r_in = model.input_table[:, 0].tolist()
    t_in = model.input_table[:, 1].tolist()
    r_out = model.output_table[:, 0].tolist()
    t_out = model.output_table[:, 1].tolist()
    r_min = config.min_radius

    n_pairs = len(make_pairs(corpus, config.window))
    etas = learning_rates(config, config.epochs * n_pairs).tolist()
    step = 0
    trace = []
    for pairs, negs in _epoch_stream(config, corpus, noise):
        total = 0.0
        for (i, o), neg in zip(pairs.tolist(), negs.tolist()):
            try:
                e = _hyperbolic_step(r_in, t_in, r_out, t_out, i, [o, *neg], etas[step], r_min)
            except (ValueError, OverflowError) as err:
                # fmod of inf and sinh overflow land here
                raise TrainingError(f"non-finite coordinate at step {step}, pair ({i}, {o})") from err
            if not math.isfinite(e):
                raise TrainingError(f"non-finite loss at step {step}, pair ({i}, {o})")
            _check_finite(step, (i, o), r_in[i], t_in[i], r_out[o], t_out[o])
            total += e
            step += 1
        trace.append(total / max(len(pairs), 1))
        logger.debug("epoch %d mean loss %.6f", len(trace), trace[-1])

    model.input_table = np.column_stack([r_in, t_in])
    model.output_table = np.column_stack([r_out, t_out])
    model.loss_trace = trace
    return model


def train_euclidean(
    graph: LabeledGraph | None,
    corpus: WalkCorpus,
    config: TrainConfig,
    model: EmbeddingModel | None = None,
    noise: NoiseTable | None = None,
) -> EmbeddingModel:
    """DeepWalk-style skipgram with dot-product similarity in ``R^d``."""
    if graph is not None and graph.num_vertices != corpus.vocab_size:
        raise ValueError("corpus and graph disagree on the vertex count")
    noise = noise if noise is not None else build_noise_table(corpus)
    model = model.copy() if model is not None else init_model(corpus.vocab_size, config, EUCLIDEAN)
    if model.mode != EUCLIDEAN:
        raise ValueError("train_euclidean() needs a euclidean model")

    w = model.input_table
    w_out = model.output_table
    n_pairs = len(make_pairs(corpus, config.window))
    etas = learning_rates(config, config.epochs * n_pairs)
    labels = np.zeros(config.negatives + 1)
    labels[0] = 1.0
    step = 0
    trace = []
    for pairs, negs in _epoch_stream(config, corpus, noise):
        targets_all = np.concatenate([pairs[:, 1:2], negs], axis=1)
        total = 0.0
        for (i, o), targets in zip(pairs.tolist(), targets_all):
            eta = etas[step]
            v = w[i]
            ctx = w_out[targets]
            u = ctx @ v
            eps = 1.0 / (1.0 + np.exp(-u)) - labels
            # -log sigmoid(s) with s = u for the context and -u for noise
            signed = np.where(labels > 0, u, -u)
            total += float(np.sum(np.logaddexp(0.0, -signed)))
            grad_in = eps @ ctx
            np.add.at(w_out, targets, -eta * eps[:, None] * v)
            w[i] = v - eta * grad_in
            if not (np.isfinite(w[i]).all() and np.isfinite(w_out[targets]).all()):
                raise TrainingError(f"non-finite coordinate at step {step}, pair ({i}, {o})")
            step += 1
        trace.append(total / max(len(pairs), 1))

    model.loss_trace = trace
    return model


def train_model(
    mode: str, graph: LabeledGraph | None, corpus: WalkCorpus, config: TrainConfig
) -> EmbeddingModel:
    if mode == HYPERBOLIC:
        return train(graph, corpus, config)
    if mode == EUCLIDEAN:
        return train_euclidean(graph, corpus, config)
    raise ValueError(f"unknown mode {mode!r}")


# --- files --------------------------------------------------------------------


def config_digest(config: dict) -> str:
    import json

    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def export(
    model: EmbeddingModel,
    names: Sequence[str],
    tag: str,
    path: str | Path | None = None,
    provenance: str | None = None,
) -> str:
    """Serialize the input table.

    Layout: a ``tag dim mode`` header, an optional ``#`` provenance line,
    then ``name<TAB>x_1<TAB>...<TAB>x_d`` per vertex. Hyperbolic vectors
    are written as Cartesian points on the unit disk.
    """
    if len(names) != model.vocab_size:
        raise ValueError("names do not match the vocabulary size")
    feats = model.features()
    buf = io.StringIO()
    buf.write(f"{tag} {model.dimension} {model.mode}\n")
    if provenance:
        buf.write(f"# {provenance}\n")
    for name, row in zip(names, feats):
        buf.write(name + "\t" + "\t".join(repr(float(x)) for x in row) + "\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


@dataclass
class EmbeddingFile:
    tag: str
    dimension: int
    mode: str
    names: list[str]
    vectors: np.ndarray

    def aligned(self, names: Sequence[str]) -> np.ndarray:
        """Rows reordered to ``names``; raises if any vertex is missing."""
        index = {n: i for i, n in enumerate(self.names)}
        missing = [n for n in names if n not in index]
        if missing:
            raise KeyError(f"embedding {self.tag!r} lacks {len(missing)} vertices, e.g. {missing[0]!r}")
        return self.vectors[[index[n] for n in names]]


def read_embeddings(path: str | Path) -> EmbeddingFile:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: empty embedding file")
    tag, dim, mode = lines[0].split()
    dim = int(dim)
    names = []
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != dim + 1:
            raise ValueError(f"{path}:{lineno}: expected {dim} coordinates")
        names.append(parts[0])
        rows.append([float(x) for x in parts[1:]])
    return EmbeddingFile(tag, dim, mode, names, np.array(rows, dtype=np.float64).reshape(-1, dim))


def loss_trace_csv(model: EmbeddingModel, provenance: str | None = None) -> str:
    out = []
    if provenance:
        out.append(f"# {provenance}")
    out.append("epoch,mean_loss")
    out += [f"{k},{v!r}" for k, v in enumerate(model.loss_trace, start=1)]
    return "\n".join(out) + "\n"


def config_dict(config: TrainConfig) -> dict:
    return asdict(config)
