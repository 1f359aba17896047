"""Vertex classification on learned embeddings.

Protocol: for each labeled fraction and repetition, draw a stratified
train/test split, fit a multinomial logistic regression on the training
vertices and score macro F1 on the rest. The same splits are reused for
every embedding so that comparisons between models are paired.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .graphio import LabeledGraph

logger = logging.getLogger(__name__)

DEFAULT_FRACTIONS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)


@dataclass(frozen=True)
class SplitSpec:
    labeled_fraction: float
    repetition: int
    seed: int
    train: tuple[int, ...]
    test: tuple[int, ...]
    seeded_classes: tuple[int, ...] = ()


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def make_splits(
    graph: LabeledGraph,
    fractions: Sequence[float] = DEFAULT_FRACTIONS,
    repetitions: int = 10,
    seed: int = 0,
) -> list[SplitSpec]:
    """Stratified random splits, one per ``(fraction, repetition)``.

    Each class contributes ``round(fraction * class_size)`` training
    vertices, at least one, and leaves at least one for testing when it
    has two or more members.
    """
    if graph.labels is None:
        raise ValueError("graph has no labels")
    labels = np.asarray(graph.labels)
    members = [np.flatnonzero(labels == c) for c in range(len(graph.label_names))]
    splits = []
    for fraction in fractions:
        if not 0.0 < fraction < 1.0:
            raise ValueError(f"labeled fraction must lie in (0, 1), got {fraction}")
        for rep in range(repetitions):
            rng = np.random.default_rng([seed, _round_half_up(fraction * 1e6), rep])
            train: list[int] = []
            seeded = []
            for c, idx in enumerate(members):
                if len(idx) == 0:
                    continue
                k = _round_half_up(fraction * len(idx))
                if k == 0:
                    k = 1
                    seeded.append(c)
                if len(idx) > 1:
                    k = min(k, len(idx) - 1)
                train.extend(rng.permutation(idx)[:k].tolist())
            if seeded:
                logger.warning(
                    "fraction %.3g: classes %s seeded with one training vertex", fraction, seeded
                )
            train_set = set(train)
            test = [v for v in range(graph.num_vertices) if v not in train_set]
            splits.append(
                SplitSpec(fraction, rep, seed, tuple(sorted(train)), tuple(test), tuple(seeded))
            )
    return splits


@dataclass
class LogisticModel:
    classes: np.ndarray
    weights: np.ndarray  # (d, k) in standardized feature space
    bias: np.ndarray  # (k,)
    mean: np.ndarray
    scale: np.ndarray
    iterations: int = 0
    grad_norm: float = 0.0
    objective: float = 0.0

    def decision_function(self, x: np.ndarray) -> np.ndarray:
        z = (np.asarray(x, dtype=np.float64) - self.mean) / self.scale
        return z @ self.weights + self.bias

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.classes[np.argmax(self.decision_function(x), axis=1)]


def _objective(w: np.ndarray, b: np.ndarray, x: np.ndarray, onehot: np.ndarray, l2: float):
    logits = x @ w + b
    logits -= logits.max(axis=1, keepdims=True)
    logz = np.log(np.exp(logits).sum(axis=1, keepdims=True))
    logp = logits - logz
    n = x.shape[0]
    f = -np.sum(onehot * logp) / n + 0.5 * l2 * np.sum(w * w)
    resid = (np.exp(logp) - onehot) / n
    return f, x.T @ resid + l2 * w, resid.sum(axis=0)


def _lbfgs(fun, x0: np.ndarray, tol: float, max_iter: int, memory: int = 10):
    """Limited-memory BFGS with Armijo backtracking; returns ``(x, f, gnorm, iters)``."""
    x = x0
    f, g = fun(x)
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    it = 0
    gnorm = float(np.linalg.norm(g))
    while gnorm > tol and it < max_iter:
        # two-loop recursion
        q = g.copy()
        alphas = []
        for s_k, y_k in zip(reversed(s_hist), reversed(y_hist)):
            a = s_k @ q / (y_k @ s_k)
            alphas.append(a)
            q -= a * y_k
        if s_hist:
            q *= (s_hist[-1] @ y_hist[-1]) / (y_hist[-1] @ y_hist[-1])
        else:
            q /= max(gnorm, 1.0)
        for (s_k, y_k), a in zip(zip(s_hist, y_hist), reversed(alphas)):
            q += (a - y_k @ q / (y_k @ s_k)) * s_k
        direction = -q
        slope = g @ direction
        if slope >= 0:
            # lost descent: fall back to steepest descent and drop the history
            s_hist.clear()
            y_hist.clear()
            direction = -g / max(gnorm, 1.0)
            slope = g @ direction
        t = 1.0
        while True:
            x_new = x + t * direction
            f_new, g_new = fun(x_new)
            if f_new <= f + 1e-4 * t * slope or t < 1e-20:
                break
            t *= 0.5
        s_k = x_new - x
        y_k = g_new - g
        if s_k @ y_k > 1e-12 * (y_k @ y_k):
            s_hist.append(s_k)
            y_hist.append(y_k)
            if len(s_hist) > memory:
                s_hist.pop(0)
                y_hist.pop(0)
        x, f, g = x_new, f_new, g_new
        gnorm = float(np.linalg.norm(g))
        it += 1
        if t < 1e-20:
            break
    return x, f, gnorm, it


def fit_logreg(
    features: np.ndarray,
    labels: Sequence[int],
    train: Sequence[int] | None = None,
    l2: float = 1e-4,
    tol: float = 1e-6,
    max_iter: int = 5000,
) -> LogisticModel:
    """Multinomial logistic regression on standardized features.

    Minimizes mean cross-entropy plus ``l2/2 * ||W||^2`` (bias unpenalized)
    with full-batch L-BFGS from a zero start. Stops when the gradient norm
    drops below ``tol`` or after ``max_iter`` iterations. A training set
    with a single class yields a constant classifier.
    """
    x_all = np.asarray(features, dtype=np.float64)
    y_all = np.asarray(labels)
    idx = np.arange(len(y_all)) if train is None else np.asarray(train, dtype=np.int64)
    x = x_all[idx]
    y = y_all[idx]
    classes = np.unique(y)
    mean = x.mean(axis=0)
    scale = x.std(axis=0)
    scale[scale == 0] = 1.0
    z = (x - mean) / scale
    d = z.shape[1]
    k = len(classes)
    if k < 2:
        return LogisticModel(classes, np.zeros((d, 1)), np.zeros(1), mean, scale)

    onehot = (y[:, None] == classes[None, :]).astype(np.float64)

    def fun(theta: np.ndarray):
        w = theta[: d * k].reshape(d, k)
        b = theta[d * k :]
        f, g_w, g_b = _objective(w, b, z, onehot, l2)
        return f, np.concatenate([g_w.ravel(), g_b])

    theta, f, gnorm, it = _lbfgs(fun, np.zeros(d * k + k), tol, max_iter)
    return LogisticModel(classes, theta[: d * k].reshape(d, k), theta[d * k :], mean, scale, it, gnorm, f)


def macro_f1(predictions: Sequence, truth: Sequence, classes: Sequence | None = None) -> float:
    """Unweighted mean of per-class F1.

    ``classes`` defaults to every class seen in either input. A class
    with no true and no predicted members scores 0.
    """
    pred = np.asarray(predictions)
    true = np.asarray(truth)
    if len(pred) != len(true) or len(true) == 0:
        raise ValueError("predictions and truth must be nonempty and equally long")
    if classes is None:
        classes = np.unique(np.concatenate([pred, true]))
    scores = []
    for c in classes:
        tp = np.sum((pred == c) & (true == c))
        fp = np.sum((pred == c) & (true != c))
        fn = np.sum((pred != c) & (true == c))
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom else 0.0)
    return float(np.mean(scores))


@dataclass
class EvalRow:
    model: str
    fraction: float
    mean_macro_f1: float
    stderr: float
    reps: int
    scores: list[float] = field(default_factory=list)


@dataclass
class EvalReport:
    rows: list[EvalRow]
    seed: int = 0
    provenance: dict = field(default_factory=dict)

    def row(self, model: str, fraction: float) -> EvalRow:
        for r in self.rows:
            if r.model == model and math.isclose(r.fraction, fraction):
                return r
        raise KeyError((model, fraction))

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["model", "fraction", "mean_macro_f1", "stderr", "reps"])
        for r in self.rows:
            wr.writerow([r.model, repr(r.fraction), repr(r.mean_macro_f1), repr(r.stderr), r.reps])
        return buf.getvalue()

    def to_json(self) -> str:
        data = {
            "seed": self.seed,
            "provenance": self.provenance,
            "rows": [asdict(r) for r in self.rows],
        }
        return json.dumps(data, indent=1, sort_keys=True) + "\n"

    def table(self) -> str:
        lines = [f"{'model':<16} {'fraction':>8} {'macro_f1':>9} {'stderr':>8}"]
        for r in self.rows:
            lines.append(f"{r.model:<16} {r.fraction:>8.2f} {r.mean_macro_f1:>9.4f} {r.stderr:>8.4f}")
        return "\n".join(lines)


def standard_error(values: Sequence[float]) -> float:
    v = np.asarray(values, dtype=np.float64)
    if len(v) < 2:
        return 0.0
    return float(v.std(ddof=1) / math.sqrt(len(v)))


def run_protocol(
    embeddings: Mapping[str, np.ndarray],
    graph: LabeledGraph,
    fractions: Sequence[float] = DEFAULT_FRACTIONS,
    repetitions: int = 10,
    seed: int = 0,
    l2: float = 1e-4,
) -> EvalReport:
    """Paired evaluation of every embedding on identical splits."""
    if graph.labels is None:
        raise ValueError("graph has no labels")
    for tag, feats in embeddings.items():
        if np.asarray(feats).shape[0] != graph.num_vertices:
            raise ValueError(f"embedding {tag!r} does not cover every vertex")
    labels = np.asarray(graph.labels)
    splits = make_splits(graph, fractions, repetitions, seed)
    rows = []
    for tag, feats in embeddings.items():
        feats = np.asarray(feats, dtype=np.float64)
        for fraction in fractions:
            scores = []
            for sp in splits:
                if sp.labeled_fraction != fraction:
                    continue
                clf = fit_logreg(feats, labels, sp.train, l2=l2)
                test = np.asarray(sp.test)
                scores.append(macro_f1(clf.predict(feats[test]), labels[test]))
            rows.append(
                EvalRow(tag, float(fraction), float(np.mean(scores)), standard_error(scores), len(scores), scores)
            )
    return EvalReport(rows, seed)
