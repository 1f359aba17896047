"""Random-walk corpus, skipgram pair stream and the negative-sampling table."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .graphio import LabeledGraph


@dataclass(frozen=True)
class WalkCorpus:
    walks: tuple[tuple[int, ...], ...]
    walk_length: int
    seed: int
    vocab_size: int

    def counts(self) -> np.ndarray:
        counts = np.zeros(self.vocab_size, dtype=np.int64)
        for walk in self.walks:
            for v in walk:
                counts[v] += 1
        return counts

    def to_text(self, names: Sequence[str]) -> str:
        return "".join(" ".join(names[v] for v in walk) + "\n" for walk in self.walks)

    def write(self, path: str | Path, names: Sequence[str]) -> None:
        Path(path).write_text(self.to_text(names), encoding="utf-8")

    @classmethod
    def from_text(cls, text: str, graph: LabeledGraph, walk_length: int, seed: int) -> WalkCorpus:
        index = graph.index()
        walks = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                walks.append(tuple(index[tok] for tok in line.split()))
            except KeyError as e:
                raise ValueError(f"line {lineno}: unknown vertex {e.args[0]!r}") from None
        return cls(tuple(walks), walk_length, seed, graph.num_vertices)


def _walk(graph: LabeledGraph, origin: int, steps: int, rng: np.random.Generator) -> tuple[int, ...]:
    walk = [origin]
    v = origin
    for _ in range(steps):
        nbrs = graph.adjacency[v]
        if not nbrs:
            break
        v = nbrs[int(rng.integers(len(nbrs)))]
        walk.append(v)
    return tuple(walk)


def generate_walks(graph: LabeledGraph, steps: int = 10, seed: int = 0) -> WalkCorpus:
    """One walk of up to ``steps`` uniform moves from every vertex.

    Each origin gets its own generator seeded from ``(seed, origin)``, so
    a walk does not depend on which other walks were generated.
    """
    if graph.num_vertices == 0:
        raise ValueError("graph has no vertices")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    walks = tuple(
        _walk(graph, v, steps, np.random.default_rng([seed, v])) for v in range(graph.num_vertices)
    )
    return WalkCorpus(walks, steps, seed, graph.num_vertices)


def iter_pairs(corpus: WalkCorpus, window: int = 5) -> Iterator[tuple[int, int]]:
    """Yield ``(input, context)`` for every offset ``0 < |d| <= window``.

    Offsets run ``-window .. -1`` then ``1 .. window``, clipped to the walk.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    for walk in corpus.walks:
        n = len(walk)
        for t, center in enumerate(walk):
            for s in range(max(0, t - window), t):
                yield center, walk[s]
            for s in range(t + 1, min(n, t + window + 1)):
                yield center, walk[s]


def pairs(corpus: WalkCorpus, window: int = 5) -> np.ndarray:
    """All training pairs as an ``(n, 2)`` int array in stream order."""
    out = np.fromiter(
        (x for pair in iter_pairs(corpus, window) for x in pair), dtype=np.int64
    )
    return out.reshape(-1, 2)


def pair_count(walk_length: int, window: int) -> int:
    """Closed-form number of pairs a walk of ``walk_length`` vertices emits."""
    return sum(min(t, window) + min(walk_length - 1 - t, window) for t in range(walk_length))


@dataclass(frozen=True)
class NoiseTable:
    probabilities: np.ndarray
    cumulative: np.ndarray
    exponent: float = 0.75

    def sample(self, size: int | tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
        u = rng.random(size)
        idx = np.searchsorted(self.cumulative, u, side="right")
        # guards u landing on the float tail of the cumulative sum
        return np.minimum(idx, len(self.probabilities) - 1)

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.probabilities > 0)


def noise_table_from_counts(counts: Sequence[float], exponent: float = 0.75) -> NoiseTable:
    counts = np.asarray(counts, dtype=np.float64)
    if counts.ndim != 1 or np.any(counts < 0):
        raise ValueError("counts must be a 1-d array of non-negative values")
    weights = np.where(counts > 0, counts, 0.0) ** exponent
    weights[counts == 0] = 0.0
    total = weights.sum()
    if total <= 0:
        raise ValueError("all counts are zero")
    probs = weights / total
    cumulative = np.cumsum(probs)
    # zero-probability tail entries must never be hit
    last = int(np.flatnonzero(probs)[-1])
    cumulative[last:] = 1.0
    return NoiseTable(probs, cumulative, exponent)


def build_noise_table(corpus: WalkCorpus, exponent: float = 0.75) -> NoiseTable:
    """Unigram counts from the corpus raised to ``exponent`` and normalized."""
    if not corpus.walks:
        raise ValueError("empty corpus")
    return noise_table_from_counts(corpus.counts(), exponent)


def draw_negatives(
    table: NoiseTable, k: int, exclude: int | None, rng: np.random.Generator
) -> np.ndarray:
    """``k`` independent draws from the noise distribution, redrawing ``exclude``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if exclude is not None:
        p = table.probabilities
        if p[exclude] >= 1.0 or (p > 0).sum() == 1 and p[exclude] > 0:
            raise ValueError(f"noise support is only the excluded vertex {exclude}")
    out = table.sample(k, rng)
    if exclude is None:
        return out
    bad = out == exclude
    while bad.any():
        out[bad] = table.sample(int(bad.sum()), rng)
        bad = out == exclude
    return out
