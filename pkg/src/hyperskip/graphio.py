"""Graph ingestion: edge lists, a GML subset, label files and a JSON export.

Every loader produces a :class:`LabeledGraph`: undirected, without
self-loops or duplicate edges, vertices numbered by first appearance.
"""

from __future__ import annotations

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)


class GraphParseError(ValueError):
    """Raised for malformed graph or label input."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


@dataclass(frozen=True)
class LabeledGraph:
    names: tuple[str, ...]
    adjacency: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...] | None = None
    label_names: tuple[str, ...] = ()
    dropped_self_loops: int = field(default=0, compare=False)
    dropped_duplicates: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        if len(self.names) != len(self.adjacency):
            raise ValueError("names and adjacency differ in length")
        if self.labels is not None:
            if len(self.labels) != len(self.names):
                raise ValueError("labels and names differ in length")
            k = len(self.label_names)
            if any(not 0 <= y < k for y in self.labels):
                raise ValueError("label id out of range")

    @property
    def num_vertices(self) -> int:
        return len(self.names)

    @property
    def num_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    @property
    def num_classes(self) -> int | None:
        return len(self.label_names) if self.labels is not None else None

    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def has_edge(self, i: int, j: int) -> bool:
        nbrs = self.adjacency[i]
        # adjacency lists are sorted
        lo, hi = 0, len(nbrs)
        while lo < hi:
            mid = (lo + hi) // 2
            if nbrs[mid] < j:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(nbrs) and nbrs[lo] == j

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges as ``(i, j)`` with ``i < j``, sorted."""
        return [(i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j]


@dataclass(frozen=True)
class DatasetStats:
    vertex_count: int
    edge_count: int
    class_count: int | None = None
    largest_class_fraction: float | None = None
    class_fractions: tuple[float, ...] | None = None


def build_graph(
    names: Sequence[str],
    edges: Iterable[tuple[int, int]],
    labels: Sequence[int] | None = None,
    label_names: Sequence[str] = (),
) -> LabeledGraph:
    """Normalize raw (possibly directed, repeated) edges into a LabeledGraph."""
    n = len(names)
    nbrs: list[set[int]] = [set() for _ in range(n)]
    self_loops = 0
    raw = 0
    for i, j in edges:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge ({i}, {j}) references an unknown vertex")
        if i == j:
            self_loops += 1
            continue
        raw += 1
        nbrs[i].add(j)
        nbrs[j].add(i)
    adjacency = tuple(tuple(sorted(s)) for s in nbrs)
    unique = sum(len(s) for s in nbrs) // 2
    duplicates = raw - unique
    if self_loops or duplicates:
        logger.warning(
            "dropped %d self-loops and %d duplicate/reciprocal edges", self_loops, duplicates
        )
    return LabeledGraph(
        names=tuple(names),
        adjacency=adjacency,
        labels=tuple(labels) if labels is not None else None,
        label_names=tuple(label_names),
        dropped_self_loops=self_loops,
        dropped_duplicates=duplicates,
    )


def parse_edge_list(text: str, directed_hint: bool = False, source: str | None = None) -> LabeledGraph:
    """Parse a whitespace-separated edge list.

    ``directed_hint`` only affects logging: directed inputs are always
    symmetrized, so reciprocal arcs collapse into one undirected edge.
    """
    index: dict[str, int] = {}
    names: list[str] = []
    edges: list[tuple[int, int]] = []

    def vid(name: str) -> int:
        if name not in index:
            index[name] = len(names)
            names.append(name)
        return index[name]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError(f"expected two vertex names, got {len(parts)} tokens", lineno, source)
        edges.append((vid(parts[0]), vid(parts[1])))

    if not names:
        raise GraphParseError("empty edge list", source=source)
    if directed_hint:
        logger.info("symmetrizing directed input with %d arcs", len(edges))
    return build_graph(names, edges)


# --- GML subset -------------------------------------------------------------

_GML_TOKEN = re.compile(
    r'(?P<comment>#[^\n]*)|(?P<open>\[)|(?P<close>\])|"(?P<string>[^"]*)"'
    r"|(?P<number>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?![\w.])"
    r"|(?P<key>[A-Za-z_][A-Za-z0-9_]*)|(?P<space>\s+)|(?P<bad>.)",
    re.DOTALL,
)


def _gml_tokens(text: str, source: str | None):
    line = 1
    for m in _GML_TOKEN.finditer(text):
        kind = m.lastgroup
        value = m.group(kind)
        if kind == "bad":
            raise GraphParseError(f"unexpected character {value!r}", line, source)
        if kind not in ("space", "comment"):
            yield kind, value, line
        line += value.count("\n")


def _gml_number(text: str) -> int | float:
    try:
        return int(text)
    except ValueError:
        return float(text)


def _parse_gml_list(tokens, source: str | None, depth: int) -> list[tuple[str, object, int]]:
    items: list[tuple[str, object, int]] = []
    for kind, value, line in tokens:
        if kind == "close":
            if depth == 0:
                raise GraphParseError("unbalanced ']'", line, source)
            return items
        if kind != "key":
            raise GraphParseError(f"expected a key, got {value!r}", line, source)
        try:
            vkind, vvalue, vline = next(tokens)
        except StopIteration:
            raise GraphParseError(f"key {value!r} has no value", line, source) from None
        if vkind == "open":
            items.append((value, _parse_gml_list(tokens, source, depth + 1), line))
        elif vkind == "number":
            items.append((value, _gml_number(vvalue), line))
        elif vkind == "string":
            items.append((value, vvalue, line))
        else:
            raise GraphParseError(f"bad value for key {value!r}", vline, source)
    if depth != 0:
        raise GraphParseError("unbalanced '[': input ended inside a block", source=source)
    return items


def parse_gml(text: str, source: str | None = None) -> LabeledGraph:
    """Parse the GML subset used by the common network-science datasets.

    Recognized: a ``graph`` block holding ``node`` blocks (``id`` plus an
    optional ``label`` and/or ``value``) and ``edge`` blocks (``source``,
    ``target``). Other keys are skipped. When a node carries ``value`` it is
    the class; otherwise no labels are attached. ``label`` becomes the
    vertex name when present.
    """
    top = _parse_gml_list(_gml_tokens(text, source), source, 0)
    graphs = [(v, line) for k, v, line in top if k == "graph"]
    if not graphs:
        raise GraphParseError("no 'graph [ ... ]' block", source=source)
    body, _ = graphs[0]
    if not isinstance(body, list):
        raise GraphParseError("'graph' must be a block", source=source)

    ids: dict[object, int] = {}
    names: list[str] = []
    values: list[object] = []
    raw_edges: list[tuple[object, object, int]] = []
    for key, val, line in body:
        if key == "node":
            if not isinstance(val, list):
                raise GraphParseError("'node' must be a block", line, source)
            attrs = {k: v for k, v, _ in val}
            if "id" not in attrs:
                raise GraphParseError("node without id", line, source)
            nid = attrs["id"]
            if nid in ids:
                raise GraphParseError(f"duplicate node id {nid!r}", line, source)
            ids[nid] = len(names)
            names.append(str(attrs.get("label", nid)))
            values.append(attrs.get("value"))
        elif key == "edge":
            if not isinstance(val, list):
                raise GraphParseError("'edge' must be a block", line, source)
            attrs = {k: v for k, v, _ in val}
            if "source" not in attrs or "target" not in attrs:
                raise GraphParseError("edge without source/target", line, source)
            raw_edges.append((attrs["source"], attrs["target"], line))

    if not names:
        raise GraphParseError("graph has no nodes", source=source)
    if len(set(names)) != len(names):
        # labels are not unique; fall back to ids so names stay keys
        names = [str(nid) for nid in ids]

    edges = []
    for s, t, line in raw_edges:
        for end in (s, t):
            if end not in ids:
                raise GraphParseError(f"edge references unknown node id {end!r}", line, source)
        edges.append((ids[s], ids[t]))

    labels = None
    label_names: list[str] = []
    if any(v is not None for v in values):
        if any(v is None for v in values):
            raise GraphParseError("some nodes carry 'value' and some do not", source=source)
        class_ids: dict[str, int] = {}
        labels = []
        for v in values:
            key = str(v)
            if key not in class_ids:
                class_ids[key] = len(label_names)
                label_names.append(key)
            labels.append(class_ids[key])
    return build_graph(names, edges, labels, label_names)


def load_labels(text: str, graph: LabeledGraph, source: str | None = None) -> LabeledGraph:
    """Attach ``name<TAB>class`` labels; class ids follow first appearance.

    Vertices the file does not mention are an error once any label is
    given, since downstream evaluation needs every vertex labeled.
    """
    index = graph.index()
    assigned: dict[int, str] = {}
    class_ids: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = raw.rstrip("\r\n").split("\t")
        if len(parts) != 2:
            parts = line.split()
        if len(parts) != 2:
            raise GraphParseError("expected 'vertex<TAB>class'", lineno, source)
        name, cls = parts[0].strip(), parts[1].strip()
        if name not in index:
            raise GraphParseError(f"unknown vertex {name!r}", lineno, source)
        v = index[name]
        if v in assigned and assigned[v] != cls:
            raise GraphParseError(
                f"vertex {name!r} labeled {assigned[v]!r} and {cls!r}", lineno, source
            )
        assigned[v] = cls
        class_ids.setdefault(cls, len(class_ids))
    if not assigned:
        return graph
    missing = [graph.names[v] for v in range(graph.num_vertices) if v not in assigned]
    if missing:
        raise GraphParseError(f"{len(missing)} vertices have no label, e.g. {missing[0]!r}", source=source)
    labels = tuple(class_ids[assigned[v]] for v in range(graph.num_vertices))
    return replace(graph, labels=labels, label_names=tuple(class_ids))


def stats(graph: LabeledGraph) -> DatasetStats:
    if graph.labels is None:
        return DatasetStats(graph.num_vertices, graph.num_edges)
    counts = Counter(graph.labels)
    n = len(graph.labels)
    fractions = tuple(counts.get(c, 0) / n for c in range(len(graph.label_names)))
    return DatasetStats(
        vertex_count=graph.num_vertices,
        edge_count=graph.num_edges,
        class_count=len(graph.label_names),
        largest_class_fraction=max(counts.values()) / n,
        class_fractions=fractions,
    )


def induced_subgraph(graph: LabeledGraph, keep: Sequence[int]) -> LabeledGraph:
    """Subgraph on ``keep`` (in the given order); unused classes are dropped."""
    remap = {v: i for i, v in enumerate(keep)}
    names = [graph.names[v] for v in keep]
    edges = [(remap[i], remap[j]) for i, j in graph.edges() if i in remap and j in remap]
    labels = None
    label_names: tuple[str, ...] = ()
    if graph.labels is not None:
        old = [graph.labels[v] for v in keep]
        order = list(dict.fromkeys(old))
        relabel = {c: k for k, c in enumerate(order)}
        labels = [relabel[c] for c in old]
        label_names = tuple(graph.label_names[c] for c in order)
    return build_graph(names, edges, labels, label_names)


def drop_isolated(graph: LabeledGraph) -> LabeledGraph:
    return induced_subgraph(graph, [v for v in range(graph.num_vertices) if graph.adjacency[v]])


def largest_component(graph: LabeledGraph) -> LabeledGraph:
    """Restrict to the largest connected component, keeping vertex order."""
    n = graph.num_vertices
    comp = [-1] * n
    sizes: list[int] = []
    for start in range(n):
        if comp[start] >= 0:
            continue
        cid = len(sizes)
        comp[start] = cid
        stack = [start]
        size = 0
        while stack:
            v = stack.pop()
            size += 1
            for w in graph.adjacency[v]:
                if comp[w] < 0:
                    comp[w] = cid
                    stack.append(w)
        sizes.append(size)
    best = max(range(len(sizes)), key=lambda c: (sizes[c], -c))
    return induced_subgraph(graph, [v for v in range(n) if comp[v] == best])


# --- files --------------------------------------------------------------------


def to_json(graph: LabeledGraph) -> str:
    nodes = []
    for i, name in enumerate(graph.names):
        label = graph.label_names[graph.labels[i]] if graph.labels is not None else None
        nodes.append({"id": i, "name": name, "label": label})
    return json.dumps({"nodes": nodes, "edges": [list(e) for e in graph.edges()]}, indent=1)


def from_json(text: str) -> LabeledGraph:
    data = json.loads(text)
    nodes = sorted(data["nodes"], key=lambda n: n["id"])
    if [n["id"] for n in nodes] != list(range(len(nodes))):
        raise GraphParseError("node ids must be 0..n-1")
    names = [n["name"] for n in nodes]
    edges = [tuple(e) for e in data["edges"]]
    labels = None
    label_names: list[str] = []
    if nodes and all(n.get("label") is not None for n in nodes):
        ids: dict[str, int] = {}
        labels = [ids.setdefault(n["label"], len(ids)) for n in nodes]
        label_names = list(ids)
    return build_graph(names, edges, labels, label_names)


def to_edge_list(graph: LabeledGraph) -> str:
    return "".join(f"{graph.names[i]} {graph.names[j]}\n" for i, j in graph.edges())


def to_label_tsv(graph: LabeledGraph) -> str:
    if graph.labels is None:
        return ""
    return "".join(
        f"{name}\t{graph.label_names[y]}\n" for name, y in zip(graph.names, graph.labels)
    )


def read_graph(
    path: str | Path,
    fmt: str | None = None,
    labels: str | Path | None = None,
    directed_hint: bool = False,
) -> LabeledGraph:
    """Load a graph file, inferring the format from the suffix when ``fmt`` is None."""
    path = Path(path)
    if fmt is None:
        fmt = {".gml": "gml", ".json": "json"}.get(path.suffix.lower(), "edgelist")
    text = path.read_text(encoding="utf-8")
    if fmt == "gml":
        graph = parse_gml(text, source=str(path))
    elif fmt == "edgelist":
        graph = parse_edge_list(text, directed_hint=directed_hint, source=str(path))
    elif fmt == "json":
        graph = from_json(text)
    else:
        raise ValueError(f"unknown graph format {fmt!r}")
    if labels is not None:
        graph = load_labels(Path(labels).read_text(encoding="utf-8"), graph, source=str(labels))
    return graph
