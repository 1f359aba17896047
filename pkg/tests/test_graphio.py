from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from hyperskip import graphio
from hyperskip.graphio import (
    GraphParseError,
    build_graph,
    drop_isolated,
    largest_component,
    load_labels,
    parse_edge_list,
    parse_gml,
    stats,
)

DATA = Path(__file__).resolve().parents[1] / "data"

edge_lists = st.lists(
    st.tuples(st.integers(0, 12), st.integers(0, 12)), min_size=1, max_size=60
)


def _text(edges):
    return "".join(f"v{a} v{b}\n" for a, b in edges)


def test_edge_list_basic():
    g = parse_edge_list("a b\nb c")
    assert g.num_vertices == 3
    assert g.num_edges == 2
    b = g.index()["b"]
    assert {g.names[v] for v in g.neighbors(b)} == {"a", "c"}


def test_edge_list_dedup():
    g = parse_edge_list("a b\nb a\na b")
    assert g.num_edges == 1
    assert g.dropped_duplicates == 2


def test_edge_list_comments_and_self_loops():
    g = parse_edge_list("# header\n\na a\na b\n")
    assert g.num_edges == 1
    assert g.dropped_self_loops == 1


def test_edge_list_first_appearance_order():
    g = parse_edge_list("z y\nx z\n")
    assert g.names == ("z", "y", "x")


def test_edge_list_errors():
    with pytest.raises(GraphParseError) as e:
        parse_edge_list("a b\na b c\n")
    assert e.value.line == 2
    with pytest.raises(GraphParseError):
        parse_edge_list("# only a comment\n")


@given(edge_lists)
def test_symmetry_and_no_self_loops(edges):
    g = parse_edge_list(_text(edges))
    for i in range(g.num_vertices):
        assert i not in g.neighbors(i)
        assert list(g.neighbors(i)) == sorted(set(g.neighbors(i)))
        for j in g.neighbors(i):
            assert g.has_edge(j, i)


@given(edge_lists)
def test_deterministic_indexing(edges):
    text = _text(edges)
    assert parse_edge_list(text) == parse_edge_list(text)


def _edge_set(g):
    return {frozenset((g.names[i], g.names[j])) for i, j in g.edges()}


@given(edge_lists)
def test_roundtrip_edge_list(edges):
    g = parse_edge_list(_text(edges))
    if g.num_edges == 0:
        return
    h = parse_edge_list(graphio.to_edge_list(g))
    assert _edge_set(h) == _edge_set(g)


@given(edge_lists)
def test_roundtrip_json(edges):
    g = parse_edge_list(_text(edges))
    h = graphio.from_json(graphio.to_json(g))
    assert h.names == g.names
    assert h.adjacency == g.adjacency


MINIMAL_GML = """
graph
[
  directed 0
  node [ id 1 label "A" ]
  node [ id 2 label "B" ]
  edge [ source 1 target 2 ]
]
"""


def test_gml_minimal():
    g = parse_gml(MINIMAL_GML)
    assert (g.num_vertices, g.num_edges) == (2, 1)
    assert g.names == ("A", "B")
    assert g.labels is None


def test_gml_value_becomes_label():
    text = """Creator "someone"
    graph [
      node [ id 0 label "x" value 1 weird [ nested 2 ] ]
      node [ id 1 label "y" value 0 ]
      node [ id 2 label "z" value 1 ]
      edge [ source 0 target 1 value 3.5 ]
      edge [ source 2 target 1 ]
    ]"""
    g = parse_gml(text)
    assert g.label_names == ("1", "0")
    assert g.labels == (0, 1, 0)
    assert g.num_edges == 2


def test_gml_string_values():
    text = 'graph [ node [ id 0 value "l" ] node [ id 1 value "c" ] edge [ source 0 target 1 ] ]'
    g = parse_gml(text)
    assert g.label_names == ("l", "c")
    assert g.names == ("0", "1")


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("graph [ node [ id 0 ]", "unbalanced"),
        ("graph [ node [ id 0 ] ] ]", "unbalanced"),
        ("graph [ node [ id 0 ] edge [ source 0 target 7 ] ]", "unknown node id"),
        ("graph [ node [ id 0 ] node [ id 0 ] ]", "duplicate node id"),
        ("graph [ node [ label \"a\" ] ]", "without id"),
        ("nodes [ ]", "no 'graph"),
    ],
)
def test_gml_errors(text, fragment):
    with pytest.raises(GraphParseError, match=fragment):
        parse_gml(text)


def test_gml_error_reports_line():
    with pytest.raises(GraphParseError) as e:
        parse_gml("graph [\n node [ id 0 ]\n edge [ source 0 target 9 ]\n]")
    assert e.value.line == 3


def test_labels():
    g = parse_edge_list("a b\nb c\n")
    g2 = load_labels("a\tred\nb\tblue\nc\tred\n", g)
    assert g2.label_names == ("red", "blue")
    assert g2.labels == (0, 1, 0)
    s = stats(g2)
    assert s.class_count == 2
    assert s.largest_class_fraction == pytest.approx(2 / 3)
    assert sum(s.class_fractions) == pytest.approx(1.0, abs=1e-12)


def test_labels_empty_and_repeated():
    g = parse_edge_list("a b\n")
    assert load_labels("", g) is g
    g2 = load_labels("a\tx\na\tx\nb\ty\n", g)
    assert g2.labels == (0, 1)


def test_labels_errors():
    g = parse_edge_list("a b\n")
    with pytest.raises(GraphParseError, match="unknown vertex"):
        load_labels("q\tx\n", g)
    with pytest.raises(GraphParseError, match="labeled"):
        load_labels("a\tx\na\ty\nb\tx\n", g)


def test_stats_single_vertex():
    g = build_graph(["only"], [])
    s = stats(g)
    assert (s.vertex_count, s.edge_count, s.class_count, s.largest_class_fraction) == (1, 0, None, None)


def test_karate_files():
    g = graphio.read_graph(DATA / "karate.edgelist", labels=DATA / "karate.labels")
    s = stats(g)
    assert s.vertex_count == 34
    assert s.edge_count == 78
    assert s.class_count == 2
    assert round(s.largest_class_fraction, 2) == 0.53
    gml = graphio.read_graph(DATA / "karate.gml")
    assert _edge_set(gml) == _edge_set(g)
    assert [gml.label_names[y] for y in gml.labels] == [g.label_names[g.labels[g.index()[n]]] for n in gml.names]


def test_prune_helpers():
    g = build_graph(["a", "b", "c", "d", "e", "f"], [(0, 1), (1, 2), (3, 4)], [0, 0, 1, 1, 1, 2], ["x", "y", "z"])
    iso = drop_isolated(g)
    assert iso.names == ("a", "b", "c", "d", "e")
    assert iso.label_names == ("x", "y")
    lcc = largest_component(g)
    assert lcc.names == ("a", "b", "c")
    assert lcc.num_edges == 2
    assert [lcc.label_names[y] for y in lcc.labels] == ["x", "x", "y"]


BLOG_SHAPED_GML = """Creator "someone on some date"
graph
[
  directed 1
  node
  [
    id 1
    label "a.example.com"
    value 0
    source "Directory"
  ]
  node
  [
    id 2
    label "b.example.com/blog"
    value 0
    source "Other"
  ]
  node [ id 3 label "c.example.org" value 1 source "x" ]
  edge
  [
    source 1
    target 2
  ]
  edge [ source 2 target 1 ]
  edge [ source 2 target 1 ]
  edge [ source 2 target 2 ]
]
"""


def test_gml_directed_multigraph_with_node_metadata():
    # node-level "source" is metadata, not an edge endpoint
    g = parse_gml(BLOG_SHAPED_GML)
    assert g.names == ("a.example.com", "b.example.com/blog", "c.example.org")
    assert g.num_edges == 1
    assert (g.dropped_duplicates, g.dropped_self_loops) == (2, 1)
    pruned = drop_isolated(g)
    assert pruned.num_vertices == 2
    assert pruned.label_names == ("0",)
