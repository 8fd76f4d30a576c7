from __future__ import annotations

import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix

from lpa.generate import random_graph, random_tree
from lpa.graph import (Graph, GraphError, Path, closed_paths_from, condition_L, connected_components,
                       format_graph, is_p_simple, is_row_finite, level_decomposition, non_isolated,
                       parse_graph, paths_of_length, simple_cycles, sinks, unoriented_paths, validate_graph)

seeds = st.integers(0, 2**32 - 1)


def names(paths):
    return {str(p) for p in paths}


def test_validate_examples(loop):
    assert validate_graph(loop) == []
    assert validate_graph(Graph.from_edges([], [])) == []
    with pytest.raises(GraphError, match="dangling endpoint"):
        parse_graph("vertex v1\nedge e v1 v2\n")
    bad = Graph.from_edges(["v1"], [("e", "v1", "v2")], check=False)
    assert any("dangling endpoint" in m for m in validate_graph(bad))


def test_validate_reports_every_problem():
    g = Graph.from_edges(["a", "a", "e"], [("e", "a", "a"), ("f", "a", "zz")], check=False)
    errs = validate_graph(g)
    assert any("duplicate" in m for m in errs)
    assert any("collision" in m for m in errs)
    assert any("dangling" in m for m in errs)


def test_parse_format_roundtrip(rose):
    assert parse_graph(format_graph(rose)) == rose
    with pytest.raises(GraphError, match="cannot parse"):
        parse_graph("vertex\n")


def test_paths_of_length(rose, path3, loop):
    assert names(paths_of_length(rose, 2)) == {"a.a", "a.b", "b.a", "b.b"}
    assert names(paths_of_length(path3, 2)) == {"e1.e2"}
    assert names(paths_of_length(loop, 3)) == {"x.x.x"}
    assert names(paths_of_length(path3, 0)) == {"v1", "v2", "v3"}


def test_sinks_and_row_finite(edge_graph, loop, rose):
    assert sinks(edge_graph) == ["v2"]
    assert sinks(loop) == []
    assert sinks(Graph.from_edges(["w"], [])) == ["w"]
    assert all(is_row_finite(g) for g in (rose, loop, edge_graph))


def test_condition_l(loop, rose, path3):
    ok, bad = condition_L(loop)
    assert not ok and names(bad) == {"x"}
    assert condition_L(rose) == (True, [])
    assert condition_L(path3) == (True, [])


def test_closed_paths(loop, rose, path3):
    assert names(closed_paths_from(loop, "*", 2)) == {"x", "x.x"}
    assert names(closed_paths_from(rose, "v", 1)) == {"a", "b"}
    assert closed_paths_from(path3, "v1", 5) == []


def test_components():
    g = parse_graph("vertex v1\nvertex v2\nvertex w\nedge e v1 v2\n")
    assert connected_components(g) == ([["v1", "v2"]], ["w"])
    two = parse_graph("vertex a\nvertex b\nvertex c\nvertex d\nedge e a b\nedge f c d\n")
    assert len(connected_components(two)[0]) == 2


def test_loop_components(loop):
    assert connected_components(loop) == ([["*"]], [])


def test_p_simple_examples(loop, path3):
    ok, w = is_p_simple(loop)
    assert not ok and w == ("x",)
    assert is_p_simple(path3) == (True, None)
    dbl = parse_graph("vertex v1\nvertex v2\nedge e v1 v2\nedge f v1 v2\n")
    ok, w = is_p_simple(dbl)
    assert not ok and len(w) == 2 and w[0] != w[1]


def test_levels_examples(path3, edge_graph, loop):
    lv = level_decomposition(path3)
    assert lv.X == (("v1", "v3"),) and lv.Y == (("e1", "e2"),) and lv.leftover == ("v2",)
    lv = level_decomposition(edge_graph)
    assert lv.X == (("v1", "v2"),) and lv.Y == (("e",),) and lv.leftover == ()
    lv = level_decomposition(loop)
    assert lv.X == () and lv.leftover == ("*",)


def test_unoriented_paths_repeat_vertices_not_edges():
    g = parse_graph("vertex u\nvertex v\nedge e u v\nedge f v u\n")
    ps = unoriented_paths(g, "u", "v")
    assert {p.edges for p in ps} == {("e",), ("f",)}
    for p in ps:
        assert len(set(p.edges)) == len(p.edges)


def adjacency(g: Graph) -> Matrix:
    ix = {v: i for i, v in enumerate(g.vertices)}
    A = Matrix.zeros(len(g.vertices), len(g.vertices))
    for e in g.edges:
        A[ix[g.src[e]], ix[g.rng[e]]] += 1
    return A


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(0, 4))
def test_path_counts_match_adjacency_powers(seed, n):
    g = random_graph(random.Random(seed), max_vertices=5, max_edges=7)
    ps = paths_of_length(g, n)
    assert len(set(ps)) == len(ps)
    assert len(ps) == sum(adjacency(g) ** n) if g.vertices else len(ps) == 0
    for p in ps:
        assert g.path(*p.edges, vertex=p.src) == p


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_concatenation_stays_in_path_sets(seed):
    g = random_graph(random.Random(seed), max_vertices=5, max_edges=7)
    e2 = set(paths_of_length(g, 2))
    for p in paths_of_length(g, 1):
        for q in paths_of_length(g, 1):
            if p.rng == q.src:
                assert p + q in e2


def undirected(g: Graph) -> nx.MultiGraph:
    m = nx.MultiGraph()
    m.add_nodes_from(non_isolated(g))
    m.add_edges_from((g.src[e], g.rng[e]) for e in g.edges)
    return m


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_p_simple_is_forest(seed):
    g = random_graph(random.Random(seed), max_vertices=6, max_edges=6)
    ok, _ = is_p_simple(g)
    assert ok == (nx.is_forest(undirected(g)) if non_isolated(g) else True)
    if any(g.src[e] == g.rng[e] for e in g.edges):
        assert not ok


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_levels_partition(seed):
    g = random_graph(random.Random(seed), max_vertices=7, max_edges=8)
    lv = level_decomposition(g)
    seen = [v for xs in lv.X for v in xs] + list(lv.leftover)
    assert len(seen) == len(set(seen))
    _, isolated = connected_components(g)
    assert set(seen) | set(isolated) == set(g.vertices)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_levels_on_trees_leave_at_most_one(seed):
    g = random_tree(random.Random(seed), max_vertices=9)
    assert is_p_simple(g)[0]
    assert len(level_decomposition(g).leftover) <= 1


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_simple_cycles_match_networkx(seed):
    g = random_graph(random.Random(seed), max_vertices=5, max_edges=7)
    dg = nx.MultiDiGraph()
    dg.add_nodes_from(g.vertices)
    for e in g.edges:
        dg.add_edge(g.src[e], g.rng[e], key=e)
    # networkx counts vertex cycles; expand by parallel edges
    expected = 0
    for cyc in nx.simple_cycles(nx.DiGraph(dg)):
        mult = 1
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            mult *= dg.number_of_edges(a, b)
        expected += mult
    assert len(simple_cycles(g)) == expected
