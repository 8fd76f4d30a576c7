from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, eye, zeros

from lpa.branching import validate_system
from lpa.equivrep import (B2BBasis, B2BFailure, MatrixRep, RepParseError, build_b2b_basis, conjugate,
                          extract_subspaces, format_rep, induced_system_and_intertwiner, parse_rep,
                          path_space_rep, random_invertible, validate_matrix_rep)
from lpa.generate import random_tree_rep
from lpa.graph import parse_graph
from lpa.qfield import QNum

from conftest import DATA

seeds = st.integers(0, 2**32 - 1)


@pytest.fixture
def e12():
    return parse_rep((DATA / "e12.rep").read_text())


def with_zero(rep: MatrixRep) -> MatrixRep:
    n = rep.dim + 1
    out = {}
    for k, m in rep.assign.items():
        big = zeros(n, n)
        big[: rep.dim, : rep.dim] = m
        out[k] = big
    return MatrixRep(n, out)


def test_rep_file_format(e12, edge_graph):
    assert e12.dim == 2 and e12["e"] == Matrix([[0, 1], [0, 0]])
    assert e12["missing"] == zeros(2, 2)
    assert parse_rep(format_rep(e12, edge_graph)).assign == e12.assign
    with pytest.raises(RepParseError, match="expected 4 entries"):
        parse_rep("dim 2\nmap e 1 2 3\n")
    with pytest.raises(RepParseError, match="dim"):
        parse_rep("map e 1\n")


def test_validate_examples(e12, edge_graph):
    assert validate_matrix_rep(edge_graph, e12) == []
    no_ghost = MatrixRep(2, {k: m for k, m in e12.assign.items() if k != "e*"})
    assert any(v.startswith("relation (3) e* e") for v in validate_matrix_rep(edge_graph, no_ghost))
    both_id = MatrixRep(2, {"v1": eye(2), "v2": eye(2)})
    assert any("not orthogonal" in v for v in validate_matrix_rep(edge_graph, both_id))
    assert validate_matrix_rep(edge_graph, MatrixRep(2, {"q": eye(2)})) == ["unknown generator q"]


def test_subspace_examples(e12, edge_graph, loop):
    t = extract_subspaces(edge_graph, e12)
    assert t.V_u["v1"] == Matrix([1, 0]) and t.V_u["v2"] == Matrix([0, 1])
    assert t.V_e["e"] == Matrix([1, 0]) and t.Vbar.cols == 0
    assert all(t.properties.values()) and sorted(t.properties) == list(range(1, 8))
    t = extract_subspaces(edge_graph, with_zero(e12))
    assert t.Vbar == Matrix([0, 0, 1]) and all(t.properties.values())
    one = parse_rep("dim 1\nmap * 1\nmap x 1\nmap x* 1\n")
    t = extract_subspaces(loop, one)
    assert t.V_u["*"] == Matrix([1]) and t.V_e["x"] == Matrix([1])


def test_b2b_examples(e12, edge_graph, loop):
    b = build_b2b_basis(edge_graph, e12)
    assert isinstance(b, B2BBasis)
    assert [b.vectors[x] for x in b.D["v2"]] == [(0, 1)]
    assert [b.vectors[x] for x in b.R["e"]] == [(1, 0)] and b.D["v1"] == b.R["e"]
    b = build_b2b_basis(loop, parse_rep("dim 1\nmap * 1\nmap x 1\nmap x* 1\n"))
    assert isinstance(b, B2BBasis) and b.vectors == [(1,)] and b.f["x"] == {0: 0}
    bad = parse_rep((DATA / "unipotent.rep").read_text())
    assert validate_matrix_rep(loop, bad) == [] and all(extract_subspaces(loop, bad).properties.values())
    res = build_b2b_basis(loop, bad)
    assert isinstance(res, B2BFailure) and res.cycle == "x"


def test_intertwiner_examples(e12, edge_graph, loop):
    b = build_b2b_basis(edge_graph, e12)
    eq = induced_system_and_intertwiner(edge_graph, e12, b)
    assert eq.ok and eq.Q == eye(2)
    x1, x2 = b.D["v1"][0], b.D["v2"][0]
    assert b.f["e"] == {x2: x1}
    assert eq.system.f["e"](QNum(x2)) == QNum(x1)
    one = parse_rep("dim 1\nmap * 1\nmap x 1\nmap x* 1\n")
    eq = induced_system_and_intertwiner(loop, one, build_b2b_basis(loop, one))
    assert eq.ok
    big = with_zero(e12)
    b = build_b2b_basis(edge_graph, big)
    eq = induced_system_and_intertwiner(edge_graph, big, b)
    assert len(b.bar) == 1 and eq.system.extra and eq.ok and all(eq.full.values())


def test_intertwiner_detects_a_wrong_basis(e12, edge_graph):
    b = build_b2b_basis(edge_graph, e12)
    wrong = B2BBasis([(1, 0), (1, 1)], b.D, b.R, b.bar, b.f)
    assert not induced_system_and_intertwiner(edge_graph, e12, wrong).ok


def test_tree_needing_sink_first_order():
    g = parse_graph("vertex q\nvertex p\nvertex c1\nvertex c2\nvertex w\n"
                    "edge f q p\nedge e1 p c1\nedge e2 p c2\nedge g q w\n")
    rep = path_space_rep(g, {"c1": 2}, 1)
    rep = conjugate(rep, random_invertible(random.Random(7), rep.dim))
    b = build_b2b_basis(g, rep)
    assert isinstance(b, B2BBasis)
    assert induced_system_and_intertwiner(g, rep, b).ok


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_random_tree_pipeline(seed):
    g, rep = random_tree_rep(random.Random(seed))
    assert rep.dim <= 8
    assert validate_matrix_rep(g, rep) == []
    t = extract_subspaces(g, rep)
    assert all(t.properties.values())
    b = build_b2b_basis(g, rep, t)
    assert isinstance(b, B2BBasis), str(b)
    eq = induced_system_and_intertwiner(g, rep, b)
    assert validate_system(eq.system) == []
    for e in g.edges:
        assert sorted(b.f[e]) == sorted(b.D[g.rng[e]]) and sorted(b.f[e].values()) == sorted(b.R[e])
    assert eq.ok


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_permutation_loop_reps(seed):
    """A loop acting by a permutation matrix keeps the standard basis."""
    rng = random.Random(seed)
    loop = parse_graph("vertex *\nedge x * *\n")
    n = rng.randint(1, 5)
    perm = list(range(n))
    rng.shuffle(perm)
    X = zeros(n, n)
    for i, j in enumerate(perm):
        X[j, i] = 1
    rep = MatrixRep(n, {"*": eye(n), "x": X, "x*": X.T})
    assert validate_matrix_rep(loop, rep) == []
    b = build_b2b_basis(loop, rep)
    assert isinstance(b, B2BBasis)
    assert induced_system_and_intertwiner(loop, rep, b).ok
