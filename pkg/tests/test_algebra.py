from __future__ import annotations

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from lpa.algebra import (Element, Monomial, ParseError, designated_edges, find_separating_path,
                         format_element, is_normal, is_zero_syntactic, laurent, multiply, normal_form,
                         parse_element, relations, star, unit)
from lpa.generate import random_element, random_graph, random_zero

seeds = st.integers(0, 2**32 - 1)


def P(g, s):
    return parse_element(g, s)


def nf(g, x):
    return normal_form(g, x)


def test_parse_examples(loop, rose, edge_graph):
    x = P(loop, "x.x* - *")
    assert len(x) == 2
    assert P(rose, "a*.b").is_empty
    with pytest.raises(ParseError, match="unknown id 'q'"):
        P(edge_graph, "v1 + q")
    with pytest.raises(ParseError, match="non-composable"):
        P(edge_graph, "e.v1")
    # ghost-before-real words are multiplied out rather than rejected
    assert P(edge_graph, "e.e*.e.v2.e").is_empty
    assert P(loop, "0").is_empty
    assert format_element(P(rose, "2 a.b* - 3 v + 1/2")) == "-5/2 v + 2 a.b*"


def test_multiply_examples(loop, rose):
    assert multiply(P(loop, "x*"), P(loop, "x")) == P(loop, "*")
    assert multiply(P(rose, "a.b*"), P(rose, "b.a*")) == P(rose, "a.a*")
    assert multiply(P(rose, "a*"), P(rose, "b")).is_empty


def test_star_examples(rose):
    assert star(P(rose, "a.b*")) == P(rose, "b.a*")
    assert star(P(rose, "v")) == P(rose, "v")
    x = P(rose, "2 a.b.a* - b*")
    assert star(star(x)) == x


def test_normal_form_examples(loop, rose, edge_graph):
    assert designated_edges(rose) == {"v": "b"}
    assert nf(loop, P(loop, "x.x*")) == P(loop, "*")
    assert nf(rose, P(rose, "a.a* + b.b* - v")).is_empty
    assert nf(edge_graph, P(edge_graph, "e.e* - v1")).is_empty


def test_zero_test_examples(loop, rose):
    assert is_zero_syntactic(loop, P(loop, "x.x* - *"))
    assert not is_zero_syntactic(loop, P(loop, "x - *"))
    assert is_zero_syntactic(rose, P(rose, "0"))


def test_separating_path_examples(loop, rose, edge_graph):
    assert find_separating_path(loop, P(loop, "x.x* - *"), 2) is None
    assert str(find_separating_path(loop, P(loop, "x - *"), 2)) == "x.x"
    assert str(find_separating_path(rose, P(rose, "a.b*"), 1)) == "b"
    with pytest.raises(ValueError):
        find_separating_path(edge_graph, P(edge_graph, "e"), 1)


def test_laurent_monomials(loop):
    x = laurent(loop, "x", {2: 1, -1: 3, 0: -1})
    assert x == P(loop, "x.x + 3 x* - *")


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_relations_reduce_to_zero(seed):
    g = random_graph(random.Random(seed), max_vertices=5, max_edges=7)
    for label, rel in relations(g):
        assert nf(g, rel).is_empty, label


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_ring_laws_after_normal_form(seed):
    rng = random.Random(seed)
    g = random_graph(rng, max_vertices=4, max_edges=6, sinks="none")
    x, y, z = (random_element(rng, g, 4, 3) for _ in range(3))
    assert nf(g, (x * y) * z) == nf(g, x * (y * z))
    assert nf(g, x * (y + z)) == nf(g, x * y + x * z)
    assert nf(g, star(x * y)) == nf(g, star(y) * star(x))
    assert nf(g, x * unit(g)) == nf(g, x) == nf(g, unit(g) * x)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_normal_form_is_idempotent_projection(seed):
    rng = random.Random(seed)
    g = random_graph(rng, max_vertices=5, max_edges=8)
    x, y = random_element(rng, g), random_element(rng, g)
    n = nf(g, x)
    assert is_normal(g, n)
    assert nf(g, n) == n
    assert nf(g, x * y) == nf(g, nf(g, x) * nf(g, y))
    assert nf(g, x - n).is_empty


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_hidden_zeros_are_detected(seed):
    rng = random.Random(seed)
    g = random_graph(rng, max_vertices=5, max_edges=8)
    z = random_zero(rng, g)
    if z is not None:
        assert is_zero_syntactic(g, z)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_text_roundtrip(seed):
    rng = random.Random(seed)
    g = random_graph(rng, max_vertices=5, max_edges=8)
    x = random_element(rng, g)
    assert P(g, format_element(x)) == x


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_separating_path_is_nonzero(seed):
    rng = random.Random(seed)
    g = random_graph(rng, max_vertices=4, max_edges=6, sinks="none")
    x = random_element(rng, g, 4, 3)
    c = find_separating_path(g, x, 4)
    if is_zero_syntactic(g, x):
        assert c is None
    else:
        assert c is not None and len(c) == 4
        assert not is_zero_syntactic(g, x * Element.of(Monomial.of_path(c)))
