"""Seeded random graphs, elements and representations for property tests,
acceptance runs and demos."""

from __future__ import annotations

import random
from fractions import Fraction

from .algebra import Element, Monomial, laurent, multiply, star, vertex
from .equivrep import MatrixRep, conjugate, path_space_rep, random_invertible
from .graph import Graph, Path
from .qfield import QNum, rational_between

COEFFS = [Fraction(c) for c in (-3, -2, -1, 1, 2, 3)] + [Fraction(1, 2), Fraction(-2, 3)]


def random_graph(rng: random.Random, max_vertices: int = 8, max_edges: int = 12,
                 sinks: str = "any") -> Graph:
    """``sinks`` is ``"none"`` (every vertex emits), ``"some"`` (at least one
    sink) or ``"any"``."""
    if sinks == "none":
        n = rng.randint(1, min(max_vertices, max_edges))
        vs = [f"v{i}" for i in range(n)]
        srcs = list(vs) + [rng.choice(vs) for _ in range(rng.randint(0, max_edges - n))]
    elif sinks == "some":
        n = rng.randint(2, max_vertices)
        vs = [f"v{i}" for i in range(n)]
        emitters = rng.sample(vs, rng.randint(1, n - 1))
        srcs = [rng.choice(emitters) for _ in range(rng.randint(1, max_edges))]
    else:
        n = rng.randint(1, max_vertices)
        vs = [f"v{i}" for i in range(n)]
        srcs = [rng.choice(vs) for _ in range(rng.randint(0, max_edges))]
    rng.shuffle(srcs)
    edges = [(f"e{i}", s, rng.choice(vs)) for i, s in enumerate(srcs)]
    return Graph.from_edges(vs, edges)


def random_tree(rng: random.Random, max_vertices: int = 6, min_vertices: int = 2) -> Graph:
    """Connected P-simple graph: a randomly oriented spanning tree."""
    n = rng.randint(min_vertices, max_vertices)
    vs = [f"v{i}" for i in range(n)]
    edges = []
    for i in range(1, n):
        j = rng.randrange(i)
        a, b = (vs[i], vs[j]) if rng.random() < 0.5 else (vs[j], vs[i])
        edges.append((f"e{i}", a, b))
    order = list(vs)
    rng.shuffle(order)
    return Graph.from_edges(order, edges)


def random_path_to(rng: random.Random, g: Graph, v: str, maxlen: int) -> Path:
    """Random path ending at ``v`` of length at most ``maxlen``."""
    edges: list[str] = []
    cur = v
    for _ in range(rng.randint(0, maxlen)):
        ins = g.in_edges(cur)
        if not ins:
            break
        e = rng.choice(ins)
        edges.append(e)
        cur = g.src[e]
    edges.reverse()
    return Path(tuple(edges), cur, v)


def random_monomial(rng: random.Random, g: Graph, maxlen: int = 4) -> Monomial:
    w = rng.choice(g.vertices)
    return Monomial(random_path_to(rng, g, w, maxlen), random_path_to(rng, g, w, maxlen))


def random_zero(rng: random.Random, g: Graph, maxlen: int = 4) -> Element | None:
    """``c * alpha (v - sum ee*) beta*`` for a random emitter ``v``."""
    emitters = [v for v in g.vertices if g.out_edges(v)]
    if not emitters:
        return None
    v = rng.choice(emitters)
    a = random_path_to(rng, g, v, maxlen - 1)
    b = random_path_to(rng, g, v, maxlen - 1)
    ck = vertex(v) - Element((Monomial(g.path(e), g.path(e)), 1) for e in g.out_edges(v))
    left = Element.of(Monomial.of_path(a))
    right = star(Element.of(Monomial.of_path(b)))
    return multiply(multiply(left, ck), right) * rng.choice(COEFFS)


def random_element(rng: random.Random, g: Graph, max_terms: int = 6, maxlen: int = 4) -> Element:
    """Mix of plain random sums, hidden zeros and perturbed hidden zeros,
    always with at most ``max_terms`` terms and paths of length ``<= maxlen``."""
    for _ in range(100):
        kind = rng.random()
        if kind < 0.35:
            x = Element((random_monomial(rng, g, maxlen), rng.choice(COEFFS))
                        for _ in range(rng.randint(1, max_terms)))
        else:
            x = random_zero(rng, g, maxlen) or Element.zero()
            if rng.random() < 0.4:
                y = random_zero(rng, g, maxlen)
                if y is not None:
                    x = x + y
            if kind > 0.75:
                x = x + Element([(random_monomial(rng, g, maxlen), rng.choice(COEFFS))])
        if len(x) <= max_terms and all(len(m.real) <= maxlen and len(m.ghost) <= maxlen for m in x.terms):
            return x
    return Element([(random_monomial(rng, g, maxlen), 1)])


def random_laurent(rng: random.Random, g: Graph, loop: str, degree: int = 10) -> tuple[dict[int, Fraction], Element]:
    """Random Laurent polynomial in the loop, a quarter of them zero."""
    coeffs: dict[int, Fraction] = {}
    if rng.random() >= 0.25:
        for _ in range(rng.randint(1, 6)):
            coeffs[rng.randint(-degree, degree)] = rng.choice(COEFFS)
    return coeffs, laurent(g, loop, coeffs)


def random_point(rng: random.Random, lo: QNum, hi: QNum) -> QNum:
    """Rational point of ``[lo, hi)``, not always the left end."""
    a = QNum(rational_between(lo, hi))
    b = QNum(rational_between(a + (hi - a) * Fraction(1, 2), hi))
    return a + (b - a) * Fraction(rng.randint(0, 7), 8)


def random_tree_rep(rng: random.Random, max_vertices: int = 6, max_dim: int = 8) -> tuple[Graph, MatrixRep]:
    """Random tree with a valid representation of dimension ``<= max_dim``.

    Path-space representation with random sink multiplicities and possibly
    a killed summand, written in random coordinates.
    """
    while True:
        g = random_tree(rng, max_vertices)
        base = path_space_rep(g)
        if base.dim <= max_dim:
            break
    budget = max_dim - base.dim
    dims: dict[str, int] = {}
    for w in g.vertices:
        if g.out_edges(w):
            continue
        paths = path_space_rep(g, {w: 2}).dim - base.dim
        if paths <= budget and rng.random() < 0.5:
            dims[w] = 2
            budget -= paths
    extra = rng.randint(0, min(1, budget))
    rep = path_space_rep(g, dims, extra)
    return g, conjugate(rep, random_invertible(rng, rep.dim))
