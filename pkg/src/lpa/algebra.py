"""Elements of the Leavitt path algebra L_Q(E) as finite sums of monomials
``alpha beta*`` with rational coefficients.

Multiplication uses only the path relations; the Cuntz-Krieger relation
``v = sum_{s(e)=v} e e*`` is applied by :func:`normal_form`, which rewrites
any monomial whose real and ghost parts both end in the designated edge of a
vertex.  The surviving monomials form a linear basis, so the normal form is
canonical and gives a syntactic zero test.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .graph import Graph, Path, drop_last, extend, sinks


@dataclass(frozen=True)
class Monomial:
    """``real * ghost^*`` with ``r(real) = r(ghost)``; vertices are ``v v^*``."""

    real: Path
    ghost: Path

    def __post_init__(self) -> None:
        if self.real.rng != self.ghost.rng:
            raise ValueError(f"r({self.real}) != r({self.ghost})")

    @classmethod
    def vertex(cls, v: str) -> Monomial:
        p = Path((), v, v)
        return cls(p, p)

    @classmethod
    def of_path(cls, p: Path) -> Monomial:
        return cls(p, Path((), p.rng, p.rng))

    def star(self) -> Monomial:
        return Monomial(self.ghost, self.real)

    @property
    def degree(self) -> int:
        return len(self.real) + len(self.ghost)

    def sort_key(self) -> tuple:
        return (self.degree, self.real.sort_key(), self.ghost.sort_key())

    def __str__(self) -> str:
        if self.real.is_vertex and self.ghost.is_vertex:
            return self.real.src
        parts = list(self.real.edges) + [e + "*" for e in reversed(self.ghost.edges)]
        return ".".join(parts)


def monomial_product(m: Monomial, n: Monomial) -> Monomial | None:
    """``(alpha beta*)(gamma delta*)``, or None when it vanishes."""
    beta, gamma = m.ghost, n.real
    if len(beta) <= len(gamma):
        if gamma.startswith(beta):
            return Monomial(m.real + gamma.drop_prefix(beta), n.ghost)
    elif beta.startswith(gamma):
        return Monomial(m.real, n.ghost + beta.drop_prefix(gamma))
    return None


class Element:
    """Finite Q-linear combination of monomials (zero coefficients dropped).

    Equality is syntactic; use :func:`is_zero_syntactic` or compare normal
    forms for equality in the algebra.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction | int] | Iterable[tuple[Monomial, Fraction | int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, Fraction] = defaultdict(Fraction)
        for m, c in items:
            acc[m] += Fraction(c)
        self.terms = {m: c for m, c in acc.items() if c != 0}

    @classmethod
    def zero(cls) -> Element:
        return cls()

    @classmethod
    def of(cls, m: Monomial, c: Fraction | int = 1) -> Element:
        return cls({m: c})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def is_empty(self) -> bool:
        return not self.terms

    def __add__(self, other: Element) -> Element:
        return Element(list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self) -> Element:
        return Element({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Element) -> Element:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Element({m: c * other for m, c in self.terms.items()})
        if isinstance(other, Element):
            return multiply(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def star(self) -> Element:
        return star(self)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda mc: mc[0].sort_key())

    def __str__(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"Element({format_element(self)!r})"


def multiply(x: Element, y: Element) -> Element:
    """Bilinear product; the result is not normal-formed."""
    out: list[tuple[Monomial, Fraction]] = []
    for m, c in x.terms.items():
        for n, d in y.terms.items():
            p = monomial_product(m, n)
            if p is not None:
                out.append((p, c * d))
    return Element(out)


def star(x: Element) -> Element:
    return Element({m.star(): c for m, c in x.terms.items()})


def vertex(v: str) -> Element:
    return Element.of(Monomial.vertex(v))


def edge(g: Graph, e: str) -> Element:
    return Element.of(Monomial.of_path(g.path(e)))


def ghost(g: Graph, e: str) -> Element:
    return Element.of(Monomial.of_path(g.path(e)).star())


def path_element(p: Path) -> Element:
    return Element.of(Monomial.of_path(p))


def unit(g: Graph) -> Element:
    """``sum_v v``, the identity of L(E) for a finite graph."""
    return Element({Monomial.vertex(v): 1 for v in g.vertices})


def designated_edges(g: Graph) -> dict[str, str]:
    """The last-declared edge out of each emitting vertex."""
    out = {}
    for e in g.edges:
        out[g.src[e]] = e
    return out


def normal_form(g: Graph, x: Element) -> Element:
    """Rewrite ``(alpha d)(beta d)* -> alpha beta* - sum_{e != d}(alpha e)(beta e)*``
    for designated ``d`` until no monomial has both parts ending in ``d``."""
    d = designated_edges(g)
    acc: dict[Monomial, Fraction] = defaultdict(Fraction)
    stack = list(x.terms.items())
    while stack:
        m, c = stack.pop()
        a, b = m.real, m.ghost
        if a.edges and b.edges and a.edges[-1] == b.edges[-1] and d[g.src[a.edges[-1]]] == a.edges[-1]:
            last = a.edges[-1]
            a0, b0 = drop_last(g, a), drop_last(g, b)
            stack.append((Monomial(a0, b0), c))
            for e in g.out_edges(g.src[last]):
                if e != last:
                    stack.append((Monomial(extend(g, a0, e), extend(g, b0, e)), -c))
        else:
            acc[m] += c
    return Element(acc)


def is_zero_syntactic(g: Graph, x: Element) -> bool:
    return normal_form(g, x).is_empty


def is_normal(g: Graph, x: Element) -> bool:
    d = designated_edges(g)
    for m in x.terms:
        a, b = m.real.edges, m.ghost.edges
        if a and b and a[-1] == b[-1] and d[g.src[a[-1]]] == a[-1]:
            return False
    return True


def find_separating_path(g: Graph, x: Element, maxlen: int) -> Path | None:
    """A path ``p`` of length ``maxlen`` with ``x p != 0``; None iff ``x = 0``.

    Depth-first over right multiplication by edges.  Needs a graph without
    sinks, where such a path exists for every nonzero ``x``.
    """
    if maxlen < 1:
        raise ValueError("maxlen must be at least 1")
    if sinks(g):
        raise ValueError(f"graph has sink {sinks(g)[0]}")
    x = normal_form(g, x)
    if x.is_empty:
        return None
    edges = {e: edge(g, e) for e in g.edges}

    def search(y: Element, walked: tuple[str, ...]) -> tuple[str, ...] | None:
        if len(walked) == maxlen:
            return walked
        options = g.out_edges(g.rng[walked[-1]]) if walked else g.edges
        for e in options:
            z = normal_form(g, y * edges[e])
            if not z.is_empty:
                found = search(z, walked + (e,))
                if found is not None:
                    return found
        return None

    found = search(x, ())
    return None if found is None else g.path(*found)


def relations(g: Graph) -> list[tuple[str, Element]]:
    """Every defining relation as ``(label, lhs - rhs)``, unreduced."""
    out: list[tuple[str, Element]] = []
    V = {v: vertex(v) for v in g.vertices}
    E = {e: edge(g, e) for e in g.edges}
    S = {e: ghost(g, e) for e in g.edges}
    for u in g.vertices:
        for v in g.vertices:
            rhs = V[u] if u == v else Element.zero()
            out.append((f"{u}.{v}", V[u] * V[v] - rhs))
    for e in g.edges:
        s, r = V[g.src[e]], V[g.rng[e]]
        out.append((f"(1) s({e}){e}", s * E[e] - E[e]))
        out.append((f"(1) {e}r({e})", E[e] * r - E[e]))
        out.append((f"(2) r({e}){e}*", r * S[e] - S[e]))
        out.append((f"(2) {e}*s({e})", S[e] * s - S[e]))
        for f in g.edges:
            rhs = r if e == f else Element.zero()
            out.append((f"(3) {e}*{f}", S[e] * E[f] - rhs))
    for v in g.vertices:
        es = g.out_edges(v)
        if es:
            total = Element.zero()
            for e in es:
                total = total + E[e] * S[e]
            out.append((f"(4) {v}", V[v] - total))
    return out


_TOKEN_RE = re.compile(r"\s*(?:(?P<rat>\d+(?:/\d+)?)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[*.+-]))")


class ParseError(ValueError):
    pass


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


def _check_shape(g: Graph, factors: list[tuple[str, bool]]) -> None:
    """Strict composability check for monomials written as ``alpha.beta*``."""
    kinds = ["ghost" if gh else ("edge" if g.is_edge(n) else "vertex") for n, gh in factors]
    edge_kinds = [k for k in kinds if k != "vertex"]
    if "ghost" in edge_kinds and "edge" in edge_kinds[edge_kinds.index("ghost"):]:
        return  # ghost before real edge: multiplied out, may vanish
    # source/range of each factor read left to right
    ends = []
    for (n, gh), k in zip(factors, kinds):
        if k == "vertex":
            ends.append((n, n))
        elif k == "edge":
            ends.append((g.src[n], g.rng[n]))
        else:
            ends.append((g.rng[n], g.src[n]))
    for i in range(len(factors) - 1):
        if ends[i][1] != ends[i + 1][0]:
            a, b = factors[i], factors[i + 1]
            if kinds[i] == "edge" and kinds[i + 1] == "ghost":
                raise ParseError(f"r({a[0]}) != r({b[0]}): {a[0]}.{b[0]}* is not a monomial")
            raise ParseError(f"non-composable path at {a[0]}{'*' if a[1] else ''}.{b[0]}{'*' if b[1] else ''}")


def parse_element(g: Graph, text: str) -> Element:
    """Parse ``2 a.b* - 3 v``-style input.

    A bare rational ``c`` stands for ``c`` times the unit, so ``0`` is the
    empty sum.  ``*`` after an identifier marks a ghost edge; where a factor
    is expected, ``*`` is read as the vertex named ``*``.
    """
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty element")
    pos = 0

    def peek() -> tuple[str, str] | None:
        return toks[pos] if pos < len(toks) else None

    def factor() -> tuple[str, bool]:
        nonlocal pos
        t = peek()
        if t is None:
            raise ParseError("expected a generator")
        if t[0] == "id" or t == ("sym", "*"):
            name = t[1]
            pos += 1
            is_ghost = False
            if name != "*" and peek() == ("sym", "*"):
                pos += 1
                is_ghost = True
            if not (g.is_vertex(name) or g.is_edge(name)):
                raise ParseError(f"unknown id {name!r}")
            if is_ghost and g.is_vertex(name):
                raise ParseError(f"vertex {name!r} cannot carry '*'")
            return name, is_ghost
        raise ParseError(f"expected a generator, got {t[1]!r}")

    def term() -> Element:
        nonlocal pos
        coeff = Fraction(1)
        t = peek()
        if t is not None and t[0] == "rat":
            coeff = Fraction(t[1])
            pos += 1
            nxt = peek()
            if nxt is None or nxt[0] == "sym" and nxt[1] in "+-":
                return unit(g) * coeff
        factors = [factor()]
        while peek() == ("sym", "."):
            pos += 1
            factors.append(factor())
        _check_shape(g, factors)
        out: Element | None = None
        for name, is_ghost in factors:
            if g.is_vertex(name):
                gen = vertex(name)
            elif is_ghost:
                gen = ghost(g, name)
            else:
                gen = edge(g, name)
            out = gen if out is None else out * gen
        return out * coeff

    sign = 1
    if peek() is not None and peek()[0] == "sym" and peek()[1] in "+-":
        sign = -1 if peek()[1] == "-" else 1
        pos += 1
    total = term() * sign
    while pos < len(toks):
        t = peek()
        if t[0] != "sym" or t[1] not in "+-":
            raise ParseError(f"expected '+' or '-', got {t[1]!r}")
        pos += 1
        sign = -1 if t[1] == "-" else 1
        total = total + term() * sign
    return total


def format_element(x: Element) -> str:
    if x.is_empty:
        return "0"
    out = []
    for i, (m, c) in enumerate(x.sorted_terms()):
        mag = abs(c)
        body = str(m) if mag == 1 else f"{mag} {m}"
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("- " if c < 0 else "+ ") + body)
    return " ".join(out)


def laurent(g: Graph, loop: str, coeffs: Mapping[int, Fraction | int]) -> Element:
    """``sum_n c_n x^n`` on a one-loop graph, with ``x^{-n} = (x*)^n``."""
    v = g.src[loop]
    out = []
    for n, c in coeffs.items():
        p = Path((loop,) * abs(n), v, v)
        m = Monomial.of_path(p)
        out.append((m if n >= 0 else m.star(), c))
    return Element(out)

