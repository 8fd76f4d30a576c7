"""The representation induced by a branching system, acting on finitely
supported functions, and the exact semantic zero test."""

from __future__ import annotations

from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .algebra import Element, Monomial
from .branching import BranchingSystem, PiecewiseMap, compose_path_map
from .graph import Graph, sinks
from .qfield import QNum, Rational, rational_between


class FinSupp:
    """A function ``X -> Q`` with finite support, stored as point -> value."""

    __slots__ = ("values",)

    def __init__(self, values: Mapping[QNum, Rational] | Iterable[tuple[QNum, Rational]] = ()):
        items = values.items() if isinstance(values, Mapping) else values
        acc: dict[QNum, Fraction] = defaultdict(Fraction)
        for z, c in items:
            acc[QNum.coerce(z)] += c
        self.values = {z: c for z, c in acc.items() if c != 0}

    @classmethod
    def delta(cls, z: QNum | Rational, c: Rational = 1) -> FinSupp:
        return cls({QNum.coerce(z): c})

    @property
    def is_zero(self) -> bool:
        return not self.values

    def __getitem__(self, z: QNum | Rational) -> Fraction:
        return self.values.get(QNum.coerce(z), Fraction(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinSupp):
            return NotImplemented
        return self.values == other.values

    def __add__(self, other: FinSupp) -> FinSupp:
        return FinSupp(list(self.values.items()) + list(other.values.items()))

    def __sub__(self, other: FinSupp) -> FinSupp:
        return self + other * -1

    def __mul__(self, c: Rational) -> FinSupp:
        return FinSupp({z: v * c for z, v in self.values.items()})

    __rmul__ = __mul__

    def support(self) -> list[QNum]:
        return sorted(self.values)

    def __str__(self) -> str:
        if not self.values:
            return "0"
        return " + ".join(f"{self.values[z]}*d[{z}]" for z in self.support())

    def __repr__(self) -> str:
        return f"FinSupp({self})"


def parse_generator(g: Graph, name: str) -> tuple[str, str]:
    """``('v', v)``, ``('e', e)`` or ``('e*', e)`` for a generator name."""
    if g.is_vertex(name):
        return ("v", name)
    if g.is_edge(name):
        return ("e", name)
    if name.endswith("*") and g.is_edge(name[:-1]):
        return ("e*", name[:-1])
    raise ValueError(f"generator {name!r} not in graph")


def move(sys: BranchingSystem, gen: tuple[str, str], z: QNum) -> QNum | None:
    """Where a generator sends ``delta_z``: a point, or None for zero."""
    kind, name = gen
    g = sys.graph
    if kind == "v":
        return z if z in sys.D[name] else None
    if kind == "e":
        return sys.f[name](z) if z in sys.D[g.rng[name]] else None
    if z in sys.R[name]:
        return sys.f_inv[name](z)
    return None


def apply_generator(sys: BranchingSystem, gen: str | tuple[str, str], phi: FinSupp) -> FinSupp:
    """``S_e``, ``S_e*`` or ``P_v`` applied to ``phi``."""
    if isinstance(gen, str):
        gen = parse_generator(sys.graph, gen)
    elif gen[1] not in (sys.graph.src if gen[0] != "v" else sys.graph.vertices):
        raise ValueError(f"generator {gen} not in graph")
    out = []
    for z, c in phi.values.items():
        w = move(sys, gen, z)
        if w is not None:
            out.append((w, c))
    return FinSupp(out)


def monomial_word(m: Monomial) -> list[tuple[str, str]]:
    """Generators of ``alpha beta*`` in the order they act (rightmost first)."""
    if m.real.is_vertex and m.ghost.is_vertex:
        return [("v", m.real.src)]
    word = [("e*", e) for e in m.ghost.edges]
    word += [("e", e) for e in reversed(m.real.edges)]
    return word


def apply_monomial(sys: BranchingSystem, m: Monomial, z: QNum) -> QNum | None:
    for gen in monomial_word(m):
        z = move(sys, gen, z)
        if z is None:
            return None
    return z


def apply_element(sys: BranchingSystem, x: Element, phi: FinSupp) -> FinSupp:
    """``pi(x) phi``, generator by generator."""
    out = []
    for m, c in x.terms.items():
        for z, v in phi.values.items():
            w = apply_monomial(sys, m, z)
            if w is not None:
                out.append((w, c * v))
    return FinSupp(out)


@dataclass(frozen=True)
class BranchAction:
    """One term ``c * alpha beta*`` acting as ``delta_z -> c delta_{map(z)}``
    for ``z`` in ``map.domain`` (the image of ``f_beta``)."""

    monomial: Monomial
    coefficient: Fraction
    map: PiecewiseMap


def monomial_map(sys: BranchingSystem, m: Monomial) -> PiecewiseMap:
    """``f_alpha o f_beta^{-1}`` with its exact domain."""
    a, b = m.real, m.ghost
    if a.is_vertex and b.is_vertex:
        return PiecewiseMap.identity(sys.D[a.src])
    if b.is_vertex:
        return compose_path_map(sys, a).merged()
    back = compose_path_map(sys, b).inverse()
    if a.is_vertex:
        return back.merged()
    return compose_path_map(sys, a).compose(back).merged()


def monomial_actions(sys: BranchingSystem, x: Element) -> list[BranchAction]:
    return [BranchAction(m, c, monomial_map(sys, m)) for m, c in x.sorted_terms()]


class PreconditionError(ValueError):
    pass


def rotation_certificate(sys: BranchingSystem) -> bool:
    """Every branch of every ``f_e`` has a positive sqrt 2 part in its offset.

    Composites then add positive sqrt 2 parts, so a rational point is never
    fixed by any ``f_alpha``: the fixed-point hypothesis holds for all closed
    paths at once.
    """
    return all(b.offset.b > 0 for m in sys.f.values() for b in m.branches)


@dataclass(frozen=True)
class SemanticResult:
    zero: bool
    cells: int
    groups: int
    witness: QNum | None = None
    image: QNum | None = None
    coefficient: Fraction | None = None

    def __str__(self) -> str:
        if self.zero:
            return f"zero ({self.cells} cells, {self.groups} groups)"
        return f"nonzero: z={self.witness} ↦ w={self.image}, coeff={self.coefficient}"


def check_semantic_precondition(sys: BranchingSystem) -> None:
    g = sys.graph
    if sinks(g):
        raise PreconditionError(f"sink {sinks(g)[0]} present; faithfulness is only certified without sinks")
    if sys.kind != "rotation":
        raise PreconditionError(f"{sys.kind} system is not certified faithful (pass unchecked=True to override)")
    if not rotation_certificate(sys):
        raise PreconditionError("rotation certificate failed: some branch offset is rational")
    for v, res in sys.faithfulness.items():
        if not res.certified:
            raise PreconditionError(f"fixed-point hypothesis failed at {v}: {res}")


def zero_test_semantic(sys: BranchingSystem, x: Element, unchecked: bool = False) -> SemanticResult:
    """Decide ``pi(x) = 0`` exactly by grouping affine branches per cell.

    Within a cell, branches with the same ``(scale, offset)`` send every
    point to the same place; distinct ones agree at most at one point.  So
    ``pi(x) = 0`` iff every group's coefficients sum to zero.  With a
    faithful system this decides ``x = 0``.
    """
    if not unchecked:
        check_semantic_precondition(sys)
    actions = monomial_actions(sys, x)
    pts = sorted({p for a in actions for b in a.map.branches for p in (b.lo, b.hi)})
    cells: dict[int, dict[tuple[Fraction, QNum], Fraction]] = defaultdict(lambda: defaultdict(Fraction))
    for a in actions:
        for b in a.map.branches:
            for i in range(bisect_left(pts, b.lo), bisect_left(pts, b.hi)):
                cells[i][b.key()] += a.coefficient
    n_groups = sum(len(groups) for groups in cells.values())
    for i in sorted(cells):
        groups = cells[i]
        bad = sorted(((k, c) for k, c in groups.items() if c != 0), key=lambda kc: (kc[0][0], kc[0][1].a, kc[0][1].b))
        if not bad:
            continue
        (scale, offset), coeff = bad[0]
        z = _generic_point(pts[i], pts[i + 1], (scale, offset), groups)
        return SemanticResult(False, len(cells), n_groups, z, z * scale + offset, coeff)
    return SemanticResult(True, len(cells), n_groups)


def _generic_point(lo: QNum, hi: QNum, key: tuple[Fraction, QNum], groups: Mapping) -> QNum:
    """Rational point of ``[lo, hi)`` where the map ``key`` meets no other group.

    The left endpoint is preferred when rational; otherwise points approach
    the cell's first rational from above by halving.
    """
    s1, o1 = key
    clashes = set()
    for s2, o2 in groups:
        if s2 != s1:
            clashes.add((o2 - o1) / (s1 - s2))
    if lo.is_rational and lo not in clashes:
        return lo
    a = rational_between(lo, hi)
    mid = QNum(a) + (hi - a) * Fraction(1, 2)
    c = rational_between(mid, hi)
    k = 1
    while True:
        z = QNum(a + (c - a) / 2 ** k)
        if z not in clashes:
            return z
        k += 1


def relation_failures_at(sys: BranchingSystem, z: QNum) -> list[str]:
    """Check every defining relation as an operator identity on ``delta_z``."""
    g = sys.graph
    cache: dict[tuple[tuple[str, str], QNum | None], QNum | None] = {}

    def run(*word: tuple[str, str]) -> FinSupp:
        p: QNum | None = z
        for gen in reversed(word):
            if p is None:
                break
            key = (gen, p)
            if key not in cache:
                cache[key] = move(sys, gen, p)
            p = cache[key]
        return FinSupp() if p is None else FinSupp.delta(p)

    zero = FinSupp()
    fails = []
    for u in g.vertices:
        for v in g.vertices:
            want = run(("v", u)) if u == v else zero
            if run(("v", u), ("v", v)) != want:
                fails.append(f"P_{u} P_{v}")
    for e in g.edges:
        s, r = ("v", g.src[e]), ("v", g.rng[e])
        S, Ss = ("e", e), ("e*", e)
        if run(s, S) != run(S) or run(S, r) != run(S):
            fails.append(f"(1) {e}")
        if run(r, Ss) != run(Ss) or run(Ss, s) != run(Ss):
            fails.append(f"(2) {e}")
        for f in g.edges:
            want = run(r) if e == f else zero
            if run(Ss, ("e", f)) != want:
                fails.append(f"(3) {e}* {f}")
    for v in g.vertices:
        es = g.out_edges(v)
        if es:
            total = zero
            for e in es:
                total = total + run(("e", e), ("e*", e))
            if total != run(("v", v)):
                fails.append(f"(4) {v}")
    return fails


def cell_points(sys: BranchingSystem) -> list[QNum]:
    """One point per cell of the system's common refinement (rational when
    the cell contains one, which is always the case for non-empty cells)."""
    return [QNum(rational_between(lo, hi)) for lo, hi in sys.cells()]
