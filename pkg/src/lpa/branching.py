"""E-algebraic branching systems realised on finite unions of half-open
intervals with endpoints in Q(sqrt 2).

Two constructions are provided: :func:`build_interval_system` works for
every finite graph (sinks included) and :func:`build_rotation_system` gives
the irrational-rotation system for graphs without sinks, whose induced
representation is faithful.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .graph import Graph, Path, sinks
from .qfield import ONE, THETA, ZERO, QNum, Rational, rational_between

Interval = tuple[QNum, QNum]


def _q(x: QNum | Rational) -> QNum:
    return x if isinstance(x, QNum) else QNum(x)


def fmt_interval(iv: Interval) -> str:
    return f"[{iv[0]}, {iv[1]})"


@dataclass(frozen=True)
class Region:
    """A finite union of half-open intervals, kept merged and sorted."""

    intervals: tuple[Interval, ...] = ()

    def __post_init__(self) -> None:
        merged: list[list[QNum]] = []
        for lo, hi in sorted(((_q(lo), _q(hi)) for lo, hi in self.intervals), key=lambda iv: iv[0]):
            if not lo < hi:
                raise ValueError(f"empty or reversed interval [{lo}, {hi})")
            if merged and not merged[-1][1] < lo:
                if merged[-1][1] < hi:
                    merged[-1][1] = hi
            else:
                merged.append([lo, hi])
        object.__setattr__(self, "intervals", tuple((lo, hi) for lo, hi in merged))

    @classmethod
    def of(cls, *pairs: tuple[QNum | Rational, QNum | Rational]) -> Region:
        return cls(tuple(pairs))

    @cached_property
    def _los(self) -> list[QNum]:
        return [lo for lo, _ in self.intervals]

    def __contains__(self, z: QNum | Rational) -> bool:
        z = _q(z)
        i = bisect_right(self._los, z) - 1
        return i >= 0 and z < self.intervals[i][1]

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __or__(self, other: Region) -> Region:
        return Region(self.intervals + other.intervals)

    def __and__(self, other: Region) -> Region:
        out = []
        for a, b in self.intervals:
            for c, d in other.intervals:
                lo, hi = max(a, c), min(b, d)
                if lo < hi:
                    out.append((lo, hi))
        return Region(tuple(out))

    def __sub__(self, other: Region) -> Region:
        pieces = list(self.intervals)
        for c, d in other.intervals:
            nxt = []
            for a, b in pieces:
                if not (c < b and a < d):
                    nxt.append((a, b))
                    continue
                if a < c:
                    nxt.append((a, c))
                if d < b:
                    nxt.append((d, b))
            pieces = nxt
        return Region(tuple(pieces))

    def endpoints(self) -> list[QNum]:
        return [p for iv in self.intervals for p in iv]

    def some_point(self) -> QNum | None:
        return self.intervals[0][0] if self.intervals else None

    def __str__(self) -> str:
        return " u ".join(fmt_interval(iv) for iv in self.intervals) or "{}"


def union(regions: Iterable[Region]) -> Region:
    return Region(tuple(iv for r in regions for iv in r.intervals))


@dataclass(frozen=True)
class AffineBranch:
    """``z -> scale*z + offset`` on ``[lo, hi)``, with ``scale > 0``."""

    lo: QNum
    hi: QNum
    scale: Fraction
    offset: QNum

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", _q(self.lo))
        object.__setattr__(self, "hi", _q(self.hi))
        object.__setattr__(self, "scale", Fraction(self.scale))
        object.__setattr__(self, "offset", _q(self.offset))
        if not self.lo < self.hi:
            raise ValueError("empty branch domain")
        if self.scale <= 0:
            raise ValueError("branch scale must be positive")

    def __call__(self, z: QNum) -> QNum:
        return z * self.scale + self.offset

    @property
    def domain(self) -> Interval:
        return (self.lo, self.hi)

    @property
    def image(self) -> Interval:
        return (self(self.lo), self(self.hi))

    def inverse(self) -> AffineBranch:
        lo, hi = self.image
        return AffineBranch(lo, hi, 1 / self.scale, -self.offset / self.scale)

    def key(self) -> tuple[Fraction, QNum]:
        return (self.scale, self.offset)

    def __str__(self) -> str:
        return f"{fmt_interval(self.domain)} → {self.scale}·z + ({self.offset})"


@dataclass(frozen=True)
class PiecewiseMap:
    """Injective piecewise-affine map; branches have disjoint domains."""

    branches: tuple[AffineBranch, ...] = ()

    def __post_init__(self) -> None:
        bs = tuple(sorted(self.branches, key=lambda b: b.lo))
        for a, b in zip(bs, bs[1:]):
            if b.lo < a.hi:
                raise ValueError(f"overlapping branch domains {fmt_interval(a.domain)} and {fmt_interval(b.domain)}")
        object.__setattr__(self, "branches", bs)

    @classmethod
    def identity(cls, region: Region) -> PiecewiseMap:
        return cls(tuple(AffineBranch(lo, hi, Fraction(1), ZERO) for lo, hi in region.intervals))

    @cached_property
    def _los(self) -> list[QNum]:
        return [b.lo for b in self.branches]

    def branch_at(self, z: QNum) -> AffineBranch | None:
        i = bisect_right(self._los, z) - 1
        if i >= 0 and z < self.branches[i].hi:
            return self.branches[i]
        return None

    def __call__(self, z: QNum | Rational) -> QNum:
        z = _q(z)
        b = self.branch_at(z)
        if b is None:
            raise ValueError(f"{z} is outside the domain")
        return b(z)

    @cached_property
    def domain(self) -> Region:
        return Region(tuple(b.domain for b in self.branches))

    @cached_property
    def image(self) -> Region:
        return Region(tuple(b.image for b in self.branches))

    def images_disjoint(self) -> bool:
        ims = sorted((b.image for b in self.branches), key=lambda iv: iv[0])
        return all(not b[0] < a[1] for a, b in zip(ims, ims[1:]))

    def inverse(self) -> PiecewiseMap:
        return PiecewiseMap(tuple(b.inverse() for b in self.branches))

    def merged(self) -> PiecewiseMap:
        """Same map with abutting branches of equal ``(scale, offset)`` fused."""
        out: list[AffineBranch] = []
        for b in self.branches:
            if out and out[-1].hi == b.lo and out[-1].key() == b.key():
                out[-1] = AffineBranch(out[-1].lo, b.hi, b.scale, b.offset)
            else:
                out.append(b)
        return PiecewiseMap(tuple(out))

    def compose(self, inner: PiecewiseMap) -> PiecewiseMap:
        """``self o inner`` on the points of ``inner``'s domain that land in
        ``self``'s domain."""
        out = []
        for b in inner.branches:
            blo, bhi = b.image
            for a in self.branches:
                lo, hi = max(blo, a.lo), min(bhi, a.hi)
                if not lo < hi:
                    continue
                # pull [lo, hi) back through b
                plo = (lo - b.offset) / b.scale
                phi = (hi - b.offset) / b.scale
                out.append(AffineBranch(plo, phi, a.scale * b.scale, a(b.offset)))
        return PiecewiseMap(tuple(out))

    def __str__(self) -> str:
        return "; ".join(str(b) for b in self.branches)


@dataclass(frozen=True)
class Violation:
    item: int
    message: str
    witness: QNum | None = None

    def __str__(self) -> str:
        w = "" if self.witness is None else f" (witness {self.witness})"
        return f"item {self.item}: {self.message}{w}"


@dataclass(frozen=True, eq=False)
class BranchingSystem:
    """Regions ``R_e``, ``D_v`` and bijections ``f_e: D_{r(e)} -> R_e``.

    ``kind`` records the construction ('interval', 'rotation', 'discrete',
    or 'custom').  ``extra`` holds points of the ambient set outside every
    ``D_v``; all generators act as zero there.
    """

    graph: Graph
    R: dict[str, Region]
    D: dict[str, Region]
    f: dict[str, PiecewiseMap]
    kind: str = "custom"
    extra: Region = field(default_factory=Region)

    @cached_property
    def X(self) -> Region:
        return union(list(self.R.values()) + list(self.D.values()) + [self.extra])

    @cached_property
    def f_inv(self) -> dict[str, PiecewiseMap]:
        return {e: m.inverse() for e, m in self.f.items()}

    @cached_property
    def breakpoints(self) -> list[QNum]:
        """Every region endpoint and branch endpoint, sorted."""
        pts: set[QNum] = set(self.X.endpoints())
        for r in list(self.R.values()) + list(self.D.values()):
            pts.update(r.endpoints())
        for m in self.f.values():
            for b in m.branches:
                pts.update((b.lo, b.hi))
                pts.update(b.image)
        return sorted(pts)

    def cells(self) -> list[Interval]:
        """Common refinement of all regions and branch pieces, restricted to X."""
        pts = self.breakpoints
        return [(a, b) for a, b in zip(pts, pts[1:]) if a in self.X]

    @cached_property
    def faithfulness(self) -> dict[str, HypothesisResult]:
        """Hypothesis check at every vertex carrying closed paths (cached)."""
        out = {}
        for v in self.graph.vertices:
            if _has_closed_path(self.graph, v):
                out[v] = check_faithfulness_hypothesis(self, v, maxlen=3)
        return out


def _has_closed_path(g: Graph, v: str) -> bool:
    seen, stack = set(), [g.rng[e] for e in g.out_edges(v)]
    while stack:
        u = stack.pop()
        if u == v:
            return True
        if u not in seen:
            seen.add(u)
            stack.extend(g.rng[e] for e in g.out_edges(u))
    return False


def _witness(a: Region, b: Region) -> QNum | None:
    """A point in the symmetric difference of two regions."""
    return (a - b).some_point() or (b - a).some_point()


def validate_system(sys: BranchingSystem) -> list[Violation]:
    """Check the five branching-system axioms; empty list means valid."""
    g = sys.graph
    out: list[Violation] = []
    for name, table, keys in (("R", sys.R, g.edges), ("D", sys.D, g.vertices)):
        missing = [k for k in keys if k not in table]
        for k in missing:
            out.append(Violation(1 if name == "R" else 2, f"{name}_{k} missing"))
    if out:
        return out
    for i, e in enumerate(g.edges):
        for d in g.edges[i + 1:]:
            common = sys.R[e] & sys.R[d]
            if common:
                out.append(Violation(1, f"R_{e} and R_{d} overlap", common.some_point()))
    for i, u in enumerate(g.vertices):
        for v in g.vertices[i + 1:]:
            common = sys.D[u] & sys.D[v]
            if common:
                out.append(Violation(2, f"D_{u} and D_{v} overlap", common.some_point()))
    for e in g.edges:
        outside = sys.R[e] - sys.D[g.src[e]]
        if outside:
            out.append(Violation(3, f"R_{e} not inside D_{g.src[e]}", outside.some_point()))
    for v in g.vertices:
        es = g.out_edges(v)
        if es:
            cover = union(sys.R[e] for e in es)
            w = _witness(sys.D[v], cover)
            if w is not None:
                out.append(Violation(4, f"D_{v} differs from the union of R_e over s(e)={v}", w))
    for e in g.edges:
        m = sys.f.get(e)
        if m is None:
            out.append(Violation(5, f"f_{e} missing"))
            continue
        w = _witness(m.domain, sys.D[g.rng[e]])
        if w is not None:
            out.append(Violation(5, f"domain of f_{e} differs from D_{g.rng[e]}", w))
        if not m.images_disjoint():
            ims = sorted((b.image for b in m.branches), key=lambda iv: iv[0])
            clash = next(b[0] for a, b in zip(ims, ims[1:]) if b[0] < a[1])
            out.append(Violation(5, f"f_{e} is not injective", clash))
        w = _witness(m.image, sys.R[e])
        if w is not None:
            out.append(Violation(5, f"image of f_{e} differs from R_{e}", w))
    return out


def _linear(src: Interval, dst: Interval) -> AffineBranch:
    """The increasing affine bijection ``[a, b) -> [c, d)``."""
    (a, b), (c, d) = src, dst
    scale = (d - c) / (b - a)
    if not scale.is_rational:
        raise ValueError("linear bijection needs rational length ratio")
    return AffineBranch(a, b, scale.a, c - a * scale.a)


def build_interval_system(g: Graph) -> BranchingSystem:
    """Unit intervals per edge, negative unit intervals per sink, and
    piecewise-linear ``f_e`` (equal subdivision of ``R_e``)."""
    R = {e: Region.of((i, i + 1)) for i, e in enumerate(g.edges)}
    D: dict[str, Region] = {}
    for i, v in enumerate(sinks(g), 1):
        D[v] = Region.of((-i, -i + 1))
    for v in g.vertices:
        if v not in D:
            D[v] = union(R[e] for e in g.out_edges(v))
    f = {}
    for j, e in enumerate(g.edges):
        target = g.rng[e]
        outs = g.out_edges(target)
        if not outs:
            f[e] = PiecewiseMap((_linear(D[target].intervals[0], (QNum(j), QNum(j + 1))),))
            continue
        P = len(outs)
        pieces = []
        for k, d in enumerate(outs):
            lo = QNum(j) + Fraction(k, P)
            pieces.append(_linear(R[d].intervals[0], (lo, lo + Fraction(1, P))))
        f[e] = PiecewiseMap(tuple(pieces))
    return BranchingSystem(g, R, D, f, kind="interval")


class SinkError(ValueError):
    pass


def rotation(theta: QNum = THETA) -> PiecewiseMap:
    """``h(t) = (t + theta) mod 1`` on ``[0, 1)``, split at ``1 - theta``."""
    cut = ONE - theta
    return PiecewiseMap((
        AffineBranch(ZERO, cut, Fraction(1), theta),
        AffineBranch(cut, ONE, Fraction(1), theta - 1),
    ))


def stretch(a: QNum | Rational, b: QNum | Rational) -> PiecewiseMap:
    """``g(t) = b t + (1 - t) a`` from ``[0, 1)`` onto ``[a, b)``."""
    a, b = _q(a), _q(b)
    return PiecewiseMap((AffineBranch(ZERO, ONE, (b - a).a, a),))


def build_rotation_system(g: Graph, theta: QNum = THETA) -> BranchingSystem:
    """The rotation system: ``f_e`` restricted to ``R_{e_{i_k}}`` is
    ``stretch(j-1+(k-1)/P, j-1+k/P) o rotation o stretch(i_k-1, i_k)^-1``."""
    missing = sinks(g)
    if missing:
        raise SinkError(f"sink {missing[0]}: the rotation construction needs a graph without sinks")
    index = {e: i for i, e in enumerate(g.edges, 1)}
    R = {e: Region.of((i - 1, i)) for e, i in index.items()}
    D = {v: union(R[e] for e in g.out_edges(v)) for v in g.vertices}
    h = rotation(theta)
    f = {}
    for e, j in index.items():
        outs = g.out_edges(g.rng[e])
        P = len(outs)
        pieces: list[AffineBranch] = []
        for k, d in enumerate(outs, 1):
            ik = index[d]
            lo = Fraction(j - 1) + Fraction(k - 1, P)
            piece = stretch(lo, lo + Fraction(1, P)).compose(h.compose(stretch(ik - 1, ik).inverse()))
            pieces.extend(piece.branches)
        f[e] = PiecewiseMap(tuple(pieces))
    return BranchingSystem(g, R, D, f, kind="rotation")


def compose_path_map(sys: BranchingSystem, alpha: Path) -> PiecewiseMap:
    """``f_alpha = f_{e_1} o ... o f_{e_n}`` with domain ``D_{r(alpha)}``."""
    if not alpha.edges:
        raise ValueError("compose_path_map needs a path of positive length")
    g = sys.graph
    for a, b in zip(alpha.edges, alpha.edges[1:]):
        if g.rng[a] != g.src[b]:
            raise ValueError(f"not a path: {alpha}")
    out = sys.f[alpha.edges[-1]]
    for e in reversed(alpha.edges[:-1]):
        out = sys.f[e].compose(out)
    return out


@dataclass(frozen=True)
class HypothesisResult:
    """Outcome of the fixed-point search at one vertex.

    ``paths`` are all closed paths of length ``<= maxlen`` at ``vertex``;
    on success ``images[i]`` is ``f_{paths[i]}(witness)``.  On failure
    ``fixed`` lists the closed paths fixing the best candidate tried.
    """

    ok: bool
    vertex: str
    maxlen: int
    witness: QNum | None
    paths: tuple[Path, ...]
    images: tuple[QNum, ...] = ()
    fixed: tuple[Path, ...] = ()
    attempts: int = 0

    @property
    def certified(self) -> bool:
        """Rational witness whose every image has a nonzero sqrt 2 part,
        i.e. no closed path of any length can fix it."""
        return (self.ok and self.witness is not None and self.witness.is_rational
                and all(w.b != 0 for w in self.images))

    def __str__(self) -> str:
        if self.ok:
            return f"ok z0={self.witness}"
        return "fail {" + ", ".join(str(p) for p in self.fixed) + "}"


def closed_path_images(sys: BranchingSystem, v: str, maxlen: int, z0: QNum) -> list[tuple[Path, QNum]]:
    """``(alpha, f_alpha(z0))`` for closed paths at ``v`` up to ``maxlen``.

    Paths are grown backwards so that each prefix evaluation is shared.
    """
    g = sys.graph
    found: list[tuple[Path, QNum]] = []
    stack: list[tuple[str, QNum, tuple[str, ...]]] = [(v, z0, ())]
    while stack:
        u, w, suffix = stack.pop()
        for e in g.in_edges(u):
            w2 = sys.f[e](w)
            s2 = (e,) + suffix
            if g.src[e] == v:
                found.append((Path(s2, v, v), w2))
            if len(s2) < maxlen:
                stack.append((g.src[e], w2, s2))
    found.sort(key=lambda pw: pw[0].sort_key())
    return found


def _candidates(sys: BranchingSystem, v: str) -> list[QNum]:
    dv = sys.D[v]
    raw: list[QNum] = [ZERO]
    raw += [QNum(p.a) for p in sys.breakpoints]
    raw += [QNum(((lo + hi) * Fraction(1, 2)).a) for lo, hi in sys.cells()]
    raw += [QNum(rational_between(lo, hi)) for lo, hi in dv.intervals]
    seen: set[QNum] = set()
    out = []
    for z in raw:
        if z in dv and z not in seen:
            seen.add(z)
            out.append(z)
    return out


def check_faithfulness_hypothesis(
    sys: BranchingSystem, v: str, maxlen: int, attempts: int = 64
) -> HypothesisResult:
    """Search for one rational ``z0`` in ``D_v`` moved by every closed path
    at ``v`` of length at most ``maxlen``."""
    if not sys.graph.is_vertex(v):
        raise ValueError(f"unknown vertex {v!r}")
    best: tuple[Path, ...] | None = None
    tried = 0
    paths: tuple[Path, ...] = ()
    for z0 in _candidates(sys, v)[:attempts]:
        tried += 1
        pairs = closed_path_images(sys, v, maxlen, z0)
        paths = tuple(p for p, _ in pairs)
        fixed = tuple(p for p, w in pairs if w == z0)
        if not fixed:
            return HypothesisResult(True, v, maxlen, z0, paths, tuple(w for _, w in pairs), (), tried)
        if best is None or len(fixed) < len(best):
            best = fixed
    return HypothesisResult(False, v, maxlen, None, paths, (), best or (), tried)


def dump_system(sys: BranchingSystem) -> str:
    """Stable text dump: vertex domains, then each edge's region and branches."""
    g = sys.graph
    lines = [f"system {sys.kind}"]
    for v in g.vertices:
        lines.append(f"D {v} = {sys.D[v]}")
    for e in g.edges:
        lines.append(f"R {e} = {sys.R[e]}")
        for b in sys.f[e].branches:
            lines.append(f"  f_{e}: {b}")
    if sys.extra:
        lines.append(f"extra = {sys.extra}")
    return "\n".join(lines) + "\n"


def discrete_system(
    g: Graph,
    D: dict[str, Sequence[int]],
    R: dict[str, Sequence[int]],
    f: dict[str, dict[int, int]],
    extra: Sequence[int] = (),
) -> BranchingSystem:
    """Branching system on an index set.  Index ``x`` is realised as the atom
    ``[x, x+1)`` so that the point ``x`` stands for the basis element."""

    def region(xs: Iterable[int]) -> Region:
        return Region(tuple((QNum(x), QNum(x + 1)) for x in xs))

    maps = {
        e: PiecewiseMap(tuple(AffineBranch(QNum(x), QNum(x + 1), Fraction(1), QNum(y - x))
                              for x, y in f[e].items()))
        for e in g.edges
    }
    return BranchingSystem(
        g,
        {e: region(R[e]) for e in g.edges},
        {v: region(D[v]) for v in g.vertices},
        maps,
        kind="discrete",
        extra=region(extra),
    )
