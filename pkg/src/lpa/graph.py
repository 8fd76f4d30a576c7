"""Finite directed multigraphs, paths, and the structural predicates used
throughout the package (sinks, condition (L), P-simplicity, extreme-vertex
levels)."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import networkx as nx

ID_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\*")


class GraphError(ValueError):
    """Raised for malformed graphs or graph files.  ``errors`` lists every
    problem found, not just the first."""

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class Graph:
    """A finite directed multigraph ``E = (E^0, E^1, r, s)``.

    ``vertices`` and ``edges`` keep declaration order; several constructions
    (interval layout, designated edges) depend on it.
    """

    vertices: tuple[str, ...]
    edges: tuple[str, ...]
    src: dict[str, str] = field(hash=False)
    rng: dict[str, str] = field(hash=False)

    @classmethod
    def from_edges(
        cls,
        vertices: Iterable[str],
        edges: Iterable[tuple[str, str, str]],
        *,
        check: bool = True,
    ) -> Graph:
        """Build from ``(edge, source, range)`` triples."""
        edges = list(edges)
        g = cls(
            tuple(vertices),
            tuple(e for e, _, _ in edges),
            {e: s for e, s, _ in edges},
            {e: r for e, _, r in edges},
        )
        if check:
            errors = validate_graph(g)
            if errors:
                raise GraphError(errors)
        return g

    def __post_init__(self) -> None:
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        inc: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            if e in self.src and self.src[e] in out:
                out[self.src[e]].append(e)
            if e in self.rng and self.rng[e] in inc:
                inc[self.rng[e]].append(e)
        object.__setattr__(self, "_out", {v: tuple(es) for v, es in out.items()})
        object.__setattr__(self, "_in", {v: tuple(es) for v, es in inc.items()})
        object.__setattr__(self, "_vset", frozenset(self.vertices))

    def __hash__(self) -> int:
        return hash((self.vertices, self.edges, tuple(self.src.get(e) for e in self.edges),
                     tuple(self.rng.get(e) for e in self.edges)))

    def out_edges(self, v: str) -> tuple[str, ...]:
        """``s^{-1}(v)`` in declaration order."""
        return self._out.get(v, ())

    def in_edges(self, v: str) -> tuple[str, ...]:
        return self._in.get(v, ())

    def is_vertex(self, name: str) -> bool:
        return name in self._vset

    def is_edge(self, name: str) -> bool:
        return name in self.src

    def path(self, *edges: str, vertex: str | None = None) -> Path:
        """Validated path constructor; ``vertex`` anchors a length-0 path."""
        if not edges:
            if vertex is None or not self.is_vertex(vertex):
                raise GraphError([f"length-0 path needs a vertex, got {vertex!r}"])
            return Path((), vertex, vertex)
        for e in edges:
            if not self.is_edge(e):
                raise GraphError([f"unknown edge {e!r}"])
        for a, b in zip(edges, edges[1:]):
            if self.rng[a] != self.src[b]:
                raise GraphError([f"not a path: r({a})={self.rng[a]} but s({b})={self.src[b]}"])
        return Path(tuple(edges), self.src[edges[0]], self.rng[edges[-1]])

    def vertex_path(self, v: str) -> Path:
        return self.path(vertex=v)

    def __str__(self) -> str:
        return format_graph(self)


@dataclass(frozen=True, order=True)
class Path:
    """A path ``e_1 ... e_n``; for ``n = 0`` the path is the vertex ``src``.

    ``src`` and ``rng`` are stored so that path algebra never needs the graph.
    """

    edges: tuple[str, ...]
    src: str
    rng: str

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def is_vertex(self) -> bool:
        return not self.edges

    def __add__(self, other: Path) -> Path:
        if self.rng != other.src:
            raise ValueError(f"cannot concatenate {self} and {other}")
        return Path(self.edges + other.edges, self.src, other.rng)

    def startswith(self, prefix: Path) -> bool:
        return self.src == prefix.src and self.edges[: len(prefix.edges)] == prefix.edges

    def drop_prefix(self, prefix: Path) -> Path:
        """The path ``q`` with ``prefix + q == self``."""
        rest = self.edges[len(prefix.edges):]
        return Path(rest, prefix.rng, self.rng)

    def sort_key(self) -> tuple:
        return (len(self.edges), self.edges, self.src)

    def __str__(self) -> str:
        return ".".join(self.edges) if self.edges else self.src


def drop_last(g: Graph, p: Path) -> Path:
    """``p`` without its final edge (a vertex path when ``|p| = 1``)."""
    if not p.edges:
        raise ValueError("vertex has no last edge")
    last = p.edges[-1]
    return Path(p.edges[:-1], p.src, g.src[last])


def extend(g: Graph, p: Path, e: str) -> Path:
    """``p`` followed by edge ``e``; caller guarantees ``r(p) = s(e)``."""
    return Path(p.edges + (e,), p.src, g.rng[e])


@dataclass(frozen=True)
class UnorientedPath:
    """A path without orientation ``(u_0 ... u_n; e_1 ... e_n)``.

    ``forward[i]`` is True when ``e_{i+1}`` is traversed from source to range.
    """

    vertices: tuple[str, ...]
    edges: tuple[str, ...]
    forward: tuple[bool, ...]

    def __str__(self) -> str:
        parts = [self.vertices[0]]
        for e, fw, u in zip(self.edges, self.forward, self.vertices[1:]):
            parts.append(f"-{e}->" if fw else f"<-{e}-")
            parts.append(u)
        return "".join(parts)


def validate_graph(g: Graph) -> list[str]:
    """Every invariant violation of ``g``; empty list means the graph is ok."""
    errors: list[str] = []
    seen: set[str] = set()
    for v in g.vertices:
        if v in seen:
            errors.append(f"duplicate id {v!r}")
        seen.add(v)
    vset = set(g.vertices)
    seen_e: set[str] = set()
    for e in g.edges:
        if e in seen_e:
            errors.append(f"duplicate id {e!r}")
        seen_e.add(e)
        if e in vset:
            errors.append(f"vertex/edge id collision {e!r}")
        for end, table in (("src", g.src), ("rng", g.rng)):
            if e not in table:
                errors.append(f"edge {e!r} has no {end}")
            elif table[e] not in vset:
                errors.append(f"dangling endpoint: {end}({e}) = {table[e]!r} is not a vertex")
    for name in list(g.vertices) + list(g.edges):
        if not ID_RE.fullmatch(name):
            errors.append(f"invalid id {name!r}")
    return errors


def parse_graph(text: str) -> Graph:
    """Read the line format ``vertex <id>`` / ``edge <id> <src> <rng>``.

    Vertices must be declared before the edges that use them.
    """
    vertices: list[str] = []
    edges: list[tuple[str, str, str]] = []
    errors: list[str] = []
    declared: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "vertex" and len(tok) == 2:
            vertices.append(tok[1])
            declared.add(tok[1])
        elif tok[0] == "edge" and len(tok) == 4:
            _, e, s, r = tok
            for end in (s, r):
                if end not in declared:
                    errors.append(f"line {lineno}: dangling endpoint {end!r} (declare vertices first)")
            edges.append((e, s, r))
        else:
            errors.append(f"line {lineno}: cannot parse {raw.strip()!r}")
    if errors:
        raise GraphError(errors)
    return Graph.from_edges(vertices, edges)


def format_graph(g: Graph) -> str:
    lines = [f"vertex {v}" for v in g.vertices]
    lines += [f"edge {e} {g.src[e]} {g.rng[e]}" for e in g.edges]
    return "\n".join(lines) + "\n"


def paths_of_length(g: Graph, n: int) -> list[Path]:
    """``E^n`` in lexicographic declaration order (vertices when ``n == 0``)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return [Path((), v, v) for v in g.vertices]
    layer = [Path((e,), g.src[e], g.rng[e]) for e in g.edges]
    for _ in range(n - 1):
        layer = [extend(g, p, e) for p in layer for e in g.out_edges(p.rng)]
    return layer


def sinks(g: Graph) -> list[str]:
    emitters = set(g.src.values())
    return [v for v in g.vertices if v not in emitters]


def is_row_finite(g: Graph) -> bool:
    # every vertex of a finite graph emits finitely many edges
    return True


def closed_paths_from(g: Graph, v: str, maxlen: int) -> list[Path]:
    """Closed paths ``alpha`` with ``s(alpha) = r(alpha) = v`` and
    ``1 <= |alpha| <= maxlen``, ordered by length then lexicographically."""
    if not g.is_vertex(v):
        raise GraphError([f"unknown vertex {v!r}"])
    found: list[Path] = []
    layer = [Path((e,), v, g.rng[e]) for e in g.out_edges(v)]
    for _ in range(maxlen):
        found.extend(p for p in layer if p.rng == v)
        layer = [extend(g, p, e) for p in layer for e in g.out_edges(p.rng)]
    return found


def simple_cycles(g: Graph) -> list[Path]:
    """Closed paths that visit no vertex twice, one rotation per cycle
    (the rotation starting at its earliest-declared vertex)."""
    order = {v: i for i, v in enumerate(g.vertices)}
    cycles: list[Path] = []

    def walk(start: str, p: Path, visited: set[str]) -> None:
        for e in g.out_edges(p.rng):
            t = g.rng[e]
            if t == start:
                cycles.append(extend(g, p, e))
            elif t not in visited and order[t] > order[start]:
                visited.add(t)
                walk(start, extend(g, p, e), visited)
                visited.discard(t)

    for v in g.vertices:
        walk(v, Path((), v, v), {v})
    return cycles


def has_exit(g: Graph, alpha: Path) -> bool:
    """Whether some ``e`` with ``s(e) = s(alpha_i)`` differs from ``alpha_i``."""
    return any(len(g.out_edges(g.src[a])) > 1 for a in alpha.edges)


def condition_L(g: Graph) -> tuple[bool, list[Path]]:
    """Condition (L): every closed path has an exit.

    Returns the verdict and the simple cycles without an exit.  Checking
    simple cycles suffices because any closed path runs through one.
    """
    bad = [c for c in simple_cycles(g) if not has_exit(g, c)]
    return not bad, bad


def non_isolated(g: Graph) -> list[str]:
    """``r(E^1) \\cup s(E^1)`` in declaration order."""
    touched = set(g.src.values()) | set(g.rng.values())
    return [v for v in g.vertices if v in touched]


def connected_components(g: Graph) -> tuple[list[list[str]], list[str]]:
    """Connected sets ``Z_i`` of non-isolated vertices, and isolated set ``R``.

    Connectivity ignores orientation.  Both parts keep declaration order.
    """
    und = nx.MultiGraph()
    und.add_nodes_from(g.vertices)
    und.add_edges_from((g.src[e], g.rng[e]) for e in g.edges)
    order = {v: i for i, v in enumerate(g.vertices)}
    touched = set(non_isolated(g))
    comps = []
    for comp in nx.connected_components(und):
        if comp & touched:
            comps.append(sorted(comp, key=order.__getitem__))
    comps.sort(key=lambda c: order[c[0]])
    isolated = [v for v in g.vertices if v not in touched]
    return comps, isolated


def _incident(g: Graph, v: str) -> Iterator[tuple[str, str, bool]]:
    """(edge, other end, traversed forward) for each edge touching ``v``."""
    for e in g.edges:
        if g.src[e] == v:
            yield e, g.rng[e], True
        if g.rng[e] == v and g.src[e] != v:
            yield e, g.src[e], False


def unoriented_paths(g: Graph, u: str, v: str, limit: int | None = None) -> list[UnorientedPath]:
    """Paths without orientation from ``u`` to ``v`` (distinct edges, vertices
    may repeat).  Stops after ``limit`` paths when given."""
    out: list[UnorientedPath] = []

    def walk(verts: list[str], edges: list[str], fwd: list[bool]) -> bool:
        here = verts[-1]
        if here == v and edges:
            out.append(UnorientedPath(tuple(verts), tuple(edges), tuple(fwd)))
            if limit is not None and len(out) >= limit:
                return True
        for e, nxt, forward in _incident(g, here):
            if e in edges:
                continue
            verts.append(nxt), edges.append(e), fwd.append(forward)
            if walk(verts, edges, fwd):
                return True
            verts.pop(), edges.pop(), fwd.pop()
        return False

    walk([u], [], [])
    return out


def is_p_simple(g: Graph) -> tuple[bool, tuple[str, ...] | tuple[UnorientedPath, UnorientedPath] | None]:
    """P-simplicity with a witness.

    The witness is ``(e,)`` for a self-loop ``e``, or two distinct unoriented
    paths between the same pair of non-isolated vertices.
    """
    for e in g.edges:
        if g.src[e] == g.rng[e]:
            return False, (e,)
    verts = non_isolated(g)
    for i, u in enumerate(verts):
        for v in verts[i + 1:]:
            found = unoriented_paths(g, u, v, limit=2)
            if len(found) > 1:
                return False, (found[0], found[1])
    return True, None


@dataclass(frozen=True)
class Levels:
    """Result of iterated extreme-vertex peeling.

    ``X[n]`` and ``Y[n]`` are the level ``n + 1`` vertices and edges.
    ``leftover`` holds the non-isolated vertices that never became extreme.
    """

    X: tuple[tuple[str, ...], ...]
    Y: tuple[tuple[str, ...], ...]
    leftover: tuple[str, ...]

    def level_of(self, v: str) -> int | None:
        for n, xs in enumerate(self.X, 1):
            if v in xs:
                return n
        return None


def extreme_vertices(g: Graph, vertices: Sequence[str], edges: Sequence[str]) -> list[tuple[str, str]]:
    """(vertex, its unique edge) for every extreme vertex of the subgraph."""
    out = []
    for v in vertices:
        adj = [e for e in edges if g.src[e] == v or g.rng[e] == v]
        if len(adj) == 1 and g.src[adj[0]] != g.rng[adj[0]]:
            out.append((v, adj[0]))
    return out


def level_decomposition(g: Graph) -> Levels:
    """Peel all current extreme vertices at once, level by level."""
    vertices = non_isolated(g)
    edges = list(g.edges)
    X: list[tuple[str, ...]] = []
    Y: list[tuple[str, ...]] = []
    while True:
        ext = extreme_vertices(g, vertices, edges)
        if not ext:
            break
        xs = tuple(v for v, _ in ext)
        ys = tuple(e for e in edges if e in {e for _, e in ext})
        X.append(xs)
        Y.append(ys)
        vertices = [v for v in vertices if v not in xs]
        edges = [e for e in edges if e not in ys]
    return Levels(tuple(X), tuple(Y), tuple(vertices))

