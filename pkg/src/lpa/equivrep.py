"""Finite-dimensional representations over Q: subspace extraction, bases
permuted by the edge operators, the induced branching system on index sets
and the intertwiner that realises the equivalence."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from sympy import Matrix, Rational as SymRational, eye, zeros

from .branching import BranchingSystem, discrete_system, validate_system
from .graph import Graph, level_decomposition, paths_of_length, simple_cycles
from .rep import FinSupp, apply_generator

Vec = tuple[Fraction, ...]


class RepParseError(ValueError):
    pass


def _sym(x) -> SymRational:
    x = Fraction(x)
    return SymRational(x.numerator, x.denominator)


def _frac(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def generators(g: Graph) -> list[str]:
    """Every generator name in a fixed order: vertices, edges, ghosts."""
    return list(g.vertices) + list(g.edges) + [e + "*" for e in g.edges]


@dataclass
class MatrixRep:
    """Images of the generators as ``dim x dim`` rational matrices.

    Generators absent from ``assign`` act as zero.
    """

    dim: int
    assign: dict[str, Matrix] = field(default_factory=dict)

    def __getitem__(self, gen: str) -> Matrix:
        m = self.assign.get(gen)
        return zeros(self.dim, self.dim) if m is None else m


def parse_rep(text: str) -> MatrixRep:
    """``dim n`` then ``map <gen> <n*n rationals, row-major>`` lines."""
    dim: int | None = None
    assign: dict[str, Matrix] = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        try:
            if words[0] == "dim":
                if dim is not None or len(words) != 2:
                    raise RepParseError("bad or repeated dim header")
                dim = int(words[1])
                if dim < 0:
                    raise RepParseError("negative dim")
            elif words[0] == "map":
                if dim is None:
                    raise RepParseError("map before dim header")
                if len(words) != 2 + dim * dim:
                    raise RepParseError(f"expected {dim * dim} entries, got {len(words) - 2}")
                gen = words[1]
                if gen in assign:
                    raise RepParseError(f"generator {gen} mapped twice")
                vals = [_sym(Fraction(w)) for w in words[2:]]
                assign[gen] = Matrix(dim, dim, vals)
            else:
                raise RepParseError(f"unknown directive {words[0]!r}")
        except (ValueError, ZeroDivisionError) as exc:
            raise RepParseError(f"line {no}: {exc}") from None
    if dim is None:
        raise RepParseError("missing dim header")
    return MatrixRep(dim, assign)


def format_rep(rep: MatrixRep, g: Graph | None = None) -> str:
    gens = generators(g) if g is not None else sorted(rep.assign)
    lines = [f"dim {rep.dim}"]
    for gen in gens:
        if gen in rep.assign:
            vals = " ".join(str(_frac(x)) for x in rep.assign[gen])
            lines.append(f"map {gen} {vals}".rstrip())
    return "\n".join(lines) + "\n"


def validate_matrix_rep(g: Graph, rep: MatrixRep) -> list[str]:
    """Every defining relation checked as an exact matrix identity."""
    errs = []
    known = set(generators(g))
    for gen, m in rep.assign.items():
        if gen not in known:
            errs.append(f"unknown generator {gen}")
        elif m.shape != (rep.dim, rep.dim):
            errs.append(f"{gen}: shape {m.shape}, expected {rep.dim}x{rep.dim}")
    if errs:
        return errs
    P = rep
    Z = zeros(rep.dim, rep.dim)
    for u in g.vertices:
        for v in g.vertices:
            want = P[u] if u == v else Z
            if P[u] * P[v] != want:
                errs.append(f"vertex {u} {v}: " + ("not idempotent" if u == v else "not orthogonal"))
    for e in g.edges:
        s, r, S, Ss = P[g.src[e]], P[g.rng[e]], P[e], P[e + "*"]
        if s * S != S or S * r != S:
            errs.append(f"relation (1) {e}")
        if r * Ss != Ss or Ss * s != Ss:
            errs.append(f"relation (2) {e}*")
        for f in g.edges:
            want = r if e == f else Z
            if Ss * P[f] != want:
                errs.append(f"relation (3) {e}* {f}")
    for v in g.vertices:
        out = g.out_edges(v)
        if out:
            total = Z
            for e in out:
                total = total + P[e] * P[e + "*"]
            if total != P[v]:
                errs.append(f"relation (4) {v}")
    return errs


def column_basis(a: Matrix) -> Matrix:
    """Reduced-echelon basis of the column space, as columns."""
    if a.cols == 0 or a.rows == 0:
        return zeros(a.rows, 0)
    red, piv = a.T.rref()
    return red[: len(piv), :].T


def _stack(mats: Sequence[Matrix], rows: int) -> Matrix:
    mats = [m for m in mats if m.cols]
    if not mats:
        return zeros(rows, 0)
    return Matrix.hstack(*mats)


def _rank(m: Matrix) -> int:
    return m.rank() if m.cols else 0


def _contains(big: Matrix, small: Matrix) -> bool:
    return _rank(_stack([big, small], big.rows)) == _rank(big)


@dataclass
class SubspaceTable:
    """``V_u = Phi(u)V``, ``V_e = Phi(e)Phi(e*)V`` and the complement
    ``Vbar`` (common kernel of the vertex projections)."""

    dim: int
    V_u: dict[str, Matrix]
    V_e: dict[str, Matrix]
    Vbar_u: dict[str, Matrix]
    Vbar: Matrix
    properties: dict[int, bool]

    def failures(self) -> list[int]:
        return [k for k, ok in self.properties.items() if not ok]


def extract_subspaces(g: Graph, rep: MatrixRep) -> SubspaceTable:
    n = rep.dim
    V_u = {u: column_basis(rep[u]) for u in g.vertices}
    V_e = {e: column_basis(rep[e] * rep[e + "*"]) for e in g.edges}
    # finite graphs have no infinite emitters, so these are always trivial
    Vbar_u = {u: zeros(n, 0) for u in g.vertices}
    kernel = Matrix.vstack(*[rep[u] for u in g.vertices]).nullspace() if g.vertices else [eye(n)[:, i] for i in range(n)]
    Vbar = column_basis(_stack(kernel, n))
    props: dict[int, bool] = {}
    props[1] = all(_contains(V_u[g.src[e]], V_e[e]) for e in g.edges)
    props[2] = _independent([V_e[e] for e in g.edges], n)
    props[3] = _independent([V_u[u] for u in g.vertices], n)
    props[4] = all(_iso_pair(rep, V_u[g.rng[e]], V_e[e], e) for e in g.edges)
    props[5] = all(
        _independent([V_e[e] for e in g.out_edges(u)], n)
        and _rank(_stack([V_e[e] for e in g.out_edges(u)], n)) == V_u[u].cols
        and all(_contains(V_u[u], V_e[e]) for e in g.out_edges(u))
        for u in g.vertices if g.out_edges(u)
    )
    props[6] = all(m.cols == 0 for m in Vbar_u.values())
    parts = [V_u[u] for u in g.vertices] + [Vbar]
    props[7] = _independent(parts, n) and sum(p.cols for p in parts) == n
    return SubspaceTable(n, V_u, V_e, Vbar_u, Vbar, props)


def _independent(parts: Sequence[Matrix], rows: int) -> bool:
    """The spans are independent, so their sum is direct."""
    return _rank(_stack(parts, rows)) == sum(p.cols for p in parts)


def _iso_pair(rep: MatrixRep, Vr: Matrix, Ve: Matrix, e: str) -> bool:
    if Vr.cols != Ve.cols:
        return False
    if Vr.cols == 0:
        return True
    img = rep[e] * Vr
    back = rep[e + "*"] * Ve
    return (
        _rank(img) == Vr.cols
        and _contains(Ve, img)
        and rep[e + "*"] * img == Vr
        and rep[e] * back == Ve
    )


def _vec(col: Matrix) -> Vec:
    return tuple(_frac(x) for x in col)


def _cols(m: Matrix) -> list[Vec]:
    return [_vec(m[:, i]) for i in range(m.cols)]


def _mat(vs: Sequence[Vec], rows: int) -> Matrix:
    if not vs:
        return zeros(rows, 0)
    return Matrix.hstack(*[Matrix([_sym(x) for x in v]) for v in vs])


def _apply(m: Matrix, vs: Sequence[Vec]) -> list[Vec]:
    return [_vec(m * Matrix([_sym(x) for x in v])) for v in vs]


@dataclass
class B2BBasis:
    """Basis ``m_x`` of V indexed ``0..dim-1``.

    ``D[u]`` indexes a basis of ``V_u``; for emitters it is the union of the
    ``R[e]``.  ``bar`` indexes a basis of ``Vbar``.  ``f[e]`` sends ``x`` to
    the ``y`` with ``Phi(e) m_x = m_y``.
    """

    vectors: list[Vec]
    D: dict[str, list[int]]
    R: dict[str, list[int]]
    bar: list[int]
    f: dict[str, dict[int, int]]

    def matrix(self) -> Matrix:
        return _mat(self.vectors, len(self.vectors[0]) if self.vectors else 0)

    def format(self, g: Graph) -> str:
        def vec(v: Vec) -> str:
            return "(" + ", ".join(str(c) for c in v) + ")"

        lines = []
        for u in g.vertices:
            lines.append(f"D {u} = {{{', '.join(f'm{x}' for x in self.D[u])}}}")
        for e in g.edges:
            pairs = ", ".join(f"m{x}->m{y}" for x, y in sorted(self.f[e].items()))
            lines.append(f"R {e} = {{{', '.join(f'm{x}' for x in self.R[e])}}}  f_{e}: {pairs}")
        lines.append(f"bar = {{{', '.join(f'm{x}' for x in self.bar)}}}")
        for x, v in enumerate(self.vectors):
            lines.append(f"m{x} = {vec(v)}")
        return "\n".join(lines) + "\n"


@dataclass
class B2BFailure:
    reason: str
    cycle: str | None = None

    def __str__(self) -> str:
        return self.reason + (f" (cycle {self.cycle})" if self.cycle else "")


class _Conflict(Exception):
    def __init__(self, item: str, message: str):
        super().__init__(message)
        self.item = item


def build_b2b_basis(g: Graph, rep: MatrixRep, table: SubspaceTable | None = None) -> B2BBasis | B2BFailure:
    """Choose bases ``B_u`` of ``V_u`` and ``B_e`` of ``V_e`` with
    ``Phi(e) B_{r(e)} = B_e`` as sets.

    Vertices that reach no directed cycle are handled sinks first, each
    emitter taking the union of the images of its successors' bases.  The
    rest is seeded at one vertex and propagated through ``Phi(e)``,
    ``Phi(e*)``, unions and splits; any re-derivation that disagrees is a
    failure.  The result is always re-checked by :func:`verify_b2b`.
    """
    table = table or extract_subspaces(g, rep)
    n = rep.dim
    Bv: dict[str, list[Vec]] = {}
    Be: dict[str, list[Vec]] = {}

    # sink-first pass
    changed = True
    while changed:
        changed = False
        for u in g.vertices:
            if u in Bv:
                continue
            out = g.out_edges(u)
            if not out:
                Bv[u] = _cols(table.V_u[u])
                changed = True
            elif all(g.rng[e] in Bv for e in out):
                for e in out:
                    Be[e] = _apply(rep[e], Bv[g.rng[e]])
                Bv[u] = [v for e in out for v in Be[e]]
                changed = True

    try:
        while len(Bv) < len(g.vertices):
            seed = _seed(g, [u for u in g.vertices if u not in Bv])
            for e in g.out_edges(seed):
                if e not in Be:
                    Be[e] = _apply(rep[e], Bv[g.rng[e]]) if g.rng[e] in Bv else _cols(table.V_e[e])
            Bv[seed] = [v for e in g.out_edges(seed) for v in Be[e]]
            _propagate(g, rep, table, Bv, Be)
    except _Conflict as c:
        return B2BFailure(str(c), _cycle_through(g, c.item))

    for e in g.edges:
        if e not in Be:
            Be[e] = _apply(rep[e], Bv[g.rng[e]])
    basis = _label(g, rep, Bv, Be, _cols(table.Vbar))
    errs = verify_b2b(g, rep, table, basis)
    if errs:
        return B2BFailure("verification failed: " + "; ".join(errs))
    return basis


def _seed(g: Graph, pending: list[str]) -> str:
    levels = level_decomposition(g)
    for v in levels.leftover:
        if v in pending:
            return v
    ranked = [(levels.level_of(v) or 0, -i, v) for i, v in enumerate(g.vertices) if v in pending]
    return max(ranked)[2]


def _same(a: Sequence[Vec], b: Sequence[Vec]) -> bool:
    return len(a) == len(b) and set(a) == set(b)


def _propagate(g: Graph, rep: MatrixRep, table: SubspaceTable,
               Bv: dict[str, list[Vec]], Be: dict[str, list[Vec]]) -> None:
    def put(store: dict, key: str, vs: list[Vec], item: str, what: str) -> bool:
        if key in store:
            if not _same(store[key], vs):
                raise _Conflict(item, f"conflict at {item}: {what} disagrees with the basis already chosen")
            return False
        store[key] = vs
        return True

    changed = True
    while changed:
        changed = False
        for e in g.edges:
            r = g.rng[e]
            if r in Bv:
                changed |= put(Be, e, _apply(rep[e], Bv[r]), e, f"image of B_{r} under {e}")
            if e in Be:
                changed |= put(Bv, r, _apply(rep[e + "*"], Be[e]), e, f"image of B_{e} under {e}*")
        for u in g.vertices:
            out = g.out_edges(u)
            if not out:
                continue
            if all(e in Be for e in out):
                changed |= put(Bv, u, [v for e in out for v in Be[e]], u, f"union of out-edge bases at {u}")
            if u in Bv:
                for e in out:
                    part = [v for v in Bv[u] if _contains(table.V_e[e], _mat([v], rep.dim))]
                    if len(part) != table.V_e[e].cols:
                        raise _Conflict(e, f"conflict at {e}: B_{u} does not split along V_{e}")
                    changed |= put(Be, e, part, e, f"split of B_{u}")


def _cycle_through(g: Graph, item: str) -> str | None:
    for c in simple_cycles(g):
        if item in c.edges or item in g.vertex_path(c):
            return str(c)
    return None


def _label(g: Graph, rep: MatrixRep, Bv: dict[str, list[Vec]], Be: dict[str, list[Vec]],
           bar: list[Vec]) -> B2BBasis:
    vectors: list[Vec] = []
    index: dict[Vec, int] = {}

    def add(vs: list[Vec]) -> list[int]:
        out = []
        for v in vs:
            if v not in index:
                index[v] = len(vectors)
                vectors.append(v)
            out.append(index[v])
        return out

    D: dict[str, list[int]] = {}
    R: dict[str, list[int]] = {}
    for u in g.vertices:
        out = g.out_edges(u)
        if out:
            for e in out:
                R[e] = add(Be[e])
            D[u] = [x for e in out for x in R[e]]
        else:
            D[u] = add(Bv[u])
    bar_ix = add(bar)
    f: dict[str, dict[int, int]] = {}
    for e in g.edges:
        images = _apply(rep[e], [vectors[x] for x in D[g.rng[e]]])
        # an image outside the labelled basis is caught by verify_b2b
        f[e] = {x: index.get(y, -1) for x, y in zip(D[g.rng[e]], images)}
    return B2BBasis(vectors, D, R, bar_ix, f)


def verify_b2b(g: Graph, rep: MatrixRep, table: SubspaceTable, basis: B2BBasis) -> list[str]:
    """Independent check that ``basis`` is a basis of V with the required
    pieces and that every ``Phi(e)`` carries ``D_{r(e)}`` onto ``R_e``."""
    n = rep.dim
    errs = []
    vs = basis.vectors
    if len(vs) != n or (n and _rank(_mat(vs, n)) != n):
        errs.append("vectors do not form a basis of V")
    for u in g.vertices:
        part = _mat([vs[x] for x in basis.D[u]], n)
        if part.cols != table.V_u[u].cols or not _contains(table.V_u[u], part) or _rank(part) != part.cols:
            errs.append(f"D_{u} is not a basis of V_{u}")
        out = g.out_edges(u)
        if out and sorted(basis.D[u]) != sorted(x for e in out for x in basis.R[e]):
            errs.append(f"D_{u} is not the union of its R_e")
    for e in g.edges:
        part = _mat([vs[x] for x in basis.R[e]], n)
        if part.cols != table.V_e[e].cols or not _contains(table.V_e[e], part):
            errs.append(f"R_{e} is not a basis of V_{e}")
        src = [vs[x] for x in basis.D[g.rng[e]]]
        if not _same(_apply(rep[e], src), [vs[y] for y in basis.R[e]]):
            errs.append(f"{e} does not map the basis of V_{g.rng[e]} onto that of V_{e}")
    bar = _mat([vs[x] for x in basis.bar], n)
    if bar.cols != table.Vbar.cols or not _contains(table.Vbar, bar):
        errs.append("bar is not a basis of Vbar")
    return errs


@dataclass
class Equivalence:
    """Induced system on index sets, ``Q: m_x -> delta_x`` and the outcome
    of every commuting square."""

    system: BranchingSystem
    Q: Matrix
    restricted: dict[str, bool]
    full: dict[str, bool]
    violations: list[str]

    @property
    def ok(self) -> bool:
        return all(self.restricted.values()) and all(self.full.values()) and not self.violations


def pi_matrix(sys: BranchingSystem, gen: str, n: int) -> Matrix:
    """Matrix of ``pi(gen)`` on ``delta_0..delta_{n-1}``."""
    m = zeros(n, n)
    for x in range(n):
        img = apply_generator(sys, gen, FinSupp.delta(x))
        for z, c in img.values.items():
            m[int(z.a), x] = _sym(c)
    return m


def induced_system_and_intertwiner(g: Graph, rep: MatrixRep, basis: B2BBasis) -> Equivalence:
    """Build the discrete branching system and check ``Q Phi(a) = pi(a) Q``.

    ``restricted`` checks the square on the columns of ``W`` (the sum of the
    ``V_u``), ``full`` on all of ``V``, which includes the ``Vbar`` indices
    as isolated points.
    """
    n = rep.dim
    sys = discrete_system(g, basis.D, basis.R, basis.f, extra=basis.bar)
    violations = [str(v) for v in validate_system(sys)]
    M = basis.matrix() if n else zeros(0, 0)
    Q = M.inv() if n else zeros(0, 0)
    w_cols = sorted(x for u in g.vertices for x in basis.D[u])
    restricted, full = {}, {}
    for gen in generators(g):
        lhs = Q * rep[gen] * M
        rhs = pi_matrix(sys, gen, n)
        full[gen] = lhs == rhs
        restricted[gen] = all(lhs[:, x] == rhs[:, x] for x in w_cols)
    return Equivalence(sys, Q, restricted, full, violations)


def path_space_rep(g: Graph, sink_dims: dict[str, int] | None = None, extra_dim: int = 0) -> MatrixRep:
    """Representation on paths ending at sinks (acyclic graphs only).

    Each path to sink ``w`` carries ``sink_dims[w]`` copies; ``extra_dim``
    coordinates are killed by every generator.
    """
    if simple_cycles(g):
        raise ValueError("path space is infinite for graphs with cycles")
    sink_dims = sink_dims or {}
    paths = []
    n = 0
    while True:
        layer = paths_of_length(g, n)
        if not layer:
            break
        paths += [p for p in layer if not g.out_edges(p.rng)]
        n += 1
    basis = [(p, k) for p in paths for k in range(sink_dims.get(p.rng, 1))]
    index = {b: i for i, b in enumerate(basis)}
    dim = len(basis) + extra_dim
    assign = {gen: zeros(dim, dim) for gen in generators(g)}
    for (p, k), i in index.items():
        assign[p.src][i, i] = 1
        for e in g.in_edges(p.src):
            j = index[(g.path(e) + p, k)]
            assign[e][j, i] = 1
            assign[e + "*"][i, j] = 1
    return MatrixRep(dim, assign)


def conjugate(rep: MatrixRep, A: Matrix) -> MatrixRep:
    """``A Phi A^-1``, an equivalent representation in other coordinates."""
    Ainv = A.inv()
    return MatrixRep(rep.dim, {k: A * m * Ainv for k, m in rep.assign.items()})


def random_invertible(rng: random.Random, n: int, span: int = 2) -> Matrix:
    while True:
        A = Matrix(n, n, [rng.randint(-span, span) for _ in range(n * n)])
        if n == 0 or A.det() != 0:
            return A
