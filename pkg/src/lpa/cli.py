"""Command-line front end.

Every verb builds a list of report records.  Each record has a ``line``
(the human report) plus structured fields; ``--format json-lines`` prints
the records as JSON, the default prints the lines.

Exit status: 0 for ok/zero verdicts, 1 for fail/nonzero verdicts (and for
oracle disagreement), 2 for usage, parse and precondition errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path as FilePath
from typing import Any, Callable

from .algebra import (ParseError, find_separating_path, format_element, is_zero_syntactic,
                      normal_form, parse_element)
from .branching import (BranchingSystem, SinkError, build_interval_system, build_rotation_system,
                        check_faithfulness_hypothesis, dump_system, validate_system)
from .equivrep import (B2BFailure, RepParseError, build_b2b_basis, extract_subspaces,
                       induced_system_and_intertwiner, parse_rep, validate_matrix_rep)
from .graph import (Graph, GraphError, closed_paths_from, condition_L, is_p_simple,
                    level_decomposition, parse_graph, validate_graph)
from .qfield import parse_qnum
from .rep import FinSupp, PreconditionError, apply_element, zero_test_semantic

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class Report:
    records: list[dict[str, Any]] = field(default_factory=list)
    code: int = OK

    def add(self, line: str, **data: Any) -> None:
        self.records.append({"line": line, **data})


def _set(items) -> str:
    return "{" + ", ".join(str(i) for i in items) + "}"


def _load_graph(path: str) -> Graph:
    try:
        text = FilePath(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_graph(text)


def _system(g: Graph, kind: str) -> BranchingSystem:
    try:
        return build_rotation_system(g) if kind == "rotation" else build_interval_system(g)
    except SinkError as exc:
        raise PreconditionError(str(exc)) from None


def cmd_validate_graph(args) -> Report:
    rep = Report()
    try:
        g = _load_graph(args.graph)
    except GraphError as exc:
        for err in exc.errors:
            rep.add(f"error: {err}", verdict="fail", error=err)
        rep.code = FAIL
        return rep
    errors = validate_graph(g)
    for err in errors:
        rep.add(f"error: {err}", verdict="fail", error=err)
    if errors:
        rep.code = FAIL
    else:
        rep.add(f"ok ({len(g.vertices)} vertices, {len(g.edges)} edges)",
                verdict="ok", vertices=len(g.vertices), edges=len(g.edges))
    return rep


def cmd_levels(args) -> Report:
    g = _load_graph(args.graph)
    lv = level_decomposition(g)
    rep = Report()
    for n, (xs, ys) in enumerate(zip(lv.X, lv.Y), 1):
        rep.add(f"X{n} = {_set(xs)}  Y{n} = {_set(ys)}", level=n, vertices=list(xs), edges=list(ys))
    rep.add(f"leftover = {_set(lv.leftover)}", leftover=list(lv.leftover))
    ok, witness = is_p_simple(g)
    if ok:
        rep.add("p-simple: yes", p_simple=True)
    else:
        w = " vs ".join(str(p) for p in witness) if witness else ""
        rep.add(f"p-simple: no ({w})", p_simple=False, witness=[str(p) for p in witness or ()])
    return rep


def cmd_condition_l(args) -> Report:
    g = _load_graph(args.graph)
    ok, bad = condition_L(g)
    rep = Report()
    if ok:
        rep.add("holds", verdict="ok")
    else:
        rep.add(f"fails: cycles without exit {_set(bad)}", verdict="fail", cycles=[str(c) for c in bad])
        rep.code = FAIL
    return rep


def cmd_build_system(args) -> Report:
    g = _load_graph(args.graph)
    s = _system(g, args.kind)
    rep = Report()
    violations = validate_system(s)
    if violations:
        for v in violations:
            rep.add(f"violation: {v}", verdict="fail", item=v.item, message=v.message,
                    witness=None if v.witness is None else str(v.witness))
        rep.code = FAIL
    else:
        rep.add(f"valid {s.kind} system", verdict="ok", kind=s.kind)
    if args.dump:
        for line in dump_system(s).splitlines():
            rep.add(line, dump=line)
    return rep


def cmd_normal_form(args) -> Report:
    g = _load_graph(args.graph)
    x = parse_element(g, args.elem)
    nf = normal_form(g, x)
    rep = Report()
    rep.add(format_element(nf), normal_form=format_element(nf), terms=len(nf))
    return rep


def cmd_zero_test(args) -> Report:
    g = _load_graph(args.graph)
    x = parse_element(g, args.elem)
    rep = Report()
    verdicts = {}
    details = []
    if args.oracle in ("syntactic", "both"):
        verdicts["syntactic"] = is_zero_syntactic(g, x)
        nf = format_element(normal_form(g, x))
        details.append((f"syntactic: {'zero' if verdicts['syntactic'] else 'nonzero'} (normal form {nf})",
                        {"oracle": "syntactic", "zero": verdicts["syntactic"], "normal_form": nf}))
    if args.oracle in ("semantic", "both"):
        res = zero_test_semantic(_system(g, args.system), x, unchecked=args.unchecked)
        verdicts["semantic"] = res.zero
        data = {"oracle": "semantic", "zero": res.zero, "cells": res.cells, "groups": res.groups}
        if not res.zero:
            data.update(witness=str(res.witness), image=str(res.image), coefficient=str(res.coefficient))
        details.append((f"semantic: {res}", data))
    values = set(verdicts.values())
    if len(values) > 1:
        rep.add("DISAGREE", verdict="disagree")
        rep.code = FAIL
    else:
        zero = values.pop()
        rep.add("zero" if zero else "nonzero", verdict="zero" if zero else "nonzero")
        rep.code = OK if zero else FAIL
    for line, data in details:
        rep.add(line, **data)
    return rep


def cmd_separating_path(args) -> Report:
    g = _load_graph(args.graph)
    x = parse_element(g, args.elem)
    try:
        c = find_separating_path(g, x, args.maxlen)
    except ValueError as exc:
        raise PreconditionError(str(exc)) from None
    rep = Report()
    if c is None:
        rep.add(f"none up to length {args.maxlen}", verdict="fail", path=None)
        rep.code = FAIL
    else:
        rep.add(f"path {c}", verdict="ok", path=str(c))
    return rep


def cmd_check_hypothesis(args) -> Report:
    g = _load_graph(args.graph)
    s = _system(g, args.system)
    if args.vertex is not None:
        if not g.is_vertex(args.vertex):
            raise UsageError(f"unknown vertex {args.vertex!r}")
        targets = [args.vertex]
    else:
        targets = [v for v in g.vertices if closed_paths_from(g, v, len(g.edges) or 1)]
    rep = Report()
    for v in targets:
        res = check_faithfulness_hypothesis(s, v, args.maxlen)
        prefix = "" if args.vertex is not None else f"{v}: "
        rep.add(prefix + str(res), vertex=v, verdict="ok" if res.ok else "fail",
                witness=None if res.witness is None else str(res.witness),
                certified=res.certified, paths=len(res.paths), fixed=[str(p) for p in res.fixed])
        if not res.ok:
            rep.code = FAIL
    if not targets:
        rep.add("no closed paths", verdict="ok")
    return rep


def cmd_apply(args) -> Report:
    g = _load_graph(args.graph)
    s = _system(g, args.system)
    x = parse_element(g, args.elem)
    try:
        z = parse_qnum(args.point)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = apply_element(s, x, FinSupp.delta(z))
    rep = Report()
    rep.add(str(out), point=str(z), result={str(w): str(c) for w, c in sorted(out.values.items())})
    return rep


def cmd_analyze_rep(args) -> Report:
    g = _load_graph(args.graph)
    try:
        phi = parse_rep(FilePath(args.rep).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {args.rep}: {exc.strerror}") from None
    rep = Report()
    errs = validate_matrix_rep(g, phi)
    if errs:
        for e in errs:
            rep.add(f"violation: {e}", verdict="fail", violation=e)
        rep.code = FAIL
        return rep
    rep.add("representation ok", verdict="ok", dim=phi.dim)
    table = extract_subspaces(g, phi)
    for k, ok in table.properties.items():
        rep.add(f"property {k}: {'ok' if ok else 'FAILED'}", property=k, ok=ok)
    rep.add(f"dim Vbar = {table.Vbar.cols}", vbar=table.Vbar.cols)
    if table.failures():
        rep.code = FAIL
        return rep
    basis = build_b2b_basis(g, phi, table)
    if isinstance(basis, B2BFailure):
        rep.add(f"b2b basis not found: {basis}", verdict="fail", reason=basis.reason, cycle=basis.cycle)
        rep.code = FAIL
        return rep
    for line in basis.format(g).splitlines():
        rep.add(line, basis=line)
    eq = induced_system_and_intertwiner(g, phi, basis)
    for v in eq.violations:
        rep.add(f"violation: {v}", verdict="fail")
    bad = [k for k, ok in eq.full.items() if not ok]
    if eq.ok:
        rep.add("intertwiner verified", verdict="ok", generators=len(eq.full))
    else:
        rep.add(f"intertwiner FAILED on {_set(bad)}", verdict="fail", failed=bad)
        rep.code = FAIL
    return rep


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lpa", description="Leavitt path algebra toolkit")
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name: str, fn: Callable, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--graph", required=True, help="graph file")
        sp.add_argument("--format", choices=["text", "json-lines"], default="text")
        sp.set_defaults(fn=fn)
        return sp

    verb("validate-graph", cmd_validate_graph, "check a graph file")
    verb("levels", cmd_levels, "extreme-vertex level decomposition")
    verb("condition-l", cmd_condition_l, "does every closed path have an exit")
    sp = verb("build-system", cmd_build_system, "build and validate a branching system")
    sp.add_argument("--kind", choices=["interval", "rotation"], default="rotation")
    sp.add_argument("--dump", action="store_true")
    sp = verb("normal-form", cmd_normal_form, "reduce an element to normal form")
    sp.add_argument("--elem", required=True)
    sp = verb("zero-test", cmd_zero_test, "decide whether an element is zero")
    sp.add_argument("--elem", required=True)
    sp.add_argument("--oracle", choices=["syntactic", "semantic", "both"], default="both")
    sp.add_argument("--system", choices=["interval", "rotation"], default="rotation")
    sp.add_argument("--unchecked", action="store_true", help="skip the faithfulness precondition")
    sp = verb("separating-path", cmd_separating_path, "path c with c* x c a nonzero polynomial")
    sp.add_argument("--elem", required=True)
    sp.add_argument("--maxlen", type=int, default=4)
    sp = verb("check-hypothesis", cmd_check_hypothesis, "search for a point moved by all closed paths")
    sp.add_argument("--vertex")
    sp.add_argument("--maxlen", type=int, default=5)
    sp.add_argument("--system", choices=["interval", "rotation"], default="rotation")
    sp = verb("apply", cmd_apply, "apply an element to a point mass")
    sp.add_argument("--elem", required=True)
    sp.add_argument("--point", required=True, help="point in the form 'a + b r2'")
    sp.add_argument("--system", choices=["interval", "rotation"], default="rotation")
    sp = verb("analyze-rep", cmd_analyze_rep, "subspaces, basis and intertwiner of a matrix rep")
    sp.add_argument("--rep", required=True)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        report = args.fn(args)
    except (UsageError, GraphError, ParseError, RepParseError, PreconditionError) as exc:
        print(f"lpa {args.verb}: {exc}", file=sys.stderr)
        return USAGE
    for rec in report.records:
        if args.format == "json-lines":
            print(json.dumps({"verb": args.verb, **rec}, sort_keys=True, ensure_ascii=False))
        else:
            print(rec["line"])
    return report.code


if __name__ == "__main__":
    sys.exit(main())
