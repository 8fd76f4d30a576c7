"""Syntactic normal form against the exact semantic zero test on a rose."""

from __future__ import annotations

import random

from lpa.algebra import is_zero_syntactic, normal_form, parse_element
from lpa.branching import build_rotation_system
from lpa.generate import random_element
from lpa.graph import parse_graph
from lpa.rep import zero_test_semantic

g = parse_graph("vertex v\nedge a v v\nedge b v v\n")
sys = build_rotation_system(g)

for text in ("a.a* + b.b* - v", "a.a* - v", "a*.b", "b.a.a*.b* + b.b.b*.b* - b.b*"):
    x = parse_element(g, text)
    print(f"{text}\n  normal form: {normal_form(g, x) or '0'}\n  semantic:    {zero_test_semantic(sys, x)}")

rng = random.Random(7)
agree = sum(is_zero_syntactic(g, x) == zero_test_semantic(sys, x).zero
            for x in (random_element(rng, g) for _ in range(200)))
print(f"random elements where both tests agree: {agree}/200")
