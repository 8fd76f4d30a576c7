"""The single loop acts on delta functions by rotation; Laurent polynomials
in the loop vanish only when every coefficient does."""

from __future__ import annotations

from fractions import Fraction

from lpa.algebra import laurent, parse_element
from lpa.branching import build_rotation_system
from lpa.graph import parse_graph
from lpa.rep import FinSupp, apply_element, zero_test_semantic

g = parse_graph("vertex *\nedge x * *\n")
sys = build_rotation_system(g)
x = parse_element(g, "x")

phi = FinSupp.delta(0)
for n in range(6):
    print(f"x^{n} d[0] = {phi}")
    phi = apply_element(sys, x, phi)

for coeffs in ({-2: Fraction(1), 3: Fraction(-1, 2)}, {}):
    elem = laurent(g, "x", coeffs)
    print(f"{elem or '0'}: {zero_test_semantic(sys, elem)}")
