"""A representation of a tree written in random coordinates is recognised as
one induced by a branching system, with an explicit intertwiner."""

from __future__ import annotations

import random

from lpa.equivrep import (build_b2b_basis, extract_subspaces, format_rep, induced_system_and_intertwiner,
                          validate_matrix_rep)
from lpa.generate import random_tree_rep
from lpa.graph import format_graph

rng = random.Random(3)
g, rep = random_tree_rep(rng, max_vertices=4, max_dim=6)
print(format_graph(g))
print(format_rep(rep, g))
print("relations:", validate_matrix_rep(g, rep) or "all hold")
table = extract_subspaces(g, rep)
print("subspace properties failing:", table.failures() or "none")
basis = build_b2b_basis(g, rep, table)
print(basis.format(g))
eq = induced_system_and_intertwiner(g, rep, basis)
print("intertwiner Q:", eq.Q.tolist())
print("intertwines on all columns:", eq.full, "| on the restricted columns:", eq.restricted)
