"""Exact branching systems and representations of Leavitt path algebras of
finite graphs over the rationals."""

from __future__ import annotations
