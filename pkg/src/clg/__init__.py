"""Workbench for computability-logic games.

Subpackages cover the move-level game engine, a sequent proof checker
with search, strategy extraction from proofs, arithmetic deductions,
a primitive-recursion compiler, a simulation harness, and a small
HTTP session service.
"""

__version__ = "0.1.0"
