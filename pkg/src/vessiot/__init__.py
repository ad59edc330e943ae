"""Exact-arithmetic workbench for jet calculus on algebraic Lie
pseudogroups: differential invariants, prolongations, symbols,
characters, Janet boards, and the PHS / automorphic-system criteria."""

from .errors import VessiotError
from .jets import JetContext, VectorField
from .symcore import Polynomial, RationalExpr, VariableId

__all__ = [
    "JetContext",
    "Polynomial",
    "RationalExpr",
    "VariableId",
    "VectorField",
    "VessiotError",
]

__version__ = "0.1.0"
