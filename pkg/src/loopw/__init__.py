"""Exact computations for the loop W(a,b) Lie conformal algebra."""

from .core import CLW, AxiomReport, Element, Gen, I, L, TableAlgebra, check_all, clw_bracket, extend_bracket
from .exactalg import D, LAM, MU, LinSystem, Poly, SolutionSpace, nullspace, rat

__all__ = [
    "CLW",
    "AxiomReport",
    "Element",
    "Gen",
    "I",
    "L",
    "TableAlgebra",
    "check_all",
    "clw_bracket",
    "extend_bracket",
    "D",
    "LAM",
    "MU",
    "LinSystem",
    "Poly",
    "SolutionSpace",
    "nullspace",
    "rat",
]
