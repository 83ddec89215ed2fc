"""Exact divisor computations on the moduli spaces ``M_{0,n}``.

Picard groups with normal forms, F-curve pairings, the nef cone of
``M_{0,6}`` and its chambers, fibration types for ``n = 5, 6``, symmetric
F-inequality scans and invariant nef certificates.  All arithmetic is over
the rationals.
"""
from .combinat import BoundaryClass, BoundaryRestriction, FCurve, SymmetryGroup, fcurves, restriction
from .intersect import dot, fnef, pullback
from .picard import DivisorClass, Psi, named_class, pic_context, picard_dimension

__version__ = "0.1.0"

__all__ = [
    "BoundaryClass",
    "BoundaryRestriction",
    "DivisorClass",
    "FCurve",
    "Psi",
    "SymmetryGroup",
    "dot",
    "fcurves",
    "fnef",
    "named_class",
    "pic_context",
    "picard_dimension",
    "pullback",
    "restriction",
]
