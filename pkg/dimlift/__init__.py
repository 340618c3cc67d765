"""
dimlift - exact liftings of Boolean semilattice diagrams.

Features:
- Dismantling orders for finite posets
- Liftings of diagrams over dismantlable posets by pseudo-simplicial spaces
- Canonical generic maps and factorization through them
- Liftings of finite chains and of single join-semilattices
- Exact Fourier-Motzkin feasibility and machine-checked counterexamples
- Seeded, reproducible verification suites
"""

import logging

from .boolsem import BoolMap, SemDiagram, SemIso
from .exactnum import Caps, RatMatrix
from .genfact import factor_general, flatness_constant, gen, rev_lift
from .lift import dislift, lift_chain, lift_sg, verify_lifting
from .oracle import LinSystem, fm_solve
from .poset import Poset, dismantling_order
from .pss import PssHom, PssSpace, idc_hom

__all__ = [
    "BoolMap",
    "Caps",
    "LinSystem",
    "Poset",
    "PssHom",
    "PssSpace",
    "RatMatrix",
    "SemDiagram",
    "SemIso",
    "dislift",
    "dismantling_order",
    "factor_general",
    "flatness_constant",
    "fm_solve",
    "gen",
    "idc_hom",
    "lift_chain",
    "lift_sg",
    "rev_lift",
    "verify_lifting",
]

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())
