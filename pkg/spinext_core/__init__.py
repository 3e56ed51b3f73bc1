from __future__ import annotations

from .quadform import QuadraticRefinement, arf, pullback, reduce_to_standard
from .surface_spin import count_formula, enumerate_spin, no_extension_witness, spin_orbit
from .symplectic import SymplecticElement, SymplecticSpace, group_order
from .torus_spin import TorusSpin, t3_signature_gate, torus_orbit
from .version import get_version

__version__ = get_version()

__all__ = [
    "QuadraticRefinement",
    "SymplecticElement",
    "SymplecticSpace",
    "TorusSpin",
    "__version__",
    "arf",
    "count_formula",
    "enumerate_spin",
    "group_order",
    "no_extension_witness",
    "pullback",
    "reduce_to_standard",
    "spin_orbit",
    "t3_signature_gate",
    "torus_orbit",
]
