"""Finite linear sites over prime fields: presheaves, sheafification, morphisms
of sites, roof decompositions and calculus-of-fractions constructions."""

from .exactalg import PrimeField
from .lincat import LinearCategory, LinearFunctor, NatTransform
from .presheaf import Presheaf, PresheafMorphism, Sieve, representable
from .rooffrac import ColimFunctorSpec, identity_spec, roof_decompose, upper_spec
from .sheafify import is_sheaf, sheafify
from .sitemorph import SiteMorphism, TwoCell, analyze, certify_equivalence
from .topology import CoverSystem, Site, check_topology, saturate

__all__ = [
    "PrimeField", "LinearCategory", "LinearFunctor", "NatTransform", "Presheaf", "PresheafMorphism", "Sieve",
    "representable", "ColimFunctorSpec", "identity_spec", "roof_decompose", "upper_spec", "is_sheaf", "sheafify",
    "SiteMorphism", "TwoCell", "analyze", "certify_equivalence", "CoverSystem", "Site", "check_topology", "saturate",
]
