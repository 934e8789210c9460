"""Exact arithmetic: rationals, polynomials, finite fields, number fields, zeta."""
from fractions import Fraction as Rat

from .cyclotomic import cosine_element, cyclotomic_membership, real_cyclotomic_field
from .finitefield import FqElem, FqPoly, GF, factor_poly_mod, factor_poly_mod_with_unit, gf
from .numberfield import (
    NFElem,
    NumberField,
    PrimeIdeal,
    PrimeSplitting,
    certify_p_maximal,
    dedekind_criterion,
    field_from_json,
    real_signs,
    split_prime,
)
from .poly import UniPoly, discriminant, resultant
from .zeta import ZetaValue, frobenius_degree_counts, zeta_at_2
from .zfactor import factor_over_q

__all__ = [
    "Rat",
    "UniPoly",
    "discriminant",
    "resultant",
    "GF",
    "gf",
    "FqElem",
    "FqPoly",
    "factor_poly_mod",
    "factor_poly_mod_with_unit",
    "factor_over_q",
    "NumberField",
    "NFElem",
    "PrimeIdeal",
    "PrimeSplitting",
    "split_prime",
    "certify_p_maximal",
    "dedekind_criterion",
    "field_from_json",
    "real_signs",
    "cyclotomic_membership",
    "cosine_element",
    "real_cyclotomic_field",
    "zeta_at_2",
    "ZetaValue",
    "frobenius_degree_counts",
]
