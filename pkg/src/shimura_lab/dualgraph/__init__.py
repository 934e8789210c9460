"""Weighted multigraphs for dual graphs of p-adically uniformized curves."""
from .automorphism import (
    GraphAutomorphism,
    GraphAutomorphismGroup,
    automorphism_group,
    edge_permutation,
    induced_automorphism,
    is_automorphism,
)
from .graph import BettiReport, Edge, Vertex, WeightedMultigraph, betti, betti_report, stabilize
from .operations import (
    AdmissibilityReport,
    GroupStructureReport,
    admissible_analysis,
    atkin_lehner_swap,
    build_double,
    elementary_abelian_subgroups,
    element_admissibility,
    group_structure,
    quotient_by,
)
from .permgroup import PermGroup, compose, inverse, perm_order

__all__ = [
    "AdmissibilityReport", "BettiReport", "Edge", "GraphAutomorphism", "GraphAutomorphismGroup",
    "GroupStructureReport", "PermGroup", "Vertex", "WeightedMultigraph", "admissible_analysis",
    "atkin_lehner_swap", "automorphism_group", "betti", "betti_report", "build_double", "compose",
    "edge_permutation", "element_admissibility", "elementary_abelian_subgroups", "group_structure",
    "induced_automorphism", "inverse", "is_automorphism", "perm_order", "quotient_by", "stabilize",
]
