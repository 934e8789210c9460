"""Brandt-module linear algebra: constituents, eigensystems, congruences."""
from .analysis import (
    CongruenceGraph,
    CongruenceVerdict,
    Constituent,
    EigensystemModL,
    EigensystemReport,
    IndexCertificate,
    congruence_detect,
    connectivity,
    constituent_dimensions,
    integer_kernel,
    mod_ell_eigensystems,
    order_index_divisor,
    split_constituents,
)
from .brandt import BrandtDataset
from .overq import SUPPORTED_PRIMES, brandt_over_Q

__all__ = [
    "BrandtDataset", "CongruenceGraph", "CongruenceVerdict", "Constituent", "EigensystemModL",
    "EigensystemReport", "IndexCertificate", "SUPPORTED_PRIMES", "brandt_over_Q", "congruence_detect",
    "connectivity", "constituent_dimensions", "integer_kernel", "mod_ell_eigensystems",
    "order_index_divisor", "split_constituents",
]
