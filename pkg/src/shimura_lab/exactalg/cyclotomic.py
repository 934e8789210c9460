"""Real cyclotomic fields Q(zeta_n)^+ for n a power of two."""
from __future__ import annotations

from ..errors import ValidationError
from .numberfield import NFElem, NumberField
from .poly import chebyshev_cosine

RATIONAL_COSINE_ORDERS = frozenset({1, 2, 3, 4, 6})


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def cyclotomic_membership(q: int, n: int) -> bool:
    """Whether 2cos(2pi/q) lies in Q(zeta_n)^+ for a 2-power n >= 8.

    Abelian conductor rule: after replacing q = 2 (mod 4) by q/2, the cosine
    is rational for q in {1, 2, 3, 4, 6}; otherwise Q(zeta_q)^+ sits inside
    Q(zeta_n)^+ exactly when q divides n.
    """
    if not _is_power_of_two(n) or n < 8:
        raise ValidationError(f"n={n} must be a power of two >= 8")
    if q < 3:
        raise ValidationError(f"q={q} must be at least 3")
    if q % 4 == 2:
        q //= 2
    return q in RATIONAL_COSINE_ORDERS or n % q == 0


def real_cyclotomic_field(n: int) -> NumberField:
    """Q(zeta_n)^+ with generator 2cos(2pi/n), n a power of two >= 8."""
    if not _is_power_of_two(n) or n < 8:
        raise ValidationError(f"n={n} must be a power of two >= 8")
    # minimal polynomial of zeta + zeta^-1: Psi_{2k}(x) = C_k(x) for k = n/4
    poly = chebyshev_cosine(n // 4)
    return NumberField(poly, name=f"Q(zeta_{n})^+", cyclotomic_conductor=n)


def cosine_element(nf: NumberField, q: int) -> NFElem:
    """2cos(2pi/q) as an element of nf.

    Only the rational cosines and the divisors of the field's cyclotomic
    conductor are representable; anything else raises.
    """
    qq = q // 2 if q % 4 == 2 else q
    rational = {1: 2, 2: -2, 3: -1, 4: 0, 6: 1}
    if q in rational:
        return nf.scalar(rational[q])
    n = nf.cyclotomic_conductor
    if n is None or n % q:
        if qq in RATIONAL_COSINE_ORDERS:
            return nf.scalar(rational[q])
        raise ValidationError(f"2cos(2pi/{q}) is not available in {nf.name}")
    return nf.from_poly(chebyshev_cosine(n // q))
