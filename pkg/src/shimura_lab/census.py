"""Frobenius cycle-type census of an integer polynomial."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ValidationError
from .exactalg.finitefield import degree_pattern, gf, pderiv, pgcd
from .exactalg.poly import UniPoly
from .exactalg.primes import primes_up_to
from .exactalg.zeta import cycle_type_from_counts, frobenius_degree_counts


def pattern_label(pattern: Sequence[int]) -> str:
    """'1+2^8' style label for a sorted factor-degree pattern."""
    parts = []
    for d, m in sorted(Counter(pattern).items()):
        parts.append(f"{d}^{m}" if m > 1 else f"{d}")
    return "+".join(parts)


def frobenius_group_cycle_types(ell: int = 17) -> set[tuple[int, ...]]:
    """Cycle types of x -> a x + b on Z/ell, for every a != 0 and b."""
    out = set()
    for a in range(1, ell):
        for b in range(ell):
            seen, cycle = set(), []
            for s in range(ell):
                if s in seen:
                    continue
                n, x = 0, s
                while x not in seen:
                    seen.add(x)
                    x = (a * x + b) % ell
                    n += 1
                cycle.append(n)
            out.add(tuple(sorted(cycle)))
    return out


@dataclass
class CensusReport:
    prime_bound: int
    patterns: dict[str, int]
    by_prime: dict[int, tuple[int, ...]]
    skipped: dict[int, str]
    allowed: list[str]
    outside: dict[int, str] = field(default_factory=dict)

    @property
    def all_allowed(self) -> bool:
        return not self.outside

    def to_json(self) -> dict:
        return {
            "prime_bound": self.prime_bound,
            "patterns": dict(sorted(self.patterns.items())),
            "skipped": {str(p): why for p, why in sorted(self.skipped.items())},
            "allowed": self.allowed,
            "outside": {str(p): lab for p, lab in sorted(self.outside.items())},
            "all_allowed": self.all_allowed,
        }


def _squarefree_mod(coeffs: Sequence[int], p: int) -> bool:
    F = gf(p)
    f = [c % p for c in coeffs]
    while f and f[-1] == 0:
        f.pop()
    if len(f) != len(coeffs):
        return False
    return len(pgcd(F, f, pderiv(F, f))) == 1


def harbater_frobenius(
    coeffs: Sequence[int], prime_bound: int, allowed: Iterable[Sequence[int]] | None = None
) -> CensusReport:
    """Factorization pattern of a monic polynomial mod every good prime up to the bound."""
    coeffs = [int(c) for c in coeffs]
    if coeffs[-1] != 1:
        raise ValidationError("the census needs a monic polynomial")
    n = len(coeffs) - 1
    allowed_set = {tuple(sorted(a)) for a in allowed} if allowed is not None else None
    by_prime: dict[int, tuple[int, ...]] = {}
    skipped: dict[int, str] = {}
    fast = []
    for p in (int(x) for x in primes_up_to(prime_bound)):
        if not _squarefree_mod(coeffs, p):
            skipped[p] = "divides the discriminant (ramified, reduction not squarefree)"
            continue
        if p <= n:
            by_prime[p] = tuple(degree_pattern(UniPoly(coeffs), p))
        else:
            fast.append(p)
    if fast:
        counts = frobenius_degree_counts(coeffs, fast)
        for p, row in zip(fast, counts):
            by_prime[p] = cycle_type_from_counts(row)
    patterns = Counter(pattern_label(t) for t in by_prime.values())
    outside = {}
    if allowed_set is not None:
        outside = {p: pattern_label(t) for p, t in by_prime.items() if t not in allowed_set}
    return CensusReport(
        prime_bound,
        dict(patterns),
        by_prime,
        skipped,
        sorted(pattern_label(a) for a in allowed_set) if allowed_set else [],
        outside,
    )
