"""Quaternion algebras (a, b / F) over number fields."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import UnsupportedError, ValidationError
from .exactalg.local import LocalCompletion, tame_symbol
from .exactalg.numberfield import NFElem, NumberField, PrimeIdeal, real_signs, split_prime
from .exactalg.primes import factorint


@dataclass(frozen=True)
class PrimeRecord:
    """A finite prime of the base field, identified by its rational prime."""

    p: int
    f: int = 1
    label: str = ""
    trusted: bool = False
    provenance: str = ""

    @property
    def name(self) -> str:
        return self.label or f"p{self.p}"

    @classmethod
    def from_json(cls, d: dict) -> "PrimeRecord":
        return cls(int(d["p"]), int(d.get("f", 1)), d.get("label", ""), bool(d.get("trusted", False)), d.get("provenance", ""))

    def to_json(self) -> dict:
        return {"p": self.p, "f": self.f, "label": self.name, "trusted": self.trusted, "provenance": self.provenance}


def resolve_prime(nf: NumberField, rec: PrimeRecord) -> PrimeIdeal:
    """The prime ideal of nf named by a record (by label, else by residue degree)."""
    sp = split_prime(nf, rec.p)
    by_label = [P for P in sp.primes if P.label == rec.name]
    if by_label:
        return by_label[0]
    matches = [P for P in sp.primes if P.f == rec.f]
    if len(matches) == 1:
        return matches[0]
    if not matches:
        raise ValidationError(f"no prime of residue degree {rec.f} above {rec.p} in {nf.name}")
    raise ValidationError(f"prime record {rec.name} is ambiguous; use one of {[P.label for P in sp.primes]}")


@dataclass(frozen=True)
class QuaternionData:
    base: NumberField
    a: NFElem
    b: NFElem
    ramified_finite: tuple[PrimeRecord, ...] = ()
    ramified_real: frozenset[int] = frozenset()  # 1-based real place indices
    name: str = ""
    provenance: str = ""
    order_basis: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.a.is_zero() or self.b.is_zero():
            raise ValidationError("Hilbert-symbol entries must be nonzero")

    def element(self, coords: Sequence) -> "QuatElem":
        if len(coords) != 4:
            raise ValidationError("quaternion elements need 4 coordinates")
        return QuatElem(self, tuple(self.base(c) if not isinstance(c, NFElem) else c for c in coords))

    def one(self) -> "QuatElem":
        z, o = self.base.zero(), self.base.one()
        return QuatElem(self, (o, z, z, z))

    def basis(self) -> tuple["QuatElem", ...]:
        z, o = self.base.zero(), self.base.one()
        return tuple(QuatElem(self, tuple(o if i == j else z for j in range(4))) for i in range(4))


@dataclass(frozen=True)
class QuatElem:
    parent: QuaternionData
    coords: tuple[NFElem, NFElem, NFElem, NFElem]

    def __add__(self, other: "QuatElem") -> "QuatElem":
        return QuatElem(self.parent, tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __sub__(self, other: "QuatElem") -> "QuatElem":
        return QuatElem(self.parent, tuple(x - y for x, y in zip(self.coords, other.coords)))

    def __neg__(self) -> "QuatElem":
        return QuatElem(self.parent, tuple(-x for x in self.coords))

    def scale(self, c) -> "QuatElem":
        return QuatElem(self.parent, tuple(x * c for x in self.coords))

    def __mul__(self, other):
        if not isinstance(other, QuatElem):
            return self.scale(other)
        a, b = self.parent.a, self.parent.b
        ab = a * b
        x0, x1, x2, x3 = self.coords
        y0, y1, y2, y3 = other.coords
        return QuatElem(
            self.parent,
            (
                x0 * y0 + a * x1 * y1 + b * x2 * y2 - ab * x3 * y3,
                x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
                x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
                x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
            ),
        )

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other) -> bool:
        return isinstance(other, QuatElem) and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def conj(self) -> "QuatElem":
        x0, x1, x2, x3 = self.coords
        return QuatElem(self.parent, (x0, -x1, -x2, -x3))

    def reduced_norm(self) -> NFElem:
        a, b = self.parent.a, self.parent.b
        x0, x1, x2, x3 = self.coords
        return x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3

    def reduced_trace(self) -> NFElem:
        return self.coords[0] * 2

    nrd = reduced_norm
    trd = reduced_trace

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coords)

    def __str__(self) -> str:
        parts = []
        for c, sym in zip(self.coords, ("", "i", "j", "k")):
            if not c.is_zero():
                parts.append(f"({c}){sym}" if sym else f"({c})")
        return " + ".join(parts) or "0"


# ---------------------------------------------------------------------------

def real_ramification(a: NFElem, b: NFElem) -> frozenset[int]:
    """Real places (1-based) where both a and b are negative."""
    nf = a.parent
    if not nf.is_totally_real():
        raise UnsupportedError("real ramification needs a totally real base field")
    sa, sb = real_signs(a), real_signs(b)
    return frozenset(i + 1 for i, (x, y) in enumerate(zip(sa, sb)) if x < 0 and y < 0)


def hilbert_symbol_odd(a: NFElem, b: NFElem, prime: PrimeRecord | PrimeIdeal) -> int:
    """Quadratic Hilbert symbol at a prime of odd residue characteristic."""
    nf = a.parent
    if prime.p == 2:
        raise UnsupportedError("even residue characteristic: use trusted input")
    P = prime if isinstance(prime, PrimeIdeal) else resolve_prime(nf, prime)
    return tame_symbol(a, b, LocalCompletion(nf, P))


@dataclass
class ValidationReport:
    parity_total: int
    parity_ok: bool
    real_claimed: tuple[int, ...]
    real_computed: tuple[int, ...]
    odd_checks: list[dict]
    trusted: list[str]
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "parity_total": self.parity_total,
            "parity_ok": self.parity_ok,
            "real_claimed": list(self.real_claimed),
            "real_computed": list(self.real_computed),
            "odd_checks": self.odd_checks,
            "trusted": self.trusted,
            "notes": self.notes,
        }


def _candidate_odd_primes(q: QuaternionData) -> list[int]:
    out: set[int] = set()
    for x in (q.a, q.b):
        n = x.norm()
        for part in (n.numerator, n.denominator):
            if abs(part) > 1:
                out.update(p for p in factorint(part) if p != 2)
        d = x.denominator()
        if d > 1:
            out.update(p for p in factorint(d) if p != 2)
    return sorted(out)


def validate_ramification(q: QuaternionData) -> ValidationReport:
    """Check the claimed ramification against parity, real signs and odd symbols.

    Finite primes above 2 cannot be checked and are accepted on trust.
    """
    total = len(q.ramified_finite) + len(q.ramified_real)
    if total % 2:
        raise ValidationError(
            f"parity violation: {len(q.ramified_finite)} finite + {len(q.ramified_real)} real = {total} ramified places"
        )
    computed = real_ramification(q.a, q.b)
    if computed != frozenset(q.ramified_real):
        raise ValidationError(
            f"real ramification mismatch: claimed {sorted(q.ramified_real)}, computed {sorted(computed)}"
        )
    checks, trusted, notes = [], [], []
    claimed_ideals: set[str] = set()
    for rec in q.ramified_finite:
        if rec.p == 2:
            if not rec.trusted:
                raise ValidationError(f"{rec.name}: dyadic ramification must be marked trusted")
            trusted.append(rec.name)
            claimed_ideals.add(resolve_prime(q.base, rec).label)
            continue
        P = resolve_prime(q.base, rec)
        claimed_ideals.add(P.label)
        sym = hilbert_symbol_odd(q.a, q.b, P)
        checks.append({"prime": P.label, "symbol": sym, "claimed_ramified": True, "agrees": sym == -1})
        if sym != -1:
            raise ValidationError(f"{rec.name}: Hilbert symbol is +1, so the algebra splits there")
    for p in _candidate_odd_primes(q):
        for P in split_prime(q.base, p).primes:
            if P.label in claimed_ideals:
                continue
            sym = hilbert_symbol_odd(q.a, q.b, P)
            checks.append({"prime": P.label, "symbol": sym, "claimed_ramified": False, "agrees": sym == 1})
            if sym != 1:
                raise ValidationError(f"{P.label}: Hilbert symbol is -1 but the prime is not listed as ramified")
    if trusted:
        notes.append("ramification at primes above 2 accepted on trust: " + ", ".join(trusted))
    return ValidationReport(total, True, tuple(sorted(q.ramified_real)), tuple(sorted(computed)), checks, trusted, notes)


@dataclass(frozen=True)
class AtkinLehnerRanks:
    r: int
    s: int
    r_plus: int
    s_bound: int
    assumption: str = "s <= (n - 1) + r read with n = [F:Q]"


def atkin_lehner_ranks(q: QuaternionData, narrow_class_number_one: bool) -> AtkinLehnerRanks:
    """Ranks of W, W^1 and W_+ as elementary abelian 2-groups.

    With narrow class number one every ramified prime has a totally positive
    generator and totally positive units are squares, so all three ranks
    equal the number of ramified finite primes.
    """
    if not narrow_class_number_one:
        raise UnsupportedError("Atkin-Lehner ranks need narrow class number one (supply the flag)")
    r = len(q.ramified_finite)
    return AtkinLehnerRanks(r=r, s=r, r_plus=r, s_bound=(q.base.degree - 1) + r)


def order_basis_integrality(q: QuaternionData) -> list[bool]:
    """For carried order data: whether each basis element has integral Nrd and Trd."""
    out = []
    for coords in q.order_basis:
        x = q.element(coords)
        out.append(x.reduced_norm().is_integral() and x.reduced_trace().is_integral())
    return out


def quaternion_from_json(data: dict, base: NumberField) -> QuaternionData:
    try:
        a = base(data["a"])
        b = base(data["b"])
    except KeyError as exc:
        raise ValidationError(f"quaternion record missing {exc}") from exc
    recs = tuple(PrimeRecord.from_json(r) for r in data.get("ramified_finite", []))
    return QuaternionData(
        base=base,
        a=a,
        b=b,
        ramified_finite=recs,
        ramified_real=frozenset(int(i) for i in data.get("ramified_real", [])),
        name=data.get("name", ""),
        provenance=data.get("provenance", ""),
        order_basis=tuple(tuple(tuple(c) for c in elem) for elem in data.get("order_basis", [])),
    )
