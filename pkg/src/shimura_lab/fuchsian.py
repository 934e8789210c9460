"""Signatures of maximal arithmetic Fuchsian groups.

Covolumes come from Borel's formula, elliptic counts from optimal embedding
numbers of CM orders (class numbers supplied as data), and the genus from
the Riemann-Hurwitz style identity vol/2pi = 2g - 2 + sum(1 - 1/e).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import UnsupportedError, ValidationError
from .exactalg.cyclotomic import RATIONAL_COSINE_ORDERS, cosine_element, cyclotomic_membership
from .exactalg.numberfield import NumberField, PrimeIdeal
from .exactalg.primes import factorint, multiplicative_order
from .exactalg.zeta import ZetaValue, zeta_at_2
from .quatarith import PrimeRecord, resolve_prime

SPLITTING_VALUES = ("split", "inert", "ramified")
LOCAL_EMBEDDING = {"split": 0, "inert": 2, "ramified": 1}


@dataclass(frozen=True)
class CMOrderRecord:
    """Externally sourced data for one CM order contributing to e_q."""

    label: str
    q: int
    h: int
    splitting_at: Mapping[str, str]
    torsion_unit_order: int = 2
    conductor_note: str = "maximal order"
    provenance: str = ""
    index_H: int | None = None
    galois_degree: int | None = None
    generators: tuple = ()

    def __post_init__(self):
        if self.h < 1:
            raise ValidationError(f"{self.label}: class number must be >= 1")
        if self.q < 2:
            raise ValidationError(f"{self.label}: elliptic order must be >= 2")
        for k, v in self.splitting_at.items():
            if v not in SPLITTING_VALUES:
                raise ValidationError(f"{self.label}: splitting at {k} must be one of {SPLITTING_VALUES}, got {v!r}")
        if self.q == 2 and len(self.generators) > 1:
            raise UnsupportedError(
                f"{self.label}: several norm generators for the order-2 branch; only the single-generator case is supported"
            )

    @classmethod
    def from_json(cls, d: dict) -> "CMOrderRecord":
        try:
            return cls(
                label=d["label"],
                q=int(d["q"]),
                h=int(d["h"]),
                splitting_at=dict(d.get("splitting_at", {})),
                torsion_unit_order=int(d.get("torsion_unit_order", 2)),
                conductor_note=d.get("conductor_note", "maximal order"),
                provenance=d.get("provenance", ""),
                index_H=d.get("index_H"),
                galois_degree=d.get("galois_degree"),
                generators=tuple(tuple(g) for g in d.get("generators", [])),
            )
        except KeyError as exc:
            raise ValidationError(f"CM order record missing field {exc}") from exc

    def to_json(self) -> dict:
        out = {
            "label": self.label,
            "q": self.q,
            "h": self.h,
            "splitting_at": dict(self.splitting_at),
            "torsion_unit_order": self.torsion_unit_order,
            "conductor_note": self.conductor_note,
            "provenance": self.provenance,
        }
        if self.index_H is not None:
            out["index_H"] = self.index_H
        if self.galois_degree is not None:
            out["galois_degree"] = self.galois_degree
        if self.generators:
            out["generators"] = [list(g) for g in self.generators]
        return out


# ---------------------------------------------------------------------------
# signatures

@dataclass(frozen=True)
class Signature:
    genus: int
    elliptic: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.genus < 0:
            raise ValidationError("genus must be non-negative")
        merged: dict[int, int] = {}
        for e, m in self.elliptic:
            if e < 2 or m < 0:
                raise ValidationError(f"bad elliptic entry {e}^{m}")
            if m:
                merged[e] = merged.get(e, 0) + m
        object.__setattr__(self, "elliptic", tuple(sorted(merged.items())))

    def orders(self) -> list[int]:
        return [e for e, m in self.elliptic for _ in range(m)]

    def vol_over_2pi(self) -> Fraction:
        return 2 * self.genus - 2 + sum((m * (1 - Fraction(1, e)) for e, m in self.elliptic), Fraction(0))

    def __str__(self) -> str:
        parts = ", ".join(f"{e}^{m}" for e, m in self.elliptic)
        return f"({self.genus}; {parts})" if parts else f"({self.genus})"

    @classmethod
    def parse(cls, text: str) -> "Signature":
        m = re.fullmatch(r"\s*\(\s*(\d+)\s*(?:;(.*))?\)\s*", text)
        if not m:
            raise ValidationError(f"cannot parse signature {text!r}")
        ell = []
        if m.group(2) and m.group(2).strip():
            for tok in m.group(2).split(","):
                tok = tok.strip()
                if "^" in tok:
                    e, mult = tok.split("^")
                    ell.append((int(e), int(mult)))
                else:
                    ell.append((int(tok), 1))
        return cls(int(m.group(1)), tuple(ell))

    def to_json(self) -> dict:
        return {"genus": self.genus, "elliptic": [[e, m] for e, m in self.elliptic]}

    @classmethod
    def from_json(cls, d: dict) -> "Signature":
        return cls(int(d["genus"]), tuple((int(e), int(m)) for e, m in d.get("elliptic", [])))


def _elliptic_items(elliptic) -> list[tuple[int, int]]:
    if isinstance(elliptic, Mapping):
        return [(int(e), int(m)) for e, m in elliptic.items()]
    items = list(elliptic)
    if items and isinstance(items[0], int):
        out: dict[int, int] = {}
        for e in items:
            out[e] = out.get(e, 0) + 1
        return list(out.items())
    return [(int(e), int(m)) for e, m in items]


def solve_genus(vol_over_2pi: Fraction, elliptic) -> int:
    """Genus from an exact covolume and the elliptic multiset.

    ``elliptic`` may be a mapping order -> multiplicity, a list of pairs, or
    a flat list of orders.
    """
    if not isinstance(vol_over_2pi, (int, Fraction)):
        raise ValidationError("solve_genus needs an exact rational covolume")
    items = _elliptic_items(elliptic)
    rest = sum((m * (1 - Fraction(1, e)) for e, m in items), Fraction(0))
    twice_g = Fraction(vol_over_2pi) - rest + 2
    if twice_g.denominator != 1 or twice_g.numerator % 2 or twice_g < 0:
        raise ValidationError(f"inconsistent signature data: 2g = {twice_g}")
    return twice_g.numerator // 2


# ---------------------------------------------------------------------------
# embedding numbers and elliptic counts

def default_index_H(record: CMOrderRecord, S_f: Sequence[PrimeRecord], narrow_class_number_one: bool = True) -> int:
    """[H : H ∩ N(E^x) O_F^{x+}] from the single-prime rule (inert 2, ramified 1)."""
    if record.index_H is not None:
        return int(record.index_H)
    if not narrow_class_number_one or len(S_f) != 1:
        raise UnsupportedError(f"{record.label}: unsupported configuration, supply index_H")
    kind = _splitting_of(record, S_f[0])
    if kind == "inert":
        return 2
    if kind == "ramified":
        return 1
    raise UnsupportedError(f"{record.label}: prime {S_f[0].name} splits, no index rule; supply index_H")


def _splitting_of(record: CMOrderRecord, prime: PrimeRecord) -> str:
    for key in (prime.name, f"p{prime.p}", str(prime.p)):
        if key in record.splitting_at:
            return record.splitting_at[key]
    raise ValidationError(f"{record.label}: no splitting datum for {prime.name}")


def local_embedding_product(record: CMOrderRecord, S_f: Sequence[PrimeRecord]) -> int:
    out = 1
    for prime in S_f:
        out *= LOCAL_EMBEDDING[_splitting_of(record, prime)]
    return out


def embedding_count(record: CMOrderRecord, S_f: Sequence[PrimeRecord], index_H: int | None = None) -> int:
    """m(O_E, O; G) = 2 h * prod(local numbers) / index_H for narrow class number one."""
    local = local_embedding_product(record, S_f)
    if local == 0:
        return 0
    idx = index_H if index_H is not None else default_index_H(record, S_f)
    if idx not in (1, 2):
        raise ValidationError(f"index_H must be 1 or 2, got {idx}")
    m = Fraction(2 * record.h * local, idx)
    if m.denominator != 1:
        raise ValidationError(f"{record.label}: non-integral embedding count {m}")
    return int(m)


def elliptic_count(q: int, records: Iterable[CMOrderRecord], S_f: Sequence[PrimeRecord], index_H: int | None = None) -> int:
    """e_q = (1/2) * sum of embedding counts over the orders attached to q."""
    total = sum(embedding_count(r, S_f, index_H) for r in records if r.q == q)
    if total % 2:
        raise ValidationError(f"odd total embedding count {total} for q={q}")
    return total // 2


# ---------------------------------------------------------------------------
# scan over candidate elliptic orders

@dataclass(frozen=True)
class OrderConditions:
    q: int
    cosine_in_field: bool
    no_split_prime: bool | None
    norm_supported: bool | None
    splitting: Mapping[str, str] = field(default_factory=dict)

    @property
    def survives(self) -> bool:
        return bool(self.cosine_in_field and self.no_split_prime and self.norm_supported)


def _cosine_in_field(nf: NumberField, q: int) -> bool:
    if nf.degree == 1:
        return (q // 2 if q % 4 == 2 else q) in RATIONAL_COSINE_ORDERS
    n = nf.cyclotomic_conductor
    if n is None:
        raise UnsupportedError(f"{nf.name}: scan needs Q or a real 2-power cyclotomic field")
    return cyclotomic_membership(q, n)


def _splitting_in_cyclotomic(nf: NumberField, P: PrimeIdeal, q: int) -> str:
    """How P splits in E = F(zeta_q), for q with 2cos(2pi/q) in F."""
    p = P.p
    qq = q // 2 if q % 4 == 2 else q
    if qq in (3, 4):
        # E = F(sqrt(-3)) or F(sqrt(-1))
        ell = 3 if qq == 3 else 4
        disc_prime = 3 if ell == 3 else 2
        if p != disc_prime:
            return "split" if (p**P.f) % ell == 1 else "inert"
        if P.e == 1:
            return "ramified"
        n = nf.cyclotomic_conductor
        if ell == 4 and n is not None:
            # E sits inside Q(zeta_n) and 2 is totally ramified there
            return "ramified"
        raise UnsupportedError(f"q={q}: splitting of {P.label} needs a data table")
    n = nf.cyclotomic_conductor
    if n is None or n % qq:
        raise UnsupportedError(f"q={q}: no splitting rule for this field, supply a splitting table")
    # E = Q(zeta_n) over Q(zeta_n)^+
    if p == 2:
        return "ramified"
    order_full = multiplicative_order(p % n, n)
    # order of p in (Z/n)^x / {±1}
    order_plus = order_full
    for d in range(1, order_full + 1):
        if order_full % d == 0 and pow(p, d, n) in (1, n - 1):
            order_plus = d
            break
    return "split" if order_full == order_plus else "inert"


def elliptic_order_conditions(
    nf: NumberField,
    S_f: Sequence[PrimeRecord],
    q: int,
    splitting_table: Mapping[int, Mapping[str, str]] | None = None,
) -> OrderConditions:
    """Evaluate the three necessary conditions for an elliptic element of order q."""
    ok_i = _cosine_in_field(nf, q)
    if not ok_i:
        return OrderConditions(q, False, None, None)
    splitting: dict[str, str] = {}
    for rec in S_f:
        table = (splitting_table or {}).get(q, {})
        if rec.name in table:
            splitting[rec.name] = table[rec.name]
            continue
        P = resolve_prime(nf, rec)
        try:
            splitting[rec.name] = _splitting_in_cyclotomic(nf, P, q)
        except UnsupportedError as exc:
            raise UnsupportedError(f"missing splitting data for q={q}: {exc}") from exc
    ok_ii = all(v != "split" for v in splitting.values())
    # condition (iii): valuations of N(2 + 2cos(2pi/q)) away from S_f are even
    c = cosine_element(nf, q)
    norm = (c + 2).norm()
    if norm == 0:
        ok_iii = False
    else:
        s_primes = {rec.p for rec in S_f}
        ok_iii = True
        for part in (norm.numerator, norm.denominator):
            if abs(part) > 1:
                for ell, v in factorint(part).items():
                    if ell not in s_primes and v % 2:
                        ok_iii = False
    return OrderConditions(q, True, ok_ii, ok_iii, splitting)


def elliptic_orders_scan(
    nf: NumberField,
    S_f: Sequence[PrimeRecord],
    q_max: int = 64,
    splitting_table: Mapping[int, Mapping[str, str]] | None = None,
    condition_one_only: bool = False,
) -> list[int]:
    """Orders q in [3, q_max] passing all three conditions (or only the first)."""
    out = []
    for q in range(3, q_max + 1):
        if condition_one_only:
            if _cosine_in_field(nf, q):
                out.append(q)
            continue
        if elliptic_order_conditions(nf, S_f, q, splitting_table).survives:
            out.append(q)
    return out


# ---------------------------------------------------------------------------
# Borel covolume

@dataclass(frozen=True)
class VolumeResult:
    vol_over_2pi: float | Fraction
    error_bound: float
    components: Mapping[str, float | int]
    index_H: int
    exact: bool = False

    def as_rational(self, denominator: int) -> Fraction:
        """The unique multiple of 1/denominator within the error bound, if any."""
        if self.exact:
            return Fraction(self.vol_over_2pi)
        v = float(self.vol_over_2pi)
        cand = Fraction(round(v * denominator), denominator)
        if abs(float(cand) - v) > self.error_bound + 1e-12 * abs(v):
            raise ValidationError(f"volume {v} is not within {self.error_bound:.3g} of a multiple of 1/{denominator}")
        if self.error_bound * denominator >= 0.5:
            raise ValidationError("error bound too large to pin down the rational volume")
        return cand

    def to_json(self) -> dict:
        return {
            "vol_over_2pi": str(self.vol_over_2pi) if self.exact else float(self.vol_over_2pi),
            "error_bound": self.error_bound,
            "index_H": self.index_H,
            "components": dict(self.components),
        }


def default_borel_index(S_f: Sequence[PrimeRecord]) -> int:
    """[H : F^{x2}] used by default: 2^|S_f| (the value that closes the fixture identity)."""
    return 2 ** len(S_f)


def borel_volume(
    nf: NumberField,
    S_f: Sequence[PrimeRecord],
    index_H: int | None = None,
    zeta2: ZetaValue | tuple[float, float] | None = None,
    prime_bound: int = 10**6,
) -> VolumeResult:
    """Covolume of Gamma_O divided by 2pi, from Borel's formula.

    vol/2pi = 4 D^{3/2} zeta_F(2) prod(Nq - 1) / ((4 pi^2)^n [H : F^{x2}]).
    """
    n = nf.degree
    if zeta2 is None:
        zeta2 = zeta_at_2(nf, prime_bound)
    zval, zerr = tuple(zeta2)
    idx = index_H if index_H is not None else default_borel_index(S_f)
    if idx < 1:
        raise ValidationError("index_H must be positive")
    disc = abs(nf.discriminant)
    norm_prod = 1
    for rec in S_f:
        norm_prod *= rec.p**rec.f - 1
    disc_factor = float(disc) ** 1.5
    pi_factor = (4 * math.pi**2) ** n
    value = 4 * disc_factor * zval * norm_prod / (pi_factor * idx)
    err = value * (zerr / zval) + value * 1e-14
    comps = {
        "D_F": disc,
        "D_F^(3/2)": disc_factor,
        "zeta_F(2)": zval,
        "zeta_error": zerr,
        "(4pi^2)^n": pi_factor,
        "[H:F^x2]": idx,
        "prod(Nq-1)": norm_prod,
        "vol": 2 * math.pi * value,
    }
    return VolumeResult(value, err, comps, idx, exact=False)


# ---------------------------------------------------------------------------
# signature assembly

@dataclass
class SignatureReport:
    signature: Signature
    volume: VolumeResult
    exact_volume: Fraction
    elliptic_counts: dict[int, int]
    scan: list[int]
    assumptions: list[str]

    def to_json(self) -> dict:
        return {
            "signature": str(self.signature),
            "signature_data": self.signature.to_json(),
            "vol_over_2pi_exact": str(self.exact_volume),
            "volume": self.volume.to_json(),
            "elliptic_counts": {str(k): v for k, v in self.elliptic_counts.items()},
            "scan": self.scan,
            "assumptions": self.assumptions,
        }


def signature_of_maximal_group(
    nf: NumberField,
    S_f: Sequence[PrimeRecord],
    records: Sequence[CMOrderRecord],
    index_H: int | None = None,
    prime_bound: int = 10**6,
    zeta2: ZetaValue | None = None,
) -> SignatureReport:
    """Signature of Gamma_O from Borel's covolume and the CM-order records."""
    counts: dict[int, int] = {}
    for q in sorted({r.q for r in records}):
        e = elliptic_count(q, records, S_f)
        if e:
            counts[q] = e
    vol = borel_volume(nf, S_f, index_H, zeta2, prime_bound)
    den = math.lcm(*counts.keys()) if counts else 1
    exact = vol.as_rational(den)
    g = solve_genus(exact, counts)
    sig = Signature(g, tuple(counts.items()))
    if sig.vol_over_2pi() != exact:
        raise AssertionError("signature does not reproduce the covolume")
    scan = []
    try:
        scan = elliptic_orders_scan(nf, S_f)
    except UnsupportedError:
        pass
    assumptions = [f"[H:F^x2] = {vol.index_H}"]
    assumptions += [f"class number of {r.label} = {r.h} ({r.provenance or 'no provenance'})" for r in records]
    assumptions += [f"{rec.name} ramification trusted ({rec.provenance})" for rec in S_f if rec.trusted]
    return SignatureReport(sig, vol, exact, counts, scan, assumptions)


# ---------------------------------------------------------------------------
# Weierstrass points

@dataclass(frozen=True)
class WeierstrassReport:
    genus: int
    min_count: int
    max_count: int
    weight_budget: int
    hyperelliptic_iff: str

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "min_count": self.min_count,
            "max_count": self.max_count,
            "weight_budget": self.weight_budget,
            "hyperelliptic_iff": self.hyperelliptic_iff,
        }


def weierstrass_report(g: int) -> WeierstrassReport:
    if g < 2:
        raise ValidationError("Weierstrass counts need genus >= 2")
    return WeierstrassReport(g, 2 * g + 2, g**3 - g, g * (g * g - 1), f"#W == {2 * g + 2}")


@dataclass
class HyperellipticCertificate:
    verdict: str | None
    weierstrass_count: int | None
    reasoning: list[str]

    def __str__(self) -> str:
        if self.verdict is None:
            return "no verdict"
        if self.weierstrass_count is None:
            return self.verdict
        return f"{self.verdict}, #W = {self.weierstrass_count}"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "weierstrass_count": self.weierstrass_count, "reasoning": self.reasoning}


def hyperelliptic_certificate(g: int, cm_count: int, galois_degree: int) -> HyperellipticCertificate:
    """Counting argument: order-2 fixed points are Weierstrass points, and their
    Galois orbit forces the total count."""
    rep = weierstrass_report(g)
    lines = [f"genus {g}: {rep.min_count} <= #W <= {rep.max_count}, hyperelliptic iff {rep.hyperelliptic_iff}"]
    if g == 2:
        lines.append("every genus-2 curve is hyperelliptic with 6 Weierstrass points")
        return HyperellipticCertificate("hyperelliptic", 6, lines)
    if cm_count < 1:
        lines.append("no elliptic points of order 2, so no CM Weierstrass points to start from")
        return HyperellipticCertificate(None, None, lines)
    lines.append(f"each of the {cm_count} fixed points of an order-2 elliptic element is a Weierstrass point")
    if galois_degree < cm_count or galois_degree % cm_count:
        lines.append(f"orbit size {galois_degree} is not a multiple of {cm_count}: inconsistent inputs")
        return HyperellipticCertificate(None, None, lines)
    forced = galois_degree
    lines.append(f"the Galois action on W factors through a group of order {galois_degree}, forcing #W = {forced}")
    if not rep.min_count <= forced <= rep.max_count:
        lines.append(f"forced count {forced} lies outside [{rep.min_count}, {rep.max_count}]: inconsistent inputs")
        return HyperellipticCertificate(None, None, lines)
    if forced == rep.min_count:
        lines.append(f"#W = {forced} = 2g + 2, the hyperelliptic value")
        return HyperellipticCertificate("hyperelliptic", forced, lines)
    lines.append(f"#W = {forced} > 2g + 2, so the curve is not hyperelliptic")
    return HyperellipticCertificate("not hyperelliptic", forced, lines)
