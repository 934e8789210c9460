"""Absolute number fields given by a monic integral defining polynomial."""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import mpmath

from ..errors import NonMonogenicError, PrecisionError, ValidationError
from .finitefield import factor_fq, gf, pdivmod, pgcd, pmul, pstrip
from .linalg import charpoly_berkowitz, hnf_rows, solve_left
from .poly import UniPoly, discriminant as poly_discriminant, format_poly, poly_gcd, poly_xgcd, resultant
from .primes import factorint, is_prime

PRECISION_LADDER = (64, 128, 256, 512)
PRECISION_ENV = "SHIMURA_LAB_PRECISION"


def precision_ladder() -> tuple[int, ...]:
    """Bit precisions to try, doubling from 64 up to the cap in SHIMURA_LAB_PRECISION (default 512)."""
    raw = os.environ.get(PRECISION_ENV)
    if not raw:
        return PRECISION_LADDER
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValidationError(f"{PRECISION_ENV} must be an integer bit count, got {raw!r}") from exc
    if cap < 64:
        raise ValidationError(f"{PRECISION_ENV} must be at least 64")
    out = [64]
    while out[-1] * 2 <= cap:
        out.append(out[-1] * 2)
    return tuple(out)


class NumberField:
    """Q(alpha) with alpha a root of a monic irreducible integral polynomial.

    ``embedding_order`` permutes the real roots (sorted ascending) so that
    v_1, ..., v_r1 can follow an external labelling convention.
    """

    def __init__(
        self,
        poly: Sequence[int] | UniPoly,
        name: str = "",
        disc: int | None = None,
        embedding_order: Sequence[int] | None = None,
        cyclotomic_conductor: int | None = None,
        provenance: str = "",
    ):
        f = poly if isinstance(poly, UniPoly) else UniPoly(poly)
        if f.degree < 1:
            raise ValidationError("defining polynomial must have positive degree")
        if f.lc != 1 or not f.is_integral():
            raise ValidationError("defining polynomial must be monic with integer coefficients")
        self.poly = f
        self.coeffs: tuple[int, ...] = tuple(f.to_ints())
        self.degree = f.degree
        self.name = name or f"Q[x]/({f})"
        self.provenance = provenance
        self.cyclotomic_conductor = cyclotomic_conductor
        self._supplied_disc = disc
        self._embedding_order = tuple(embedding_order) if embedding_order is not None else None
        n = self.degree
        # x^(n+j) reduced into the power basis, for fast multiplication
        table = []
        cur = [Fraction(-c) for c in self.coeffs[:n]]
        for _ in range(n - 1):
            table.append(cur)
            top = cur[-1]
            cur = [Fraction(0)] + cur[:-1]
            cur = [c - top * self.coeffs[i] for i, c in enumerate(cur)]
        self._reduction = table
        if self._embedding_order is not None:
            r1 = self.signature[0]
            if sorted(self._embedding_order) != list(range(r1)):
                raise ValidationError("embedding_order must permute the real places")
        if cyclotomic_conductor is not None:
            n_c = cyclotomic_conductor
            val = abs(mpmath.polyval([mpmath.mpf(c) for c in reversed(self.coeffs)], 2 * mpmath.cos(2 * mpmath.pi / n_c)))
            if val > mpmath.mpf(10) ** -10:
                raise ValidationError(f"2cos(2pi/{n_c}) is not a root of the defining polynomial")
        if disc is not None and self._disc_computable():
            if self.discriminant != disc:
                raise ValidationError(f"supplied discriminant {disc} != computed {self.discriminant}")

    # ---- elements ---------------------------------------------------
    def __call__(self, coords) -> "NFElem":
        if isinstance(coords, NFElem):
            return coords
        if isinstance(coords, UniPoly):
            return self.from_poly(coords)
        if isinstance(coords, (int, Fraction)):
            return self.scalar(coords)
        cs = [Fraction(c) for c in coords]
        if len(cs) > self.degree:
            return self.from_poly(UniPoly(cs))
        return NFElem(self, tuple(cs + [Fraction(0)] * (self.degree - len(cs))))

    def scalar(self, c) -> "NFElem":
        return NFElem(self, (Fraction(c),) + (Fraction(0),) * (self.degree - 1))

    @property
    def gen(self) -> "NFElem":
        if self.degree == 1:
            return self.scalar(-self.coeffs[0])
        return self([0, 1])

    def one(self) -> "NFElem":
        return self.scalar(1)

    def zero(self) -> "NFElem":
        return self.scalar(0)

    def from_poly(self, g: UniPoly) -> "NFElem":
        r = g % self.poly
        cs = list(r.coeffs) + [Fraction(0)] * (self.degree - len(r.coeffs))
        return NFElem(self, tuple(cs))

    def _reduce(self, prod: list[Fraction]) -> tuple[Fraction, ...]:
        n = self.degree
        out = prod[:n] + [Fraction(0)] * max(0, n - len(prod))
        for j, c in enumerate(prod[n:]):
            if c:
                row = self._reduction[j]
                for i in range(n):
                    out[i] += c * row[i]
        return tuple(out)

    def __repr__(self) -> str:
        return f"NumberField({self.name!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, NumberField) and self.coeffs == other.coeffs and self._embedding_order == other._embedding_order

    def __hash__(self) -> int:
        return hash(self.coeffs)

    # ---- invariants -------------------------------------------------
    @cached_property
    def poly_discriminant(self) -> int:
        return int(poly_discriminant(self.poly))

    def _disc_computable(self) -> bool:
        try:
            _ = self.discriminant
            return True
        except NonMonogenicError:
            return False

    @cached_property
    def discriminant(self) -> int:
        """Field discriminant from the polynomial discriminant and local indices."""
        d = self.poly_discriminant
        out = 1 if d > 0 else -1
        for p, e in factorint(d).items():
            if e >= 2:
                cert = certify_p_maximal(self, p)
                e = cert.disc_valuation
            out *= p**e
        return out

    @cached_property
    def signature(self) -> tuple[int, int]:
        roots = self._roots(128)
        tol = mpmath.mpf(2) ** -60
        r1 = sum(1 for z in roots if abs(z.imag) < tol)
        return r1, (self.degree - r1) // 2

    def is_totally_real(self) -> bool:
        return self.signature[0] == self.degree

    def _roots(self, prec: int):
        ctx = mpmath.MPContext()
        ctx.prec = prec
        cs = [ctx.mpf(c) for c in reversed(self.coeffs)]
        if self.degree == 1:
            return [ctx.mpc(-cs[1])]
        return [ctx.mpc(z) for z in ctx.polyroots(cs, maxsteps=400, extraprec=2 * prec)]

    def real_roots(self, prec: int = 64) -> list:
        """Real roots at the given precision, in v_1..v_r1 order."""
        roots = self._roots(prec)
        tol = mpmath.mpf(2) ** -(prec // 2)
        reals = sorted(z.real for z in roots if abs(z.imag) < tol)
        if self._embedding_order is not None:
            reals = [reals[i] for i in self._embedding_order]
        return reals

    @property
    def embedding_order(self):
        return self._embedding_order


@dataclass(frozen=True)
class NFElem:
    parent: NumberField
    coords: tuple[Fraction, ...]

    def _lift(self, other) -> "NFElem":
        if isinstance(other, NFElem):
            if other.parent is not self.parent and other.parent != self.parent:
                raise ValueError("elements of different fields")
            return other
        return self.parent.scalar(other)

    def __add__(self, other):
        o = self._lift(other)
        return NFElem(self.parent, tuple(a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return NFElem(self.parent, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return NFElem(self.parent, tuple(a * c for a in self.coords))
        o = self._lift(other)
        a, b = self.coords, o.coords
        n = len(a)
        prod = [Fraction(0)] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return NFElem(self.parent, self.parent._reduce(prod))

    __rmul__ = __mul__

    def inverse(self) -> "NFElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        g, s, _ = poly_xgcd(self.as_poly(), self.parent.poly)
        if g.degree != 0:
            raise ZeroDivisionError("element is not invertible")
        return self.parent.from_poly(s)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.parent.one(), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, NFElem):
            return self.coords == other.coords
        if isinstance(other, (int, Fraction)):
            return self.coords == self.parent.scalar(other).coords
        return NotImplemented

    def __hash__(self):
        return hash(self.coords)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def as_poly(self) -> UniPoly:
        return UniPoly(self.coords)

    def mult_matrix(self) -> list[list[Fraction]]:
        """Matrix of multiplication by self; column j is self * alpha^j."""
        n = self.parent.degree
        cols = []
        cur = self
        alpha = self.parent([0, 1]) if n > 1 else None
        for j in range(n):
            cols.append(list(cur.coords))
            if j < n - 1:
                cur = cur * alpha
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def norm(self) -> Fraction:
        return resultant(self.parent.poly, self.as_poly()) if not self.is_zero() else Fraction(0)

    def trace(self) -> Fraction:
        m = self.mult_matrix()
        return sum((m[i][i] for i in range(len(m))), Fraction(0))

    def charpoly(self) -> UniPoly:
        return UniPoly(charpoly_berkowitz(self.mult_matrix()))

    def minpoly(self) -> UniPoly:
        c = self.charpoly()
        while True:
            g = c.derivative()
            d = poly_gcd(c, g)
            if d.degree == 0:
                return c.monic()
            c = (c // d).monic()

    def is_integral(self) -> bool:
        return self.charpoly().is_integral()

    def denominator(self) -> int:
        return math.lcm(*(c.denominator for c in self.coords))

    def embed(self, prec: int = 64) -> list:
        roots = self.parent.real_roots(prec)
        return [_eval_at(self.coords, r) for r in roots]

    def __str__(self):
        return format_poly(self.coords, "a")

    def __repr__(self):
        return f"NFElem({self})"


def _eval_at(coords, x):
    acc = x * 0
    for c in reversed(coords):
        acc = acc * x + (mpmath.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else c)
    return acc


# ---------------------------------------------------------------------------
# real embeddings

def real_signs(elem: NFElem) -> tuple[int, ...]:
    """Signs (+1/-1) of elem under the ordered real embeddings.

    Precision doubles from 64 up to 512 bits; a sign is trusted only when the
    embedded value exceeds 2^(-prec/2) in absolute value.
    """
    nf = elem.parent
    if elem.is_zero():
        raise PrecisionError("possible zero embedding (element is zero)")
    ladder = precision_ladder()
    for prec in ladder:
        ctx = mpmath.MPContext()
        ctx.prec = prec
        roots = nf.real_roots(prec)
        thresh = ctx.mpf(2) ** (-(prec // 2))
        vals = []
        ok = True
        for r in roots:
            r = ctx.mpf(r)
            acc = ctx.mpf(0)
            for c in reversed(elem.coords):
                acc = acc * r + ctx.mpf(c.numerator) / c.denominator
            if abs(acc) <= thresh:
                ok = False
                break
            vals.append(1 if acc > 0 else -1)
        if ok:
            return tuple(vals)
    raise PrecisionError(f"possible zero embedding: value indistinguishable from 0 at {ladder[-1]} bits")


def format_signs(signs: Iterable[int]) -> str:
    return "(" + ", ".join("+" if s > 0 else "-" for s in signs) + ")"


# ---------------------------------------------------------------------------
# Dedekind criterion and prime splitting

@dataclass(frozen=True)
class DedekindResult:
    p: int
    passes: bool
    residue_factors: tuple[tuple[tuple[int, ...], int], ...]
    obstruction: tuple[int, ...]
    enlargement: tuple[int, ...]


def dedekind_criterion(coeffs: Sequence[int], p: int) -> DedekindResult:
    """Test p-maximality of Z[x]/(f) for monic integral f."""
    F = gf(p)
    f = [int(c) for c in coeffs]
    fl = pstrip([c % p for c in f])
    facs = factor_fq(F, fl)
    g, h = [1], [1]
    for t, e in facs:
        g = pmul(F, g, t)
        for _ in range(e - 1):
            h = pmul(F, h, t)
    gi = (UniPoly(g) * UniPoly(h)).to_ints()
    diff = [((gi[i] if i < len(gi) else 0) - f[i]) for i in range(max(len(gi), len(f)))]
    assert all(c % p == 0 for c in diff)
    Fbar = pstrip([(c // p) % p for c in diff])
    z = pgcd(F, pgcd(F, Fbar, g), h) if Fbar else pgcd(F, g, h)
    u = pdivmod(F, fl, z)[0] if len(z) > 1 else fl
    return DedekindResult(
        p=p,
        passes=len(z) <= 1,
        residue_factors=tuple((tuple(t), e) for t, e in facs),
        obstruction=tuple(z),
        enlargement=tuple(u),
    )


@dataclass(frozen=True)
class PMaximalCertificate:
    """A generator theta with Z_p[theta] equal to the p-maximal order."""

    p: int
    generator: NFElem
    generator_poly: tuple[int, ...]
    residue_factors: tuple[tuple[tuple[int, ...], int], ...]
    power_basis: bool
    disc_valuation: int


_CERT_CACHE: dict = {}


def certify_p_maximal(nf: NumberField, p: int, search_radius: int = 2) -> PMaximalCertificate:
    """Find a generator whose minimal polynomial passes Dedekind's criterion at p.

    First the power basis is tried; if that fails, small elements of the
    once-enlarged order Z[a] + (U(a)/p) Z[a] are searched.
    """
    key = (nf.coeffs, p)
    if key in _CERT_CACHE:
        return _CERT_CACHE[key]
    if not is_prime(p):
        raise ValidationError(f"{p} is not prime")
    res = dedekind_criterion(nf.coeffs, p)
    if res.passes:
        disc_v = _val(nf.poly_discriminant, p)
        cert = PMaximalCertificate(p, nf.gen, nf.coeffs, res.residue_factors, True, disc_v)
        _CERT_CACHE[key] = cert
        return cert
    n = nf.degree
    u_elem = nf(list(res.enlargement))
    rows = [[p if i == j else 0 for j in range(n)] for i in range(n)]
    cur = u_elem
    for _ in range(n):
        rows.append([int(c) for c in cur.coords])
        cur = cur * nf.gen
    basis_int = hnf_rows(rows)
    basis = [nf([Fraction(c, p) for c in r]) for r in basis_int]
    candidates = []
    rng = range(-search_radius, search_radius + 1)
    for coeffs in itertools.product(rng, repeat=n):
        if all(c == 0 for c in coeffs):
            continue
        candidates.append(coeffs)
    candidates.sort(key=lambda cs: (max(map(abs, cs)), sum(map(abs, cs)), cs))
    for coeffs in candidates:
        theta = nf.zero()
        for c, b in zip(coeffs, basis):
            if c:
                theta = theta + b * c
        cp = theta.charpoly()
        if not cp.is_integral():
            continue
        cpi = cp.to_ints()
        d = poly_discriminant(cp)
        if d == 0:
            continue
        r = dedekind_criterion(cpi, p)
        if r.passes:
            cert = PMaximalCertificate(p, theta, tuple(cpi), r.residue_factors, False, _val(int(d), p))
            _CERT_CACHE[key] = cert
            return cert
    raise NonMonogenicError(p, "Dedekind criterion fails for the power basis and for the enlarged order")


def _val(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n and n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PrimeIdeal:
    p: int
    e: int
    f: int
    label: str
    residue_poly: tuple[int, ...]  # irreducible factor of the certified generator's polynomial


@dataclass(frozen=True)
class PrimeSplitting:
    p: int
    factors: tuple[tuple[int, int], ...]
    monogenicity_certificate: bool
    primes: tuple[PrimeIdeal, ...] = field(default=(), compare=False)
    generator: str = ""

    def __post_init__(self):
        if any(e < 1 or f < 1 for e, f in self.factors):
            raise ValidationError("ramification indices and residue degrees must be positive")

    @property
    def degree(self) -> int:
        return sum(e * f for e, f in self.factors)

    def is_totally_ramified(self) -> bool:
        return len(self.factors) == 1 and self.factors[0][1] == 1 and self.factors[0][0] == self.degree

    def is_inert(self) -> bool:
        return len(self.factors) == 1 and self.factors[0] == (1, self.degree)

    def is_unramified(self) -> bool:
        return all(e == 1 for e, _ in self.factors)

    def describe(self) -> str:
        return " * ".join(f"P(e={e},f={f})" for e, f in self.factors)


def split_prime(nf: NumberField, p: int, allow_enlargement: bool = True) -> PrimeSplitting:
    """Decompose p in the ring of integers of nf."""
    if not is_prime(p):
        raise ValidationError(f"{p} is not prime")
    if allow_enlargement:
        cert = certify_p_maximal(nf, p)
    else:
        res = dedekind_criterion(nf.coeffs, p)
        if not res.passes:
            raise NonMonogenicError(p)
        cert = PMaximalCertificate(p, nf.gen, nf.coeffs, res.residue_factors, True, 0)
    facs = sorted(cert.residue_factors, key=lambda t: (len(t[0]) - 1, t[1], t[0][::-1]))
    ideals = []
    for i, (g, e) in enumerate(facs):
        label = f"p{p}" if len(facs) == 1 else f"p{p}_{i + 1}"
        ideals.append(PrimeIdeal(p, e, len(g) - 1, label, g))
    gen = "a" if cert.power_basis else str(cert.generator)
    return PrimeSplitting(
        p=p,
        factors=tuple((pi.e, pi.f) for pi in ideals),
        monogenicity_certificate=cert.power_basis,
        primes=tuple(ideals),
        generator=gen,
    )


def field_from_json(data: dict) -> NumberField:
    try:
        poly = [int(c) for c in data["poly"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"numberfield record needs an integer 'poly' list: {exc}") from exc
    return NumberField(
        poly,
        name=data.get("name", ""),
        disc=data.get("disc"),
        embedding_order=data.get("embedding_order"),
        cyclotomic_conductor=data.get("cyclotomic_conductor"),
        provenance=data.get("provenance", ""),
    )


def coordinates_in_generator(elem: NFElem, cert: PMaximalCertificate) -> list[Fraction]:
    """Coordinates of elem in the basis 1, theta, ..., theta^(n-1)."""
    if cert.power_basis:
        return list(elem.coords)
    nf = elem.parent
    powers = []
    cur = nf.one()
    for _ in range(nf.degree):
        powers.append(list(cur.coords))
        cur = cur * cert.generator
    sol = solve_left(powers, list(elem.coords))
    if sol is None:
        raise ValidationError("generator does not span the field")
    return sol
