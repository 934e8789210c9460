"""Finite fields F_{p^k} and polynomial factorization over them.

Field elements are plain ints in [0, q): for k > 1 the base-p digits of the
int are the coordinates with respect to a fixed primitive modulus. Every
routine that needs a field takes a :class:`GF` instance explicitly.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from ..errors import ValidationError
from .poly import UniPoly, format_poly
from .primes import factorint, is_prime


# ---------------------------------------------------------------------------
# polynomial helpers over the prime field, used to pick moduli

def _fp_mulmod(a: list[int], b: list[int], mod: Sequence[int], p: int) -> list[int]:
    k = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    for d in range(len(prod) - 1, k - 1, -1):
        c = prod[d] % p
        if c:
            for j in range(k + 1):
                prod[d - k + j] -= c * mod[j]
    out = [c % p for c in prod[:k]]
    while out and out[-1] == 0:
        out.pop()
    return out


def _fp_powmod_x(e: int, mod: Sequence[int], p: int) -> list[int]:
    result, base = [1], [0, 1]
    if len(mod) == 2:
        base = [(-mod[0]) % p]
    while e:
        if e & 1:
            result = _fp_mulmod(result, base, mod, p)
        base = _fp_mulmod(base, base, mod, p)
        e >>= 1
    return result


def _is_primitive(mod: Sequence[int], p: int) -> bool:
    k = len(mod) - 1
    if mod[0] % p == 0:
        return False
    order = p**k - 1
    if _fp_powmod_x(order, mod, p) != [1]:
        return False
    return all(_fp_powmod_x(order // r, mod, p) != [1] for r in factorint(order))


@lru_cache(maxsize=None)
def primitive_modulus(p: int, k: int) -> tuple[int, ...]:
    """First monic primitive polynomial of degree k in a fixed enumeration.

    Candidates are ordered by the integer whose base-p digits are the
    non-leading coefficients, lowest degree first. A primitive polynomial is
    irreducible, so x generates the multiplicative group of the quotient.
    """
    if k == 1:
        g = primitive_root(p)
        return ((-g) % p, 1)
    for idx in range(p**k):
        low = [(idx // p**i) % p for i in range(k)]
        mod = tuple(low) + (1,)
        if _is_primitive(mod, p):
            return mod
    raise AssertionError("no primitive polynomial found")


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    rs = list(factorint(p - 1))
    for g in range(2, p):
        if all(pow(g, (p - 1) // r, p) != 1 for r in rs):
            return g
    raise AssertionError("unreachable")


class GF:
    """The finite field with p^k elements."""

    def __init__(self, p: int, k: int = 1):
        p, k = int(p), int(k)
        if not is_prime(p):
            raise ValidationError(f"characteristic {p} is not prime")
        if k < 1:
            raise ValidationError("extension degree must be positive")
        self.p, self.k, self.q = p, k, p**k
        self.modulus = primitive_modulus(p, k) if k > 1 else (0, 1)
        self._exp: list[int] = []
        self._log: list[int] = []
        if k > 1:
            self._build_tables()

    def _build_tables(self) -> None:
        p, k, q = self.p, self.k, self.q
        mod = self.modulus
        exp = [0] * (q - 1)
        log = [0] * q
        digits = [1] + [0] * (k - 1)
        for e in range(q - 1):
            v = 0
            for i in reversed(range(k)):
                v = v * p + digits[i]
            exp[e] = v
            log[v] = e
            # multiply by the generator x
            top = digits[-1]
            digits = [0] + digits[:-1]
            if top:
                for i in range(k):
                    digits[i] = (digits[i] - top * mod[i]) % p
        self._exp, self._log = exp, log

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.k})" if self.k > 1 else f"GF({self.p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self) -> int:
        return hash((self.p, self.k))

    # -- element arithmetic on ints ------------------------------------
    def coords(self, a: int) -> tuple[int, ...]:
        return tuple((a // self.p**i) % self.p for i in range(self.k))

    def from_coords(self, cs: Sequence[int]) -> int:
        v = 0
        for c in reversed(list(cs)[: self.k]):
            v = v * self.p + (c % self.p)
        return v

    def from_int(self, n: int) -> int:
        return n % self.p

    def from_rational(self, r) -> int:
        r = Fraction(r)
        if r.denominator % self.p == 0:
            raise ZeroDivisionError(f"denominator of {r} vanishes mod {self.p}")
        return (r.numerator * pow(r.denominator, -1, self.p)) % self.p

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        p, out, scale = self.p, 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * scale
            a //= p
            b //= p
            scale *= p
        return out

    def neg(self, a: int) -> int:
        if self.k == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        p, out, scale = self.p, 0, 1
        while a:
            out += ((-(a % p)) % p) * scale
            a //= p
            scale *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in finite field")
        if self.k == 1:
            return pow(a, -1, self.p)
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if self.k == 1:
            return pow(a, e, self.p) if e >= 0 else pow(pow(a, -1, self.p), -e, self.p)
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 0
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def frobenius(self, a: int, times: int = 1) -> int:
        return self.pow(a, self.p ** (times % self.k))

    def generator(self) -> int:
        return primitive_root(self.p) if self.k == 1 else self.p

    def log(self, a: int) -> int:
        if self.k == 1:
            g, x, e = primitive_root(self.p), 1, 0
            while x != a:
                x, e = (x * g) % self.p, e + 1
            return e
        return self._log[a]

    def elements(self) -> range:
        return range(self.q)

    def __call__(self, value) -> "FqElem":
        if isinstance(value, (tuple, list)):
            return FqElem(self, self.from_coords(value))
        return FqElem(self, self.from_rational(value))

    def element(self, v: int) -> "FqElem":
        return FqElem(self, v)

    def format(self, a: int) -> str:
        if self.k == 1:
            return str(a)
        return format_poly(self.coords(a), "z")


@lru_cache(maxsize=None)
def _gf_cached(p: int, k: int) -> GF:
    return GF(p, k)


def gf(p: int, k: int = 1) -> GF:
    """Cached field constructor; fields are immutable after construction."""
    return _gf_cached(int(p), int(k))


@dataclass(frozen=True)
class FqElem:
    field: GF
    value: int

    def _other(self, o) -> int:
        if isinstance(o, FqElem):
            if o.field != self.field:
                raise ValueError("elements of different fields")
            return o.value
        return self.field.from_rational(o)

    def __add__(self, o):
        return FqElem(self.field, self.field.add(self.value, self._other(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return FqElem(self.field, self.field.sub(self.value, self._other(o)))

    def __rsub__(self, o):
        return FqElem(self.field, self.field.sub(self._other(o), self.value))

    def __mul__(self, o):
        return FqElem(self.field, self.field.mul(self.value, self._other(o)))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return FqElem(self.field, self.field.div(self.value, self._other(o)))

    def __rtruediv__(self, o):
        return FqElem(self.field, self.field.div(self._other(o), self.value))

    def __neg__(self):
        return FqElem(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return FqElem(self.field, self.field.pow(self.value, e))

    def __eq__(self, o):
        if isinstance(o, FqElem):
            return self.field == o.field and self.value == o.value
        if isinstance(o, (int, Fraction)):
            try:
                return self.value == self.field.from_rational(o)
            except ZeroDivisionError:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.value))

    def __bool__(self):
        return self.value != 0

    @property
    def coords(self) -> tuple[int, ...]:
        return self.field.coords(self.value)

    def frobenius(self, times: int = 1) -> "FqElem":
        return FqElem(self.field, self.field.frobenius(self.value, times))

    def __str__(self):
        return self.field.format(self.value)

    def __repr__(self):
        return f"FqElem({self.field!r}, {self})"


# ---------------------------------------------------------------------------
# dense polynomials over GF, coefficient lists of ints, low to high

def pstrip(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def padd(F: GF, a: Sequence[int], b: Sequence[int]) -> list[int]:
    n = max(len(a), len(b))
    return pstrip([F.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)])


def psub(F: GF, a: Sequence[int], b: Sequence[int]) -> list[int]:
    n = max(len(a), len(b))
    return pstrip([F.sub(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)])


def pscale(F: GF, a: Sequence[int], c: int) -> list[int]:
    return pstrip([F.mul(x, c) for x in a])


def pmul(F: GF, a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    if F.k == 1:
        p = F.p
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return pstrip([c % p for c in out])
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return pstrip(out)


def pdivmod(F: GF, a: Sequence[int], b: Sequence[int]) -> tuple[list[int], list[int]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    db = len(b) - 1
    if len(rem) - 1 < db:
        return [], pstrip(rem)
    inv = F.inv(b[-1])
    quo = [0] * (len(rem) - db)
    for d in range(len(rem) - 1, db - 1, -1):
        c = rem[d]
        if c == 0:
            continue
        c = F.mul(c, inv)
        quo[d - db] = c
        for j in range(db + 1):
            if b[j]:
                rem[d - db + j] = F.sub(rem[d - db + j], F.mul(c, b[j]))
    return pstrip(quo), pstrip(rem[:db])


def pmod(F: GF, a: Sequence[int], b: Sequence[int]) -> list[int]:
    if F.k == 1:
        p = F.p
        rem = list(a)
        db = len(b) - 1
        if len(rem) - 1 < db:
            return pstrip(rem)
        inv = pow(b[-1], -1, p)
        for d in range(len(rem) - 1, db - 1, -1):
            c = rem[d] % p
            if c == 0:
                continue
            c = (c * inv) % p
            for j in range(db + 1):
                rem[d - db + j] -= c * b[j]
        return pstrip([x % p for x in rem[:db]])
    return pdivmod(F, a, b)[1]


def pmonic(F: GF, a: Sequence[int]) -> list[int]:
    if not a:
        return []
    return pscale(F, a, F.inv(a[-1]))


def pgcd(F: GF, a: Sequence[int], b: Sequence[int]) -> list[int]:
    a, b = pstrip(list(a)), pstrip(list(b))
    while b:
        a, b = b, pmod(F, a, b)
    return pmonic(F, a)


def pxgcd(F: GF, a: Sequence[int], b: Sequence[int]):
    """(g, s, t) with s*a + t*b = g monic."""
    r0, r1 = pstrip(list(a)), pstrip(list(b))
    s0, s1, t0, t1 = [1], [], [], [1]
    while r1:
        q, r = pdivmod(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, psub(F, s0, pmul(F, q, s1))
        t0, t1 = t1, psub(F, t0, pmul(F, q, t1))
    if not r0:
        return [], s0, t0
    inv = F.inv(r0[-1])
    return pscale(F, r0, inv), pscale(F, s0, inv), pscale(F, t0, inv)


def pderiv(F: GF, a: Sequence[int]) -> list[int]:
    return pstrip([F.mul(F.from_int(i), c) for i, c in enumerate(a)][1:])


def ppowmod(F: GF, base: Sequence[int], e: int, mod: Sequence[int]) -> list[int]:
    result = [1]
    base = pmod(F, base, mod)
    while e:
        if e & 1:
            result = pmod(F, pmul(F, result, base), mod)
        e >>= 1
        if e:
            base = pmod(F, pmul(F, base, base), mod)
    return pmod(F, result, mod) if len(mod) > 1 else []


def peval(F: GF, a: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def _pth_root(F: GF, a: Sequence[int]) -> list[int]:
    """Square-free decomposition helper: a has only exponents divisible by p."""
    p = F.p
    e = F.q // p  # inverse of the p-power Frobenius on F_q
    return pstrip([F.pow(a[i], e) for i in range(0, len(a), p)])


def squarefree_factorization(F: GF, f: Sequence[int]) -> list[tuple[list[int], int]]:
    """Monic square-free factors with multiplicities (Yun, char-p variant)."""
    f = pmonic(F, f)
    out: list[tuple[list[int], int]] = []

    def rec(g: list[int], mult: int) -> None:
        if len(g) <= 1:
            return
        d = pderiv(F, g)
        if not d:
            rec(_pth_root(F, g), mult * F.p)
            return
        c = pgcd(F, g, d)
        w = pdivmod(F, g, c)[0]
        i = 1
        while len(w) > 1:
            y = pgcd(F, w, c)
            z = pdivmod(F, w, y)[0]
            if len(z) > 1:
                out.append((z, i * mult))
            i += 1
            w = y
            c = pdivmod(F, c, y)[0]
        if len(c) > 1:
            rec(_pth_root(F, c), mult * F.p)

    rec(f, 1)
    return out


def distinct_degree(F: GF, f: Sequence[int]) -> list[tuple[list[int], int]]:
    """Split a monic square-free f into products of equal-degree irreducibles."""
    out = []
    f = list(f)
    x = [0, 1]
    h = x
    d = 0
    while len(f) - 1 >= 2 * (d + 1):
        d += 1
        h = ppowmod(F, h, F.q, f)
        g = pgcd(F, f, psub(F, h, x))
        if len(g) > 1:
            out.append((g, d))
            f = pdivmod(F, f, g)[0]
            h = pmod(F, h, f)
    if len(f) > 1:
        out.append((pmonic(F, f), len(f) - 1))
    return out


def equal_degree(F: GF, f: Sequence[int], d: int, rng: random.Random) -> list[list[int]]:
    """Cantor-Zassenhaus splitting of f into its irreducible factors of degree d."""
    n = len(f) - 1
    if n == d:
        return [list(f)]
    while True:
        a = pstrip([rng.randrange(F.q) for _ in range(n)])
        if len(a) < 2:
            continue
        if F.p == 2:
            # absolute trace to F_2 of the element a in F_{q^d}[x]/f
            t, acc = list(a), list(a)
            for _ in range(F.k * d - 1):
                t = pmod(F, pmul(F, t, t), f)
                acc = padd(F, acc, t)
            cand = acc
        else:
            cand = psub(F, ppowmod(F, a, (F.q**d - 1) // 2, f), [1])
        g = pgcd(F, f, cand)
        if 1 < len(g) < len(f):
            h = pdivmod(F, f, g)[0]
            return equal_degree(F, g, d, rng) + equal_degree(F, h, d, rng)


def factor_fq(F: GF, f: Sequence[int], seed: int = 0) -> list[tuple[list[int], int]]:
    """Monic irreducible factors of f with multiplicities, deterministically sorted."""
    f = pstrip(list(f))
    if not f:
        raise ValidationError("cannot factor the zero polynomial")
    rng = random.Random(seed)
    out: dict[tuple[int, ...], int] = {}
    for sqf, mult in squarefree_factorization(F, f):
        for block, d in distinct_degree(F, sqf):
            for irr in equal_degree(F, block, d, rng):
                key = tuple(pmonic(F, irr))
                out[key] = out.get(key, 0) + mult
    return sorted(((list(k), m) for k, m in out.items()), key=lambda t: (len(t[0]), t[0][::-1]))


def roots_fq(F: GF, f: Sequence[int]) -> list[int]:
    """Distinct roots of f in F."""
    f = pstrip(list(f))
    if len(f) <= 1:
        return []
    xq = ppowmod(F, [0, 1], F.q, f)
    g = pgcd(F, f, psub(F, xq, [0, 1]))
    if len(g) <= 1:
        return []
    lin = equal_degree(F, g, 1, random.Random(1))
    return sorted(F.neg(l[0]) for l in lin)


@dataclass(frozen=True)
class FqPoly:
    """A polynomial over a specific finite field, as returned by factorizations."""

    field: GF
    coeffs: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __str__(self) -> str:
        if self.field.k == 1:
            return format_poly(self.coeffs)
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            cs = self.field.format(c)
            if i and c == 1:
                terms.append(mono)
            elif i:
                terms.append(f"({cs})*{mono}")
            else:
                terms.append(f"({cs})" if "+" in cs else cs)
        return " + ".join(terms) or "0"

    def to_unipoly(self) -> UniPoly:
        if self.field.k != 1:
            raise ValueError("only prime-field polynomials lift to integer coefficients")
        return UniPoly(self.coeffs)


def reduce_poly(poly, F: GF) -> list[int]:
    """Reduce a UniPoly or integer coefficient list into F[x]."""
    cs = poly.coeffs if isinstance(poly, UniPoly) else poly
    return pstrip([F.from_rational(c) for c in cs])


def factor_poly_mod(poly, ell: int, k: int = 1) -> list[tuple[FqPoly, int]]:
    """Factor a rational polynomial over F_{ell^k} into monic irreducibles.

    The leading coefficient (a unit mod ell) is dropped; see
    :func:`factor_poly_mod_with_unit` to recover it.
    """
    return factor_poly_mod_with_unit(poly, ell, k)[1]


def factor_poly_mod_with_unit(poly, ell: int, k: int = 1) -> tuple[int, list[tuple[FqPoly, int]]]:
    ell, k = int(ell), int(k)
    if not is_prime(ell):
        raise ValidationError(f"{ell} is not prime")
    cs = poly.coeffs if isinstance(poly, UniPoly) else [Fraction(c) for c in poly]
    if not cs or all(Fraction(c) == 0 for c in cs):
        raise ValidationError("cannot factor the zero polynomial")
    lead = Fraction(cs[-1])
    if lead.numerator % ell == 0:
        raise ValidationError(f"leading coefficient {lead} vanishes mod {ell}")
    F = gf(ell, k)
    f = reduce_poly(cs, F)
    unit = f[-1]
    facs = factor_fq(F, f)
    return unit, [(FqPoly(F, tuple(g)), m) for g, m in facs]


def degree_pattern(poly, ell: int) -> list[int]:
    """Sorted degrees (with multiplicity) of the irreducible factors mod ell."""
    out = []
    for g, m in factor_poly_mod(poly, ell):
        out.extend([g.degree] * m)
    return sorted(out)


def is_irreducible_fq(F: GF, f: Sequence[int]) -> bool:
    facs = factor_fq(F, f)
    return len(facs) == 1 and facs[0][1] == 1


def polys_fq(F: GF, degree: int, monic: bool = True) -> Iterable[list[int]]:
    """All polynomials of exactly the given degree (monic by default)."""
    q = F.q
    leads = [1] if monic else range(1, q)
    for lead in leads:
        for idx in range(q**degree):
            low = [(idx // q**i) % q for i in range(degree)]
            yield low + [lead]
