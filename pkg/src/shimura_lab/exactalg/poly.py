"""Dense univariate polynomials with rational coefficients."""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

Rat = Fraction


def _as_rat(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    return Fraction(c)


class UniPoly:
    """Polynomial over Q stored low-to-high with no trailing zeros.

    Instances are immutable and hashable, so they can key dictionaries.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_as_rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("UniPoly is immutable")

    @classmethod
    def x(cls) -> "UniPoly":
        return cls((0, 1))

    @classmethod
    def constant(cls, c) -> "UniPoly":
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Iterable) -> "UniPoly":
        out = cls((1,))
        for r in roots:
            out = out * cls((-_as_rat(r), 1))
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == UniPoly((other,)).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def _coerce(self, other) -> "UniPoly":
        if isinstance(other, UniPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return UniPoly((other,))
        raise TypeError(f"cannot combine UniPoly with {type(other).__name__}")

    def __add__(self, other) -> "UniPoly":
        o = self._coerce(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return UniPoly(self[i] + o[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other) -> "UniPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "UniPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "UniPoly":
        o = self._coerce(other)
        if not self.coeffs or not o.coeffs:
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "UniPoly":
        if e < 0:
            raise ValueError("negative exponent")
        result, base = UniPoly((1,)), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __divmod__(self, other) -> tuple["UniPoly", "UniPoly"]:
        d = self._coerce(other)
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = d.degree
        inv_lc = 1 / d.lc
        if len(rem) - 1 < dd:
            return UniPoly(), self
        quo = [Fraction(0)] * (len(rem) - dd)
        for k in range(len(rem) - 1, dd - 1, -1):
            c = rem[k] * inv_lc
            if c == 0:
                continue
            quo[k - dd] = c
            for j in range(dd + 1):
                rem[k - dd + j] -= c * d.coeffs[j]
        return UniPoly(quo), UniPoly(rem[:dd])

    def __floordiv__(self, other) -> "UniPoly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "UniPoly":
        return divmod(self, other)[1]

    def __call__(self, x):
        acc = 0 * x if not isinstance(x, (int, Fraction)) else Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, inner: "UniPoly") -> "UniPoly":
        acc = UniPoly()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def derivative(self) -> "UniPoly":
        return UniPoly(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        inv = 1 / self.lc
        return UniPoly(c * inv for c in self.coeffs)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def to_ints(self) -> list[int]:
        if not self.is_integral():
            raise ValueError("polynomial has non-integral coefficients")
        return [int(c) for c in self.coeffs]

    def content(self) -> Fraction:
        """Positive rational c with self/c primitive integral."""
        if self.is_zero():
            return Fraction(0)
        den = reduce(lcm, (c.denominator for c in self.coeffs), 1)
        num = reduce(gcd, (int(c * den) for c in self.coeffs), 0)
        return Fraction(num, den)

    def primitive_part(self) -> "UniPoly":
        if self.is_zero():
            return self
        c = self.content()
        if self.lc < 0:
            c = -c
        return UniPoly(x / c for x in self.coeffs)

    def __repr__(self) -> str:
        return f"UniPoly({self})"

    def __str__(self) -> str:
        return format_poly(self.coeffs)


def format_poly(coeffs: Sequence, var: str = "x") -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = -c if c < 0 else c
        if i == 0:
            body = str(a)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if a == 1 else f"{a}*{mono}"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd over Q."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a: UniPoly, b: UniPoly) -> tuple[UniPoly, UniPoly, UniPoly]:
    """Return (g, s, t) with s*a + t*b = g, g monic."""
    r0, r1 = a, b
    s0, s1 = UniPoly((1,)), UniPoly()
    t0, t1 = UniPoly(), UniPoly((1,))
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    inv = 1 / r0.lc
    return r0 * inv, s0 * inv, t0 * inv


def resultant(f: UniPoly, g: UniPoly) -> Fraction:
    """Resultant: Sylvester determinant after clearing denominators.

    The fraction-free determinant avoids the coefficient growth of the
    Euclidean recursion over Q.
    """
    if f.is_zero() or g.is_zero():
        return Fraction(0)
    m, n = f.degree, g.degree
    if m == 0 or n == 0:
        return _resultant_euclid(f, g)
    from math import lcm

    from .linalg import det_integer

    df = lcm(*(c.denominator for c in f.coeffs))
    dg = lcm(*(c.denominator for c in g.coeffs))
    fi = [int(c * df) for c in reversed(f.coeffs)]
    gi = [int(c * dg) for c in reversed(g.coeffs)]
    size = m + n
    rows = [[0] * i + fi + [0] * (size - m - 1 - i) for i in range(n)]
    rows += [[0] * i + gi + [0] * (size - n - 1 - i) for i in range(m)]
    return Fraction(det_integer(rows), df**n * dg**m)


def _resultant_euclid(f: UniPoly, g: UniPoly) -> Fraction:
    if f.is_zero() or g.is_zero():
        return Fraction(0)
    m, n = f.degree, g.degree
    if n == 0:
        return g.lc ** m
    if m == 0:
        return f.lc ** n
    r = f % g
    if r.is_zero():
        return Fraction(0)
    sign = -1 if (m * n) % 2 else 1
    return sign * g.lc ** (m - r.degree) * _resultant_euclid(g, r)


def discriminant(f: UniPoly) -> Fraction:
    n = f.degree
    if n < 1:
        raise ValueError("discriminant needs positive degree")
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(f, f.derivative()) / f.lc


def squarefree_part(f: UniPoly) -> UniPoly:
    g = poly_gcd(f, f.derivative())
    return (f // g).monic()


def chebyshev_cosine(k: int) -> UniPoly:
    """Polynomial C_k with C_k(2cos t) = 2cos(k t)."""
    prev, cur = UniPoly((2,)), UniPoly((0, 1))
    if k == 0:
        return prev
    x = UniPoly.x()
    for _ in range(k - 1):
        prev, cur = cur, x * cur - prev
    return cur
