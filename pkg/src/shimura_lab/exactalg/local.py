"""Completions at odd primes: valuations and residues via a certified generator.

If theta generates the p-maximal order and its minimal polynomial G factors
mod p as a product of coprime prime powers, Hensel lifting splits G over
Z/p^N and the completion at P is Z_p[t]/(G_P) with G_P the lift of the
factor belonging to P.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm

from ..errors import PrecisionError, ValidationError
from .finitefield import gf, pmod, pmul, ppowmod, pstrip
from .linalg import det_integer
from .numberfield import NFElem, NumberField, PrimeIdeal, certify_p_maximal, coordinates_in_generator
from .zfactor import _zdivmod_monic, hensel_lift


class LocalCompletion:
    def __init__(self, nf: NumberField, prime: PrimeIdeal, precision: int = 48):
        p = prime.p
        if p == 2:
            raise ValidationError("dyadic completions are not supported; use trusted input")
        self.nf, self.prime, self.p, self.N = nf, prime, p, precision
        self.cert = certify_p_maximal(nf, p)
        F = gf(p)
        gbar = list(prime.residue_poly)
        local_bar = [1]
        for _ in range(prime.e):
            local_bar = pmul(F, local_bar, gbar)
        G = list(self.cert.generator_poly)
        rest_bar = [1]
        for g, e in self.cert.residue_factors:
            if list(g) == gbar:
                continue
            for _ in range(e):
                rest_bar = pmul(F, rest_bar, list(g))
        if len(rest_bar) == 1:
            self.local_poly = [c % p**precision for c in G]
        else:
            lifted = hensel_lift(G, [local_bar, rest_bar], p, precision)
            self.local_poly = lifted[0]
        self.modulus = p**precision
        self.residue_poly = gbar

    def _integral_rep(self, x: NFElem) -> tuple[list[int], int, int]:
        """(Y mod G_P, s, d') with x = Y / (p^s d') and gcd(d', p) = 1."""
        coords = coordinates_in_generator(x, self.cert)
        d = lcm(*(c.denominator for c in coords))
        s = 0
        dp = d
        while dp % self.p == 0:
            dp //= self.p
            s += 1
        Y = [int(c * d) % self.modulus for c in coords]
        _, r = _zdivmod_monic(Y, self.local_poly, self.modulus)
        return r, s, dp

    def _val_p_content(self, Y: list[int]) -> int:
        if not Y:
            raise PrecisionError("element vanishes at the working p-adic precision")
        out = self.N
        for c in Y:
            if c:
                v = 0
                while c % self.p == 0:
                    c //= self.p
                    v += 1
                out = min(out, v)
        return out

    def _unit_part_valuation(self, Y: list[int]) -> int:
        m = len(self.local_poly) - 1
        mod = self.modulus
        cols = []
        cur = Y
        for _ in range(m):
            col = list(cur) + [0] * (m - len(cur))
            cols.append(col)
            cur = _zdivmod_monic([0] + list(cur), self.local_poly, mod)[1]
        mat = [[cols[j][i] for j in range(m)] for i in range(m)]
        det = det_integer(mat) % mod
        if det == 0:
            raise PrecisionError("p-adic precision exhausted while computing a valuation")
        v = 0
        while det % self.p == 0:
            det //= self.p
            v += 1
        f = self.prime.f
        if v % f:
            raise AssertionError("norm valuation not divisible by the residue degree")
        return v // f

    def valuation(self, x: NFElem) -> int:
        if x.is_zero():
            raise ValidationError("valuation of zero")
        Y, s, _ = self._integral_rep(x)
        c = self._val_p_content(Y)
        Yu = [y // self.p**c for y in Y]
        return self.prime.e * (c - s) + self._unit_part_valuation(Yu)

    def residue(self, x: NFElem) -> list[int]:
        """Image of a P-adic unit in F_p[t]/(gbar), as a coefficient list."""
        Y, s, dp = self._integral_rep(x)
        c = self._val_p_content(Y)
        if c != s:
            raise ValidationError("residue requested for a non-unit")
        F = gf(self.p)
        red = pstrip([((y // self.p**c) * pow(dp, -1, self.p)) % self.p for y in Y])
        red = pmod(F, red, self.residue_poly)
        if not red:
            raise ValidationError("residue requested for a non-unit")
        return red

    def residue_power(self, x: NFElem, e: int) -> list[int]:
        F = gf(self.p)
        return ppowmod(F, self.residue(x), e, self.residue_poly)

    @property
    def residue_field_size(self) -> int:
        return self.p**self.prime.f


def tame_symbol(a: NFElem, b: NFElem, local: LocalCompletion) -> int:
    """Quadratic Hilbert symbol (a, b)_P at an odd prime P."""
    if a.is_zero() or b.is_zero():
        raise ValidationError("Hilbert symbol of zero")
    va, vb = local.valuation(a), local.valuation(b)
    unit = a**vb * b ** (-va)
    if (va * vb) % 2:
        unit = -unit
    q = local.residue_field_size
    r = local.residue_power(unit, (q - 1) // 2)
    if r == [1]:
        return 1
    if r == [local.p - 1]:
        return -1
    raise AssertionError("Euler criterion produced a non-sign value")
