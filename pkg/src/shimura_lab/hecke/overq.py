"""Brandt matrices of the definite quaternion algebra over Q ramified at {p, oo}.

A small oracle for end-to-end tests. Left ideal classes of a maximal order O
are found by walking neighbour lattices; T_q records, for each class
representative I, how many of its q + 1 neighbours J (q I < J < I of index
q^2) fall into each class. Right multiplication by units of the right order
of I permutes those neighbours, and the orbits are the oriented edges used
for the bipartite double.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import lcm

from ..errors import UnsupportedError, ValidationError
from ..exactalg.linalg import det_rational, hnf_rows, solve_left
from ..exactalg.primes import primes_up_to
from .brandt import BrandtDataset

SUPPORTED_PRIMES = (2, 3, 5, 7, 11, 13)

Vec = tuple[Fraction, Fraction, Fraction, Fraction]
F = Fraction


class DefiniteAlgebra:
    """(a, b / Q) with a, b < 0, elements as coordinates on 1, i, j, k."""

    def __init__(self, a: int, b: int):
        if a >= 0 or b >= 0:
            raise ValidationError("a definite algebra needs a, b < 0")
        self.a, self.b = a, b

    def mul(self, x: Vec, y: Vec) -> Vec:
        a, b = self.a, self.b
        x0, x1, x2, x3 = x
        y0, y1, y2, y3 = y
        return (
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        )

    @staticmethod
    def conj(x: Vec) -> Vec:
        return (x[0], -x[1], -x[2], -x[3])

    def nrd(self, x: Vec) -> Fraction:
        a, b = self.a, self.b
        return x[0] ** 2 - a * x[1] ** 2 - b * x[2] ** 2 + a * b * x[3] ** 2

    def bilinear(self, x: Vec, y: Vec) -> Fraction:
        """Symmetric form with bilinear(x, x) = nrd(x)."""
        a, b = self.a, self.b
        return x[0] * y[0] - a * x[1] * y[1] - b * x[2] * y[2] + a * b * x[3] * y[3]


class Lattice:
    """A full-rank Z-lattice in the algebra, kept in Hermite normal form."""

    def __init__(self, gens):
        gens = [tuple(F(c) for c in g) for g in gens]
        d = lcm(*(c.denominator for g in gens for c in g)) if gens else 1
        rows = hnf_rows([[int(c * d) for c in g] for g in gens])
        if len(rows) != 4:
            raise ValidationError("lattice generators do not span the algebra")
        self.basis: tuple[Vec, ...] = tuple(tuple(F(c, d) for c in r) for r in rows)
        self.key = (d, tuple(tuple(r) for r in rows))

    def __eq__(self, other) -> bool:
        return isinstance(other, Lattice) and self.basis == other.basis

    def __hash__(self) -> int:
        return hash(self.basis)

    def covolume(self) -> Fraction:
        return abs(det_rational([list(r) for r in self.basis]))

    def contains(self, x: Vec) -> bool:
        coords = solve_left([list(r) for r in self.basis], list(x))
        return coords is not None and all(c.denominator == 1 for c in coords)


def lattice_product(A: DefiniteAlgebra, L: Lattice, M: Lattice) -> Lattice:
    return Lattice([A.mul(x, y) for x in L.basis for y in M.basis])


def short_vectors(A: DefiniteAlgebra, L: Lattice, norm: Fraction):
    """All x in L with nrd(x) == norm, found by Fincke-Pohst enumeration."""
    n = 4
    G = [[A.bilinear(x, y) for y in L.basis] for x in L.basis]
    # exact LDL^T: Q(v) = sum_i d_i (v_i + sum_{j>i} mu_ij v_j)^2
    mu = [[F(0)] * n for _ in range(n)]
    d = [F(0)] * n
    for i in range(n):
        d[i] = G[i][i] - sum(mu[i][k] ** 2 * d[k] for k in range(i))
        for j in range(i + 1, n):
            mu[j][i] = (G[j][i] - sum(mu[j][k] * mu[i][k] * d[k] for k in range(i))) / d[i]
    # mu[j][i] for j > i couples v_j into the square of index i
    out = []
    v = [0] * n

    def rec(i: int, remaining: Fraction):
        c = sum(mu[j][i] * v[j] for j in range(i + 1, n))
        r = math.sqrt(float(remaining / d[i])) + 1e-9
        lo, hi = math.ceil(-c - r), math.floor(-c + r)
        for t in range(lo, hi + 1):
            rest = remaining - d[i] * (t + c) ** 2
            if rest < 0:
                continue
            v[i] = t
            if i == 0:
                if rest == 0:
                    out.append(tuple(v))
            else:
                rec(i - 1, rest)
        v[i] = 0

    rec(n - 1, F(norm))
    return [tuple(sum(c * b[k] for c, b in zip(w, L.basis)) for k in range(4)) for w in out]


# Maximal orders, one standard choice per residue class of p:
#   p = 2: the Hurwitz order in (-1, -1);
#   p = 3 mod 4: Z<1, i, (1+j)/2, (i+k)/2> in (-1, -p);
#   p = 5 mod 8: Z<(1+j+k)/2, (i+2j+k)/4, j, k> in (-2, -p).
def _standard_order(p: int) -> tuple[DefiniteAlgebra, list[Vec]]:
    h, q = F(1, 2), F(1, 4)
    if p == 2:
        return DefiniteAlgebra(-1, -1), [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (h, h, h, h)]
    if p % 4 == 3:
        return DefiniteAlgebra(-1, -p), [(1, 0, 0, 0), (0, 1, 0, 0), (h, 0, h, 0), (0, h, 0, h)]
    if p % 8 == 5:
        return DefiniteAlgebra(-2, -p), [(h, 0, h, h), (0, q, h, q), (0, 0, 1, 0), (0, 0, 0, 1)]
    raise UnsupportedError(f"no hardcoded maximal order for p = {p}")


def _check_maximal(A: DefiniteAlgebra, O: Lattice, p: int) -> None:
    one = (F(1), F(0), F(0), F(0))
    if not O.contains(one):
        raise AssertionError("order does not contain 1")
    for x in O.basis:
        for y in O.basis:
            if not O.contains(A.mul(x, y)):
                raise AssertionError("order basis is not closed under multiplication")
    disc = abs(det_rational([[2 * A.bilinear(x, A.conj(A.conj(y))) for y in O.basis] for x in O.basis]))
    # det of the trace form trd(x conj y) is the reduced discriminant squared
    if disc != p * p:
        raise AssertionError(f"order has discriminant^2 {disc}, expected {p * p}")


class _IdealMachine:
    def __init__(self, p: int):
        self.p = p
        self.A, basis = _standard_order(p)
        self.O = Lattice(basis)
        _check_maximal(self.A, self.O, p)
        self.covol_O = self.O.covolume()

    def norm(self, I: Lattice) -> Fraction:
        r = I.covolume() / self.covol_O
        num, den = math.isqrt(r.numerator), math.isqrt(r.denominator)
        if F(num * num, den * den) != r:
            raise AssertionError("ideal covolume ratio is not a square")
        return F(num, den)

    def conj_lattice(self, I: Lattice) -> Lattice:
        return Lattice([self.A.conj(x) for x in I.basis])

    def right_order(self, I: Lattice) -> Lattice:
        return Lattice([tuple(c / self.norm(I) for c in x)
                        for x in lattice_product(self.A, self.conj_lattice(I), I).basis])

    def units(self, order: Lattice) -> list[Vec]:
        return short_vectors(self.A, order, F(1))

    def isomorphic(self, I: Lattice, J: Lattice) -> bool:
        """I = J * alpha for some alpha, searched in J^{-1} I."""
        nJ = self.norm(J)
        L = Lattice([tuple(c / nJ for c in x) for x in lattice_product(self.A, self.conj_lattice(J), I).basis])
        return bool(short_vectors(self.A, L, self.norm(I) / nJ))

    def neighbours(self, I: Lattice, q: int) -> list[Lattice]:
        """The q + 1 left O-ideals J with q I < J < I of index q^2."""
        nI = self.norm(I)
        qI = [tuple(q * c for c in x) for x in I.basis]
        found: list[Lattice] = []
        for coeffs in product(range(q), repeat=4):
            if not any(coeffs):
                continue
            x = tuple(sum(c * b[k] for c, b in zip(coeffs, I.basis)) for k in range(4))
            if (self.A.nrd(x) / nI) % q:
                continue
            if any(J.contains(x) for J in found):
                continue
            J = Lattice([self.A.mul(o, x) for o in self.O.basis] + qI)
            if self.norm(J) == q * nI:
                found.append(J)
                if len(found) == q + 1:
                    break
        if len(found) != q + 1:
            raise AssertionError(f"found {len(found)} neighbours at q = {q}, expected {q + 1}")
        return found


def _walk_prime(p: int) -> int:
    return 3 if p == 2 else 2


@lru_cache(maxsize=None)
def brandt_over_Q(p: int, q_max: int = 13) -> BrandtDataset:
    """Brandt matrices T_q (q <= q_max, q != p) with explicit edge orbits.

    Weights are unit-group orders modulo {+-1}, so the mass is (p - 1) / 12.
    """
    if p not in SUPPORTED_PRIMES:
        raise UnsupportedError(f"brandt_over_Q supports p in {SUPPORTED_PRIMES}, got {p}")
    M = _IdealMachine(p)
    target_mass = F(p - 1, 12)
    reps = [M.O]
    weights = [len(M.units(M.right_order(M.O))) // 2]
    frontier = [M.O]
    ell = _walk_prime(p)
    while sum(F(1, w) for w in weights) < target_mass:
        nxt = []
        for I in frontier:
            for J in M.neighbours(I, ell):
                if not any(M.isomorphic(J, R) for R in reps):
                    reps.append(J)
                    weights.append(len(M.units(M.right_order(J))) // 2)
                    nxt.append(J)
        if not nxt:
            break
        frontier = nxt
    mass = sum(F(1, w) for w in weights)
    if mass != target_mass:
        raise AssertionError(f"mass {mass} differs from (p - 1)/12 = {target_mass}")

    def classify(J: Lattice) -> int:
        hits = [k for k, R in enumerate(reps) if M.isomorphic(J, R)]
        if len(hits) != 1:
            raise AssertionError("neighbour matched no class or several classes")
        return hits[0]

    n = len(reps)
    matrices, edges, norms = {}, {}, {}
    for q in primes_up_to(q_max):
        q = int(q)
        if q == p:
            continue
        T = [[0] * n for _ in range(n)]
        elist = []
        for i, I in enumerate(reps):
            nbrs = M.neighbours(I, q)
            index = {J: k for k, J in enumerate(nbrs)}
            units = M.units(M.right_order(I))
            seen = set()
            for k, J in enumerate(nbrs):
                j = classify(J)
                T[i][j] += 1
                if k in seen:
                    continue
                orbit = {k}
                for u in units:
                    orbit.add(index[Lattice([M.A.mul(x, u) for x in J.basis])])
                seen |= orbit
                elist.append((i, j, weights[i] // len(orbit), f"q{q}:{i}-{k}"))
        matrices[str(q)] = T
        edges[str(q)] = elist
        norms[str(q)] = q
    return BrandtDataset(
        weights=tuple(weights),
        matrices=matrices,
        class_labels=tuple(range(n)),
        norms=norms,
        edges=edges,
        field_name="Q",
        provenance=f"computed: definite quaternion algebra over Q ramified at {{{p}, oo}}",
    )
