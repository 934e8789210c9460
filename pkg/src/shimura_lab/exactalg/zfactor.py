"""Factorization over Q by Zassenhaus: factor mod p, Hensel lift, recombine."""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

from .finitefield import factor_fq, gf, pderiv, pgcd, pxgcd
from .poly import UniPoly, poly_gcd
from .primes import is_prime


def _mod_sym(c: int, m: int) -> int:
    c %= m
    return c - m if c > m // 2 else c


def _zmul(a: list[int], b: list[int], m: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _zstrip([c % m for c in out])


def _zstrip(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _zdivmod_monic(a: list[int], b: list[int], m: int) -> tuple[list[int], list[int]]:
    """Division by a monic b in (Z/m)[x]."""
    rem = [c % m for c in a]
    db = len(b) - 1
    if len(rem) - 1 < db:
        return [], _zstrip(rem)
    quo = [0] * (len(rem) - db)
    for d in range(len(rem) - 1, db - 1, -1):
        c = rem[d] % m
        if c == 0:
            continue
        quo[d - db] = c
        for j in range(db + 1):
            rem[d - db + j] = (rem[d - db + j] - c * b[j]) % m
    return _zstrip(quo), _zstrip([c % m for c in rem[:db]])


def _hensel_pair(f: list[int], g: list[int], h: list[int], p: int, k: int) -> tuple[list[int], list[int]]:
    """Lift f = g*h (mod p), g monic and coprime to h, to a factorization mod p^k."""
    F = gf(p)
    one, s, t = pxgcd(F, g, h)
    assert one == [1], "Hensel lifting needs coprime factors"
    mod = p
    for _ in range(k - 1):
        nxt = mod * p
        gh = _zmul(g, h, nxt)
        diff = [((f[i] if i < len(f) else 0) - (gh[i] if i < len(gh) else 0)) % nxt for i in range(max(len(f), len(gh)))]
        assert all(c % mod == 0 for c in diff)
        e = _zstrip([(c // mod) % p for c in diff])
        te = _zmul(t, e, p)
        q, sigma = _zdivmod_monic(te, g, p)
        se = _zmul(s, e, p)
        qh = _zmul(q, h, p)
        tau = _zstrip([((se[i] if i < len(se) else 0) + (qh[i] if i < len(qh) else 0)) % p for i in range(max(len(se), len(qh)))])
        g = _zstrip([((g[i] if i < len(g) else 0) + mod * (sigma[i] if i < len(sigma) else 0)) % nxt for i in range(len(g))])
        h = _zstrip([((h[i] if i < len(h) else 0) + mod * (tau[i] if i < len(tau) else 0)) % nxt for i in range(max(len(h), len(tau)))])
        mod = nxt
    return g, h


def hensel_lift(f: list[int], factors: list[list[int]], p: int, k: int) -> list[list[int]]:
    """Lift monic pairwise coprime factors of f mod p to factors mod p^k.

    The last returned factor absorbs the leading coefficient of f.
    """
    if len(factors) == 1:
        m = p**k
        return [[c % m for c in f]]
    g = factors[0]
    rest = [1]
    for r in factors[1:]:
        rest = _zmul(rest, r, p)
    lead = f[-1] % p
    rest = [(c * lead) % p for c in rest]
    G, H = _hensel_pair(f, g, rest, p, k)
    # H carries lc(f); its remaining factors are monic mod p times lc
    sub = [[c % p for c in r] for r in factors[1:]]
    lifted_rest = hensel_lift(H, sub, p, k)
    return [G] + lifted_rest


def _mignotte(f: list[int]) -> int:
    n = len(f) - 1
    norm = math.isqrt(sum(c * c for c in f)) + 1
    return math.comb(n, n // 2) * norm * abs(f[-1])


def _choose_prime(f: list[int]) -> tuple[int, list[list[int]]]:
    best = None
    tried = 0
    p = 2
    while tried < 6 or best is None:
        p += 1
        if not is_prime(p) or f[-1] % p == 0:
            continue
        F = gf(p)
        fl = _zstrip([c % p for c in f])
        if len(pgcd(F, fl, pderiv(F, fl))) > 1:
            continue
        facs = factor_fq(F, fl)
        tried += 1
        if best is None or len(facs) < len(best[1]):
            best = (p, [g for g, _ in facs])
        if len(facs) == 1:
            break
    return best


def _divides_int(f: list[int], g: list[int]) -> list[int] | None:
    q, r = divmod(UniPoly(f), UniPoly(g))
    if not r.is_zero() or not q.is_integral():
        return None
    return q.to_ints()


def _factor_squarefree_primitive(f: list[int]) -> list[list[int]]:
    n = len(f) - 1
    if n <= 1:
        return [f]
    p, modp = _choose_prime(f)
    if len(modp) == 1:
        return [f]
    bound = 2 * _mignotte(f) + 1
    k = 1
    while p**k < bound:
        k += 1
    m = p**k
    lifted = hensel_lift(f, modp, p, k)
    # make all lifted factors monic mod m
    lifted_monic = []
    for g in lifted:
        inv = pow(g[-1], -1, m)
        lifted_monic.append([(c * inv) % m for c in g])
    remaining = list(range(len(lifted_monic)))
    factors = []
    cur = f
    size = 1
    while 2 * size <= len(remaining):
        found = False
        for subset in combinations(remaining, size):
            lead = cur[-1]
            cand = [lead % m]
            for i in subset:
                cand = _zmul(cand, lifted_monic[i], m)
            cand = [_mod_sym(c, m) for c in cand]
            cand = UniPoly(cand).primitive_part().to_ints()
            quo = _divides_int(cur, cand)
            if quo is not None:
                factors.append(cand)
                cur = quo
                remaining = [i for i in remaining if i not in subset]
                found = True
                break
        if not found:
            size += 1
    factors.append(UniPoly(cur).primitive_part().to_ints())
    return factors


def factor_over_q(poly: UniPoly) -> tuple[Fraction, list[tuple[UniPoly, int]]]:
    """Factor a nonzero rational polynomial into primitive integer irreducibles.

    Returns (unit, [(factor, multiplicity)]) with positive leading coefficients,
    sorted by degree then coefficients.
    """
    if poly.is_zero():
        raise ValueError("cannot factor zero")
    if poly.degree == 0:
        return poly.lc, []
    unit = poly.lc
    f = poly.monic()
    out: dict[UniPoly, int] = {}
    # Yun square-free decomposition over Q
    d = f.derivative()
    c = poly_gcd(f, d)
    w = f // c
    i = 1
    pieces = []
    while w.degree > 0:
        y = poly_gcd(w, c)
        z = w // y
        if z.degree > 0:
            pieces.append((z, i))
        i += 1
        w = y
        c = c // y
    for piece, mult in pieces:
        # extract the power of x separately
        prim = piece.primitive_part()
        ints = prim.to_ints()
        if ints[0] == 0:
            out[UniPoly((0, 1))] = out.get(UniPoly((0, 1)), 0) + mult
            prim = prim // UniPoly((0, 1))
            ints = prim.to_ints()
            if prim.degree == 0:
                continue
        for g in _factor_squarefree_primitive(ints):
            gp = UniPoly(g).primitive_part()
            out[gp] = out.get(gp, 0) + mult
    # recompute the unit so that unit * prod equals the input exactly
    prod = UniPoly((1,))
    for g, m in out.items():
        prod = prod * g**m
    unit = poly.lc / prod.lc
    items = sorted(out.items(), key=lambda t: (t[0].degree, t[0].coeffs))
    return unit, items
