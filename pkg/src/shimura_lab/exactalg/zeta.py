"""Euler-product evaluation of Dedekind zeta at s = 2.

For primes p > deg f not dividing disc(f), the factorization type of f mod p
is read from traces of powers of the Frobenius matrix on F_p[x]/(f): the trace
of the j-th power counts roots of f in F_{p^j}. This runs for all primes at
once in numpy. Remaining primes go through :func:`split_prime`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ShimuraLabError, ValidationError
from .numberfield import NumberField, split_prime
from .primes import mobius, primes_up_to

_CHUNK = 16384


def _mulmod(a: np.ndarray, b: np.ndarray, f_low: np.ndarray, p: np.ndarray) -> np.ndarray:
    m, n = a.shape
    prod = np.zeros((m, 2 * n - 1), dtype=np.int64)
    for i in range(n):
        prod[:, i : i + n] += a[:, i : i + 1] * b
    prod %= p[:, None]
    for k in range(2 * n - 2, n - 1, -1):
        c = prod[:, k]
        prod[:, k - n : k] -= c[:, None] * f_low
        prod[:, k - n : k] %= p[:, None]
    return prod[:, :n] % p[:, None]


def _times_x(a: np.ndarray, f_low: np.ndarray, p: np.ndarray) -> np.ndarray:
    top = a[:, -1:]
    out = np.concatenate([np.zeros_like(top), a[:, :-1]], axis=1)
    out -= top * f_low
    return out % p[:, None]


def frobenius_degree_counts(coeffs: Sequence[int], primes: Sequence[int]) -> np.ndarray:
    """Number of irreducible factors of each degree of f mod p, per prime.

    Requires f monic, p > deg f and f squarefree mod p. Row i, column d-1
    holds the count of degree-d factors modulo primes[i].
    """
    f = [int(c) for c in coeffs]
    n = len(f) - 1
    if f[-1] != 1:
        raise ValidationError("frobenius_degree_counts needs a monic polynomial")
    primes = np.asarray(primes, dtype=np.int64)
    if primes.size and primes.min() <= n:
        raise ValidationError("trace method needs p > degree")
    if primes.size and primes.max() > 10**6:
        raise ValidationError("trace method is limited to p <= 10^6 (int64 range)")
    out = np.zeros((primes.size, n), dtype=np.int64)
    mu = {d: mobius(d) for d in range(1, n + 1)}
    for start in range(0, primes.size, _CHUNK):
        p = primes[start : start + _CHUNK]
        m = p.size
        f_low = np.array([f[:n]], dtype=np.int64) % p[:, None]
        # x^p mod f by square-and-multiply on the bits of each p
        res = np.zeros((m, n), dtype=np.int64)
        res[:, 0] = 1 % p
        for bit in range(int(p.max()).bit_length() - 1, -1, -1):
            res = _mulmod(res, res, f_low, p)
            mask = ((p >> bit) & 1).astype(bool)
            if mask.any():
                shifted = _times_x(res, f_low, p)
                res = np.where(mask[:, None], shifted, res)
        # Frobenius matrix: column i is x^(i p)
        cols = [np.zeros((m, n), dtype=np.int64)]
        cols[0][:, 0] = 1
        for i in range(1, n):
            cols.append(_mulmod(cols[-1], res, f_low, p))
        frob = np.stack(cols, axis=2)  # (m, row, col)
        power = frob.copy()
        traces = np.zeros((m, n), dtype=np.int64)
        for j in range(1, n + 1):
            traces[:, j - 1] = np.trace(power, axis1=1, axis2=2) % p
            if j < n:
                power = np.matmul(power, frob) % p[:, None, None]
        for d in range(1, n + 1):
            acc = np.zeros(m, dtype=np.int64)
            for j in range(1, d + 1):
                if d % j == 0 and mu[d // j]:
                    acc += mu[d // j] * traces[:, j - 1]
            out[start : start + m, d - 1] = acc // d
    return out


def cycle_type_from_counts(counts: Sequence[int]) -> tuple[int, ...]:
    out = []
    for d, r in enumerate(counts, start=1):
        out.extend([d] * int(r))
    return tuple(sorted(out))


@dataclass(frozen=True)
class ZetaValue:
    value: float
    error_bound: float
    prime_bound: int
    primes_direct: tuple[int, ...]

    def __iter__(self):
        return iter((self.value, self.error_bound))


def zeta_at_2(nf: NumberField, prime_bound: int = 10**6) -> ZetaValue:
    """Truncated Euler product for zeta_K(2) with a rigorous tail bound.

    The omitted factors over p > bound contribute a log-factor of at most
    n * sum_{p > B} 2 p^-2 <= 2n/B, so the true value lies in
    [value, value * exp(2n/B)].
    """
    if prime_bound < 100:
        raise ValidationError("prime_bound must be at least 100")
    n = nf.degree
    disc = abs(nf.poly_discriminant)
    primes = primes_up_to(prime_bound)
    direct = [int(p) for p in primes if p <= n or disc % int(p) == 0]
    direct_set = set(direct)
    fast = np.array([p for p in primes if int(p) not in direct_set], dtype=np.int64)
    terms: list[float] = []
    for p in direct:
        try:
            sp = split_prime(nf, p)
        except ShimuraLabError as exc:
            raise ShimuraLabError(f"zeta_at_2: splitting failed at p={p}: {exc}") from exc
        for _, f in sp.factors:
            terms.append(-math.log1p(-float(p) ** (-2 * f)))
    if fast.size:
        counts = frobenius_degree_counts(nf.coeffs, fast)
        check = counts @ np.arange(1, n + 1)
        if not np.all(check == n):
            bad = int(fast[np.flatnonzero(check != n)[0]])
            raise ShimuraLabError(f"zeta_at_2: inconsistent factorization pattern at p={bad}")
        pf = fast.astype(np.float64)
        for d in range(1, n + 1):
            r = counts[:, d - 1]
            sel = r > 0
            if sel.any():
                terms.extend((-r[sel] * np.log1p(-pf[sel] ** (-2.0 * d))).tolist())
    log_value = math.fsum(terms)
    value = math.exp(log_value)
    tail = 2.0 * n / prime_bound
    # float rounding of the log-sum is far below the tail term; pad anyway
    err = value * math.expm1(tail) + value * 1e-13 * max(1, len(terms)) ** 0.5
    return ZetaValue(value, err, prime_bound, tuple(direct))
