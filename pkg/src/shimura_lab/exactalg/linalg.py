"""Exact dense linear algebra.

Matrices are lists of rows. The field routines only use +, -, *, / and
comparison with zero, so they work for Fraction entries and for FqElem
entries alike.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list]


def identity(n: int, one=1) -> Matrix:
    zero = one - one
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), start=row[0] * 0) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum((x * y for x, y in zip(row, v)), start=v[0] * 0) for row in a]


def transpose(a: Sequence[Sequence]) -> Matrix:
    return [list(r) for r in zip(*a)]


def mat_equal(a, b) -> bool:
    return all(all(x == y for x, y in zip(r, s)) for r, s in zip(a, b)) and len(a) == len(b)


def rref(rows: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over a field and the pivot columns."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c] if not hasattr(m[r][c], "field") else m[r][c] ** -1
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def kernel(rows: Sequence[Sequence], zero=Fraction(0), one=Fraction(1)) -> Matrix:
    """Basis (as row vectors) of {v : A v = 0}."""
    if not rows:
        return []
    ncols = len(rows[0])
    red, piv = rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for fcol in free:
        v = [zero] * ncols
        v[fcol] = one
        for i, pc in enumerate(piv):
            v[pc] = -red[i][fcol]
        basis.append(v)
    return basis


def row_space(rows) -> Matrix:
    red, piv = rref(rows)
    return red[: len(piv)]


def intersect_spaces(a: Matrix, b: Matrix, zero=Fraction(0), one=Fraction(1)) -> Matrix:
    """Intersection of two row spaces, returned as a row basis."""
    if not a or not b:
        return []
    n = len(a[0])
    # solve x A = y B  ->  [A; -B]^T (x, y) = 0
    stacked = [list(r) for r in a] + [[-x for x in r] for r in b]
    coeffs = kernel(transpose(stacked), zero, one)
    out = []
    for c in coeffs:
        v = [zero] * n
        for ci, row in zip(c[: len(a)], a):
            if ci != 0:
                v = [x + ci * y for x, y in zip(v, row)]
        out.append(v)
    return row_space(out) if out else []


def solve_left(basis: Matrix, v: Sequence, zero=Fraction(0), one=Fraction(1)):
    """Coordinates c with sum c_i basis_i = v, or None."""
    aug = transpose([list(r) for r in basis] + [list(v)])
    red, piv = rref(aug)
    k = len(basis)
    if k in piv:
        return None
    coords = [zero] * k
    for i, pc in enumerate(piv):
        coords[pc] = red[i][k]
    return coords


def det_integer(m: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of an integer matrix."""
    a = [list(map(int, r)) for r in m]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det_rational(m: Sequence[Sequence]) -> Fraction:
    n = len(m)
    a = [[Fraction(x) for x in r] for r in m]
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        d *= a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


def charpoly_berkowitz(m: Sequence[Sequence]) -> list:
    """Characteristic polynomial det(xI - M), coefficients low to high.

    Division free, so it is exact over the integers.
    """
    n = len(m)
    if n == 0:
        return [1]
    one = m[0][0] ** 0 if not isinstance(m[0][0], int) else 1
    zero = one - one
    vect = [one, -m[0][0]]
    for r in range(1, n):
        # column above and row left of the new diagonal entry
        col = [m[i][r] for i in range(r)]
        row = [m[r][j] for j in range(r)]
        sub = [list(m[i][:r]) for i in range(r)]
        toeplitz_col = [one, -m[r][r]]
        # powers R A^k C for k = 0 .. r-1
        cur = col
        for _ in range(r):
            toeplitz_col.append(-sum((a * b for a, b in zip(row, cur)), start=zero))
            cur = [sum((sub[i][j] * cur[j] for j in range(r)), start=zero) for i in range(r)]
        new = []
        for i in range(r + 2):
            s = zero
            for j in range(min(i, r) + 1):
                if i - j < len(toeplitz_col):
                    s = s + toeplitz_col[i - j] * vect[j]
            new.append(s)
        vect = new
    # vect holds coefficients high to low of det(xI - M)
    return list(reversed(vect))


def hnf_rows(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row Hermite normal form of an integer matrix, zero rows dropped."""
    a = [list(map(int, r)) for r in rows]
    if not a:
        return []
    ncols = len(a[0])
    out_row = 0
    for c in range(ncols):
        # Euclid on column c among rows >= out_row
        while True:
            nz = [i for i in range(out_row, len(a)) if a[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][c]))
            a[out_row], a[piv] = a[piv], a[out_row]
            done = True
            for i in range(out_row + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // a[out_row][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[out_row])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if out_row < len(a) and a[out_row][c] != 0:
            if a[out_row][c] < 0:
                a[out_row] = [-x for x in a[out_row]]
            for i in range(out_row):
                q = a[i][c] // a[out_row][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[out_row])]
            out_row += 1
            if out_row == len(a):
                break
    return [r for r in a if any(r)]
