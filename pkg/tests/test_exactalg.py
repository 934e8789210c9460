import itertools
import math
from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from shimura_lab.errors import NonMonogenicError, ValidationError
from shimura_lab.exactalg import (
    NumberField,
    UniPoly,
    cyclotomic_membership,
    dedekind_criterion,
    discriminant,
    factor_over_q,
    factor_poly_mod,
    field_from_json,
    resultant,
    split_prime,
    zeta_at_2,
)
from shimura_lab.exactalg.finitefield import FqElem, factor_fq, gf, roots_fq
from shimura_lab.exactalg.linalg import charpoly_berkowitz, det_integer, hnf_rows
from shimura_lab.exactalg.numberfield import format_signs, precision_ladder, real_signs
from shimura_lab.exactalg.primes import factorint, is_prime, primes_up_to

X = sp.symbols("x")
small_coeffs = st.lists(st.integers(-9, 9), min_size=1, max_size=6)


def to_sympy(coeffs):
    return sp.Poly(list(reversed([int(c) for c in coeffs])), X)


# -- polynomials ---------------------------------------------------------------

@given(small_coeffs, small_coeffs)
def test_poly_ring_matches_sympy(a, b):
    pa, pb = UniPoly(a), UniPoly(b)
    want = to_sympy(a) * to_sympy(b)
    got = pa * pb
    assert [int(c) for c in reversed(got.coeffs)] == (want.all_coeffs() if not want.is_zero else []) or got.is_zero()


@given(small_coeffs, small_coeffs)
def test_resultant_matches_sympy(a, b):
    if not any(a) or not any(b):
        return
    pa, pb = UniPoly(a), UniPoly(b)
    if pa.degree < 1 or pb.degree < 1:
        return
    # definition: lc(f)^deg(g) * prod g(alpha) over the roots of f
    f, g = to_sympy(a), to_sympy(b)
    roots = f.nroots(n=50)
    want = mpmath.mpf(int(f.LC())) ** g.degree()
    for r in roots:
        want *= complex(g.eval(r))
    got = resultant(pa, pb)
    assert got.denominator == 1
    assert abs(complex(want) - int(got)) < 1e-6 * max(1.0, abs(int(got)))


def test_discriminants():
    assert discriminant(UniPoly([-2, 0, 1])) == 8
    assert discriminant(UniPoly([1, 1, 1])) == -3
    assert discriminant(UniPoly([2, 0, -16, 0, 20, 0, -8, 0, 1])) == 2**31


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=2, max_size=4), min_size=1, max_size=3))
def test_factor_over_q_matches_sympy(parts):
    parts = [p for p in parts if any(p[1:])]
    if not parts:
        return
    poly = UniPoly([1])
    for p in parts:
        poly = poly * UniPoly(p)
    unit, facs = factor_over_q(poly)
    rebuilt = UniPoly([unit])
    for f, e in facs:
        for _ in range(e):
            rebuilt = rebuilt * f
    assert rebuilt == poly
    want = sp.factor_list(to_sympy(poly.coeffs))[1]
    assert sorted((f.degree, e) for f, e in facs) == sorted((sp.degree(f, X), e) for f, e in want)


# -- integers and matrices -------------------------------------------------------

@given(st.integers(2, 10**7))
def test_primality_and_factoring(n):
    assert is_prime(n) == sp.isprime(n)
    assert factorint(n) == sp.factorint(n)


def test_prime_sieve():
    assert list(primes_up_to(30)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@given(st.lists(st.lists(st.integers(-20, 20), min_size=4, max_size=4), min_size=4, max_size=4))
def test_det_and_charpoly(m):
    M = sp.Matrix(m)
    assert det_integer(m) == M.det()
    cp = charpoly_berkowitz([[Fraction(x) for x in r] for r in m])
    assert [int(c) for c in reversed(cp)] == M.charpoly(X).all_coeffs()


@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=3, max_size=5))
def test_hnf_spans_the_same_lattice(rows):
    h = hnf_rows(rows)
    A, H = sp.Matrix(rows), sp.Matrix(h) if h else sp.zeros(0, 3)
    assert A.rank() == len(h)
    if h:
        # each original row is an integer combination of the HNF rows, and conversely
        for r in rows:
            sol = H.T.solve_least_squares(sp.Matrix(r))
            assert all(x.is_integer for x in sol)
        if len(h) == 3:
            # equal covolume: |det H| is the gcd of the maximal minors of the generators
            minors = [sp.Matrix([rows[i] for i in c]).det() for c in itertools.combinations(range(len(rows)), 3)]
            assert abs(sp.Matrix(h).det()) == math.gcd(*[int(m) for m in minors])


# -- finite fields ---------------------------------------------------------------

@pytest.mark.parametrize(
    "coeffs,ell,expected",
    [
        ([1, -4, -4, 1, 1], 2, [(4, 1)]),
        ([0, 1], 2, [(1, 1)]),
        ([-1, 0, 1], 2, [(1, 2)]),
    ],
)
def test_factor_mod_examples(coeffs, ell, expected):
    got = [(f.degree, e) for f, e in factor_poly_mod(coeffs, ell)]
    assert got == expected


def test_square_of_x_plus_one_mod_two():
    (f, e), = factor_poly_mod([-1, 0, 1], 2)
    assert list(f.coeffs) == [1, 1] and e == 2


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5, 7, 13]), st.lists(st.integers(0, 12), min_size=2, max_size=7))
def test_factor_fq_matches_sympy(p, coeffs):
    coeffs = [c % p for c in coeffs]
    if coeffs[-1] == 0:
        coeffs[-1] = 1
    F = gf(p)
    facs = factor_fq(F, coeffs)
    got = sorted((len(f) - 1, e) for f, e in facs)
    want = sorted((sp.degree(f, X), e) for f, e in sp.factor_list(to_sympy(coeffs), modulus=p)[1])
    assert got == want


def test_gf_extension_arithmetic():
    F4 = gf(2, 2)
    assert F4.q == 4
    assert len(roots_fq(F4, [1, 1, 1])) == 2
    assert roots_fq(gf(2), [1, 1, 1]) == []
    F16 = gf(2, 4)
    for x in range(1, 16):
        e = FqElem(F16, x)
        assert e**15 == FqElem(F16, F16.from_int(1))


# -- number fields ---------------------------------------------------------------

def test_fixture_field(F):
    assert F.degree == 8
    assert F.signature == (8, 0)
    assert F.discriminant == 2**31


@pytest.mark.parametrize(
    "name,p,factors",
    [
        ("L_f", 2, ((1, 4),)),
        ("L_f", 5, ((4, 1),)),
        ("L_f", 3, ((2, 2),)),
        ("K_h", 2, ((3, 1),)),
    ],
)
def test_prime_splitting_examples(fx, name, p, factors):
    assert split_prime(fx.field(name), p).factors == factors


def test_two_totally_ramified_in_F(F):
    assert split_prime(F, 2).factors == ((8, 1),)


def test_splitting_degree_sum_against_sympy(fx):
    nf = fx.field("L_f")
    poly = to_sympy(nf.coeffs)
    for p in (7, 11, 13, 17, 19, 23):
        s = split_prime(nf, p)
        assert s.degree == 4
        if s.is_unramified():
            degs = sorted(f for _, f in s.factors)
            want = sorted(sp.degree(f, X) for f, _ in sp.factor_list(poly, modulus=p)[1])
            assert degs == want


def test_dedekind_failure_is_reported():
    # Z[sqrt(5)] is not 2-maximal
    res = dedekind_criterion([-5, 0, 1], 2)
    assert not res.passes
    with pytest.raises(NonMonogenicError):
        split_prime(NumberField([-5, 0, 1]), 2, allow_enlargement=False)
    assert split_prime(NumberField([-5, 0, 1]), 2).factors == ((1, 2),)


def test_bad_field_record():
    with pytest.raises(ValidationError):
        field_from_json({"poly": "x^2"})
    with pytest.raises(ValidationError):
        field_from_json({"poly": [-2, 0, 1], "disc": 9})


def test_real_signs(F):
    a = F.gen
    assert format_signs(real_signs(-a * a + a)) == "(+, -, -, -, -, -, -, -)"
    assert real_signs(F.one()) == (1,) * 8
    assert real_signs(-F.one()) == (-1,) * 8


def test_precision_override(monkeypatch):
    monkeypatch.setenv("SHIMURA_LAB_PRECISION", "1024")
    assert precision_ladder()[-1] == 1024
    monkeypatch.setenv("SHIMURA_LAB_PRECISION", "abc")
    with pytest.raises(ValidationError):
        precision_ladder()


def test_cyclotomic_membership_examples():
    assert cyclotomic_membership(3, 32)
    assert cyclotomic_membership(32, 32)
    assert not cyclotomic_membership(5, 32)


@pytest.mark.parametrize("q", [5, 7, 8, 9, 10, 12, 16, 20, 24, 32])
def test_cyclotomic_membership_against_factoring_over_F(q):
    # 2cos(2pi/q) lies in F exactly when its minimal polynomial splits into linear factors over F
    alpha = sp.sqrt(2 + sp.sqrt(2 + sp.sqrt(2)))
    g = sp.minimal_polynomial(2 * sp.cos(2 * sp.pi / q), X)
    factors = sp.factor_list(g, X, extension=alpha)[1]
    splits = all(sp.degree(f, X) == 1 for f, _ in factors)
    assert cyclotomic_membership(q, 32) == splits


# -- zeta ------------------------------------------------------------------------

def test_zeta_Q():
    z = zeta_at_2(NumberField([0, 1]), 10**5)
    assert abs(z.value - math.pi**2 / 6) <= max(z.error_bound, 1e-5)


def _dirichlet_L2(chi, modulus):
    return sum(chi(a) * mpmath.zeta(2, mpmath.mpf(a) / modulus) for a in range(1, modulus)) / modulus**2


def test_zeta_real_quadratic_matches_character_sum():
    chi8 = {1: 1, 3: -1, 5: -1, 7: 1}
    L = _dirichlet_L2(lambda a: chi8.get(a, 0), 8)
    want = float(mpmath.zeta(2) * L)
    z = zeta_at_2(NumberField([-2, 0, 1]), 2 * 10**5)
    assert abs(z.value - want) <= z.error_bound
    assert abs(z.value - want) / want < 1e-4


def test_zeta_F_matches_product_of_even_L_values(F):
    # F is the fixed field of -1 in Q(zeta_32); (Z/32)^x = <-1> x <5>, 5 of order 8
    log5 = {}
    x = 1
    for k in range(8):
        log5[x] = (k, 1)
        log5[(-x) % 32] = (k, -1)
        x = x * 5 % 32
    prod = mpmath.mpf(1)
    for j in range(8):
        w = mpmath.exp(2j * mpmath.pi * j / 8)

        def chi(a, w=w):
            if a % 2 == 0:
                return 0
            return w ** log5[a][0]

        prod *= mpmath.zeta(2) if j == 0 else _dirichlet_L2(chi, 32)
    want = float(mpmath.re(prod))
    z = zeta_at_2(F, 2 * 10**5)
    assert abs(z.value - want) <= z.error_bound
    assert abs(z.value - want) / want < 1e-4
