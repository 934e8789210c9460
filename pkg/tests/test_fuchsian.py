from fractions import Fraction

import pytest
import sympy as sp

from shimura_lab.errors import UnsupportedError, ValidationError
from shimura_lab.exactalg import NumberField, zeta_at_2
from shimura_lab.fuchsian import (
    CMOrderRecord,
    Signature,
    borel_volume,
    elliptic_count,
    elliptic_orders_scan,
    embedding_count,
    hyperelliptic_certificate,
    signature_of_maximal_group,
    solve_genus,
    weierstrass_report,
)
from shimura_lab.quatarith import PrimeRecord

P2 = [PrimeRecord(2, trusted=True)]


def record(q, h, split, label="O"):
    return CMOrderRecord(label=label, q=q, h=h, splitting_at={"p2": split})


# -- signatures and genus ------------------------------------------------------

def test_signature_roundtrip():
    for text in ("(16; 2^17, 3^9, 32^1)", "(40; 3^18, 16^1)", "(0; 2^1, 4^1, 6^1)", "(3)"):
        s = Signature.parse(text)
        assert Signature.parse(str(s)) == s
        assert Signature.from_json(s.to_json()) == s


def test_signature_parse_error():
    with pytest.raises(ValidationError):
        Signature.parse("16; 2^17")


@pytest.mark.parametrize(
    "vol,elliptic,g",
    [
        (Fraction(1455, 32), {2: 17, 3: 9, 32: 1}, 16),
        (Fraction(2 * 1455, 32), {3: 18, 16: 1}, 40),
        (Fraction(1, 12), [2, 4, 6], 0),
    ],
)
def test_solve_genus(vol, elliptic, g):
    assert solve_genus(vol, elliptic) == g


def test_solve_genus_rejects_inconsistent_data():
    with pytest.raises(ValidationError):
        solve_genus(Fraction(1455, 32), {2: 16, 3: 9, 32: 1})
    with pytest.raises(ValidationError):
        solve_genus(45.47, {2: 17})


def test_double_cover_volume_identity():
    big = Signature.parse("(40; 3^18, 16^1)").vol_over_2pi()
    small = Signature.parse("(16; 2^17, 3^9, 32^1)").vol_over_2pi()
    assert big == 2 * small == Fraction(2910, 32)


# -- embedding numbers and elliptic counts ---------------------------------------

@pytest.mark.parametrize(
    "q,h,split,index,m",
    [(2, 17, "ramified", 1, 34), (3, 9, "inert", 2, 18), (32, 1, "ramified", 1, 2)],
)
def test_embedding_counts(q, h, split, index, m):
    assert embedding_count(record(q, h, split), P2, index) == m


def test_split_prime_gives_no_embeddings():
    assert embedding_count(record(3, 9, "split"), P2) == 0


def test_fixture_elliptic_counts(fx):
    recs = fx.cm_records()
    assert {q: elliptic_count(q, recs, P2) for q in (2, 3, 32)} == {2: 17, 3: 9, 32: 1}


def test_record_validation():
    with pytest.raises(ValidationError):
        record(3, 0, "inert")
    with pytest.raises(ValidationError):
        record(3, 1, "sideways")
    with pytest.raises(UnsupportedError):
        CMOrderRecord("O", 2, 1, {"p2": "ramified"}, generators=("u", "v"))


# -- scan ------------------------------------------------------------------------

def test_scan_over_F(F, fx):
    assert elliptic_orders_scan(F, fx.ramified_primes("D"), q_max=64) == [3, 4, 6, 8, 16, 32]


def test_scan_over_Q_condition_one():
    Q = NumberField([0, 1], name="Q")
    assert elliptic_orders_scan(Q, [PrimeRecord(2)], q_max=64, condition_one_only=True) == [3, 4, 6]


def test_scan_condition_one_over_F_matches_sympy(F, fx):
    got = elliptic_orders_scan(F, fx.ramified_primes("D"), q_max=64, condition_one_only=True)
    x = sp.symbols("x")
    alpha = sp.sqrt(2 + sp.sqrt(2 + sp.sqrt(2)))
    want = []
    for q in range(3, 65):
        if sp.totient(q) // 2 > 8 or 8 % (sp.totient(q) // 2):
            continue  # the degree of Q(cos 2pi/q) must divide 8
        g = sp.minimal_polynomial(2 * sp.cos(2 * sp.pi / q), x)
        if all(sp.degree(f, x) == 1 for f, _ in sp.factor_list(g, x, extension=alpha)[1]):
            want.append(q)
    assert got == want
    assert {3, 4, 6, 8, 16, 32} <= set(got)


# -- Borel volume ----------------------------------------------------------------

@pytest.fixture(scope="module")
def zeta_F(F):
    return zeta_at_2(F, 10**6)


def test_borel_volume_closes_to_1455_over_32(F, fx, zeta_F):
    v = borel_volume(F, fx.ramified_primes("D"), None, zeta_F)
    assert v.index_H == 2
    assert abs(float(v.vol_over_2pi) - 1455 / 32) / (1455 / 32) < 1e-3
    assert v.as_rational(32) == Fraction(1455, 32)


def test_borel_volume_triangle_oracle():
    Q = NumberField([0, 1], name="Q")
    v = borel_volume(Q, [PrimeRecord(2), PrimeRecord(3)], 4, prime_bound=10**6)
    assert abs(float(v.vol_over_2pi) - 1 / 12) < 1e-6


def test_borel_volume_components_positive():
    Q = NumberField([0, 1], name="Q")
    v = borel_volume(Q, [], 1, prime_bound=10**4)
    assert v.vol_over_2pi > 0
    assert all(val > 0 for val in v.components.values())


def test_signature_of_maximal_group(F, fx, zeta_F):
    rep = signature_of_maximal_group(F, fx.ramified_primes("D"), fx.cm_records(), zeta2=zeta_F)
    assert str(rep.signature) == "(16; 2^17, 3^9, 32^1)"
    assert rep.exact_volume == Fraction(1455, 32)
    assert rep.scan == [3, 4, 6, 8, 16, 32]


def test_wrong_index_fails_to_pin_a_signature(F, fx, zeta_F):
    with pytest.raises(ValidationError):
        signature_of_maximal_group(F, fx.ramified_primes("D"), fx.cm_records(), index_H=8, zeta2=zeta_F)


# -- Weierstrass points ----------------------------------------------------------

@pytest.mark.parametrize("g,expected", [(16, (34, 4080, 4080)), (2, (6, 6, 6)), (3, (8, 24, 24))])
def test_weierstrass_report(g, expected):
    r = weierstrass_report(g)
    assert (r.min_count, r.max_count, r.weight_budget) == expected


def test_hyperelliptic_certificates():
    assert str(hyperelliptic_certificate(16, 17, 34)) == "hyperelliptic, #W = 34"
    assert hyperelliptic_certificate(2, 6, 6).verdict == "hyperelliptic"
    assert hyperelliptic_certificate(16, 0, 34).verdict is None
    assert hyperelliptic_certificate(16, 17, 68).verdict == "not hyperelliptic"
