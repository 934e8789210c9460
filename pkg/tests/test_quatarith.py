import itertools

import pytest
from hypothesis import given, settings, strategies as st

from shimura_lab.errors import UnsupportedError, ValidationError
from shimura_lab.exactalg import NumberField
from shimura_lab.quatarith import (
    PrimeRecord,
    QuaternionData,
    atkin_lehner_ranks,
    hilbert_symbol_odd,
    order_basis_integrality,
    quaternion_from_json,
    real_ramification,
    validate_ramification,
)

QQ = NumberField([0, 1], name="Q")


def _mod27_symbol(a: int, b: int) -> int:
    """+1 iff a x^2 + b y^2 = z^2 has a solution mod 27 with x, y, z not all divisible by 3."""
    for x, y, z in itertools.product(range(27), repeat=3):
        if x % 3 == 0 and y % 3 == 0 and z % 3 == 0:
            continue
        if (a * x * x + b * y * y - z * z) % 27 == 0:
            return 1
    return -1


@pytest.mark.parametrize("a,b,want", [(3, 5, -1), (-1, -1, 1), (1, 7, 1), (1, 3, 1)])
def test_hilbert_symbol_examples(a, b, want):
    assert hilbert_symbol_odd(QQ([a]), QQ([b]), PrimeRecord(3)) == want
    assert _mod27_symbol(a, b) == want


@settings(max_examples=25, deadline=None)
@given(st.integers(-12, 12), st.integers(-12, 12))
def test_hilbert_symbol_at_three_matches_exhaustive_search(a, b):
    # valuations at most 1 keep the mod-27 search decisive
    if a % 9 == 0 or b % 9 == 0:
        return
    assert hilbert_symbol_odd(QQ([a]), QQ([b]), PrimeRecord(3)) == _mod27_symbol(a, b)


def test_dyadic_symbol_is_unsupported():
    with pytest.raises(UnsupportedError):
        hilbert_symbol_odd(QQ([-1]), QQ([-1]), PrimeRecord(2))


def test_real_ramification(F):
    a = F.gen
    assert real_ramification(-a * a + a, F([-1])) == frozenset(range(2, 9))
    assert real_ramification(QQ([-1]), QQ([-1])) == frozenset({1})
    for b in (-7, -1, 3):
        assert real_ramification(QQ([1]), QQ([b])) == frozenset()


def test_fixture_algebras_validate(fx):
    rep = validate_ramification(fx.quaternion("D"))
    assert rep.parity_total == 8 and rep.trusted == ["p2"]
    assert validate_ramification(fx.quaternion("B")).parity_total == 8


def test_parity_violation():
    K = NumberField([-2, 0, 1], name="Q(sqrt2)")
    q = QuaternionData(K, K([-1]), K([-1]), (), frozenset({1}))
    with pytest.raises(ValidationError, match="parity"):
        validate_ramification(q)


def test_wrong_real_claim_is_rejected(F):
    q = QuaternionData(F, F([0, 1, -1]), F([-1]), (PrimeRecord(2, trusted=True),), frozenset({1, 2, 3, 4, 5, 6, 7}))
    with pytest.raises(ValidationError, match="real ramification"):
        validate_ramification(q)


def test_untrusted_dyadic_prime_is_rejected(F):
    q = QuaternionData(F, F([0, 1, -1]), F([-1]), (PrimeRecord(2),), frozenset(range(2, 9)))
    with pytest.raises(ValidationError, match="trusted"):
        validate_ramification(q)


def test_odd_ramification_over_Q():
    q = QuaternionData(QQ, QQ([-3]), QQ([5]), (PrimeRecord(3), PrimeRecord(5)), frozenset())
    rep = validate_ramification(q)
    assert all(c["agrees"] for c in rep.odd_checks)
    wrong = QuaternionData(QQ, QQ([-3]), QQ([5]), (PrimeRecord(3), PrimeRecord(7)), frozenset())
    with pytest.raises(ValidationError):
        validate_ramification(wrong)


def test_atkin_lehner_ranks(fx):
    r = atkin_lehner_ranks(fx.quaternion("D"), narrow_class_number_one=True)
    assert (r.r, r.s, r.r_plus) == (1, 1, 1)
    split = QuaternionData(QQ, QQ([1]), QQ([1]))
    assert atkin_lehner_ranks(split, True).r == 0
    two = QuaternionData(QQ, QQ([-3]), QQ([5]), (PrimeRecord(3), PrimeRecord(5)), frozenset())
    assert atkin_lehner_ranks(two, True).r == 2
    with pytest.raises(UnsupportedError):
        atkin_lehner_ranks(two, False)


def test_quaternion_multiplication_norm(D):
    one, i, j, k = D.basis()
    assert i * i == one.scale(D.a)
    assert j * j == one.scale(D.b)
    assert i * j == k and j * i == k.scale(-1)
    x = i + j.scale(3) + k + one.scale(2)
    assert x * x.conj() == one.scale(x.reduced_norm())
    assert x.reduced_trace() == D.base.scalar(4)


def test_order_basis_is_integral(fx):
    assert all(order_basis_integrality(fx.quaternion("D")))


def test_record_missing_fields(F):
    with pytest.raises(ValidationError):
        quaternion_from_json({"b": [-1]}, F)
