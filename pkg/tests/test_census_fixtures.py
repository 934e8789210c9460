import json

import pytest
import sympy as sp

from shimura_lab.census import frobenius_group_cycle_types, harbater_frobenius, pattern_label
from shimura_lab.errors import ValidationError
from shimura_lab.fixtures import SHIPPED, Fixtures

X = sp.symbols("x")


def test_frobenius_group_cycle_types():
    # x -> ax + b: translations give a 17-cycle, a of order d fixes one point and has 16/d d-cycles
    want = {(1,) * 17, (17,)} | {tuple([1] + [d] * (16 // d)) for d in (2, 4, 8, 16)}
    assert frobenius_group_cycle_types(17) == want


def test_allowed_patterns_match_the_group(fx):
    allowed = {tuple(sorted(a)) for a in fx.load("harbater.json")["allowed_patterns"]}
    assert allowed == frobenius_group_cycle_types(17)


def test_pattern_label():
    assert pattern_label([1, 2, 2, 2, 2, 2, 2, 2, 2]) == "1+2^8"
    assert pattern_label([17]) == "17"


@pytest.fixture(scope="module")
def census(fx):
    data = fx.load("harbater.json")
    return harbater_frobenius(data["poly"], 1000, data["allowed_patterns"])


def test_census_small_bound(census):
    assert census.all_allowed
    assert census.patterns.get("17", 0) > 0
    assert 2 in census.skipped


def test_census_patterns_match_sympy(fx, census):
    poly = sp.Poly(list(reversed(fx.load("harbater.json")["poly"])), X)
    for p in (3, 5, 7, 19, 101, 409, 997):
        if p in census.skipped:
            continue
        want = sorted(sp.degree(f, X) for f, e in sp.factor_list(poly, modulus=p)[1] for _ in range(e))
        assert list(census.by_prime[p]) == want


def test_census_requires_monic():
    with pytest.raises(ValidationError):
        harbater_frobenius([1, 2], 100)


def test_every_shipped_fixture_loads(fx):
    for name in SHIPPED:
        assert isinstance(fx.load(name), dict)
        assert len(fx.digest(name)) == 64


def test_override_directory(tmp_path):
    (tmp_path / "tree.json").write_text(json.dumps({"vertices": [{"id": 0}], "edges": []}))
    fx = Fixtures(tmp_path)
    assert fx.load("tree.json")["edges"] == []
    assert fx.path("F.json").name == "F.json"  # falls through to package data
    assert fx.digest("brandt.json") == "" or fx.has("brandt.json")


def test_broken_override_is_a_validation_error(tmp_path):
    (tmp_path / "F.json").write_text("{not json")
    with pytest.raises(ValidationError):
        Fixtures(tmp_path).load("F.json")
    with pytest.raises(ValidationError):
        Fixtures(tmp_path).load("nonexistent.json")
