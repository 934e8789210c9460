import itertools
import json
from fractions import Fraction

import pytest

from shimura_lab.errors import UnsupportedError, ValidationError
from shimura_lab.hecke import (
    SUPPORTED_PRIMES,
    BrandtDataset,
    CongruenceGraph,
    brandt_over_Q,
    congruence_detect,
    connectivity,
    constituent_dimensions,
    integer_kernel,
    mod_ell_eigensystems,
    order_index_divisor,
    split_constituents,
)
from shimura_lab.hecke.overq import _IdealMachine

# y^2 + y = x^3 - x^2 - 10x - 20, the optimal curve of conductor 11
def _a_q_11a(q: int) -> int:
    count = 1
    for x in range(q):
        for y in range(q):
            if (y * y + y - (x**3 - x * x - 10 * x - 20)) % q == 0:
                count += 1
    return q + 1 - count


def diag(*xs):
    return [[x if i == j else 0 for j in range(len(xs))] for i, x in enumerate(xs)]


# -- the Brandt oracle over Q ------------------------------------------------------

def test_p2_single_class():
    ds = brandt_over_Q(2)
    assert ds.dimension == 1 and ds.weights == (12,)
    assert ds.matrices["3"] == ((4,),)


def test_p11_weights_and_mass():
    ds = brandt_over_Q(11)
    assert sorted(ds.weights) == [2, 3]
    assert sum(Fraction(1, w) for w in ds.weights) == Fraction(10, 12)


def test_p11_full_unit_groups_by_enumeration():
    # class 0 is the standard order; count its norm-one elements by a plain box search
    M = _IdealMachine(11)
    box = itertools.product(range(-3, 4), repeat=4)
    basis = M.O.basis
    units = 0
    for c in box:
        x = tuple(sum(ci * b[k] for ci, b in zip(c, basis)) for k in range(4))
        units += M.A.nrd(x) == 1
    assert units == len(M.units(M.O)) == 4
    # weights count units modulo +-1
    assert brandt_over_Q(11).weights[0] == units // 2


@pytest.mark.parametrize("p", SUPPORTED_PRIMES)
def test_mass_and_row_sums(p):
    ds = brandt_over_Q(p)
    assert sum(Fraction(1, w) for w in ds.weights) == Fraction(p - 1, 12)
    for lab in ds.labels:
        q = ds.prime_norm(lab)
        assert all(sum(r) == q + 1 for r in ds.matrices[lab])
        n = ds.dimension
        T = ds.matrices[lab]
        assert all(ds.weights[j] * T[i][j] == ds.weights[i] * T[j][i] for i in range(n) for j in range(n))


def test_p11_eigenvalues_match_point_counts():
    ds = brandt_over_Q(11)
    for lab in ds.labels:
        q = int(lab)
        T = ds.matrices[lab]
        trace, det = T[0][0] + T[1][1], T[0][0] * T[1][1] - T[0][1] * T[1][0]
        eis, cusp = q + 1, _a_q_11a(q)
        assert (trace, det) == (eis + cusp, eis * cusp)


def test_unsupported_prime():
    with pytest.raises(UnsupportedError):
        brandt_over_Q(17)


# -- dataset validation and ingestion ----------------------------------------------

def test_dataset_rejects_asymmetry_and_noncommuting():
    with pytest.raises(ValidationError, match="symmetry"):
        BrandtDataset(weights=(1, 1), matrices={"2": [[1, 2], [1, 2]]})
    with pytest.raises(ValidationError, match="commute"):
        BrandtDataset(weights=(1, 1), matrices={"2": [[0, 1], [1, 0]], "3": [[1, 0], [0, 2]]})
    with pytest.raises(ValidationError, match="x"):
        BrandtDataset(weights=(1, 1), matrices={"2": [[3]]})


def test_dataset_json_round_trip():
    ds = brandt_over_Q(11)
    again = BrandtDataset.from_json(json.loads(json.dumps(ds.to_json())))
    assert again.weights == ds.weights
    assert dict(again.matrices) == dict(ds.matrices)


def test_column_normalization_is_transposed():
    ds = brandt_over_Q(11)
    cols = {k: [list(r) for r in zip(*m)] for k, m in ds.matrices.items()}
    data = {"weights": list(ds.weights), "matrices": cols, "normalization": "columns"}
    assert dict(BrandtDataset.from_json(data).matrices) == dict(ds.matrices)


# -- constituents ------------------------------------------------------------------

def test_integer_kernel():
    k = integer_kernel([[1, 2, 3]])
    assert len(k) == 2
    assert all(sum(a * b for a, b in zip([1, 2, 3], v)) == 0 for v in k)


def test_diagonal_constituents():
    ds = BrandtDataset(weights=(1, 1, 1), matrices={"2": diag(1, 1, 2)})
    assert constituent_dimensions(ds) == [1, 2]


def test_companion_matrix_is_one_constituent():
    ds = BrandtDataset(weights=(1, 1), matrices={"2": [[0, 1], [1, 1]]})
    (c,) = split_constituents(ds)
    assert c.dimension == 2
    assert c.charpolys["2"] == [([-1, -1, 1], 1)]
    assert c.field_poly == [-1, -1, 1]


def test_p11_constituents():
    cons = split_constituents(brandt_over_Q(11))
    assert [c.dimension for c in cons] == [1, 1]
    assert split_constituents(brandt_over_Q(11), seed=7)[0].charpolys == cons[0].charpolys


# -- eigensystems mod ell ----------------------------------------------------------

def test_diagonal_eigensystems_mod_two():
    rep = mod_ell_eigensystems({"a": diag(0, 1), "b": diag(1, 1)}, 2, 1)
    got = sorted(tuple(int(s.to_json()["values"][k]) for k in ("a", "b")) for s in rep.systems)
    assert got == [(0, 1), (1, 1)]
    assert rep.semisimple


def test_conjugate_pair_over_F4():
    rep = mod_ell_eigensystems({"a": [[0, 1], [1, 1]]}, 2, 2)
    assert len(rep.systems) == 2 and len(rep.orbits) == 1
    assert {s.name for s in rep.systems} == {"theta"}
    short = mod_ell_eigensystems({"a": [[0, 1], [1, 1]]}, 2, 1)
    assert not short.complete and "enlarge" in short.notes[0]


def test_eisenstein_congruence_mod_five_for_p11():
    rep = mod_ell_eigensystems(brandt_over_Q(11), 5, 1)
    assert len(rep.systems) == 1
    assert not rep.semisimple


# -- congruences and connectivity --------------------------------------------------

def test_congruence_trivial_cases():
    a = {"2": 3, "3": -1, "5": 7}
    b = {k: v + 5 for k, v in a.items()}
    assert congruence_detect(a, a, 5)
    assert congruence_detect(a, b, 5)
    assert congruence_detect(a, b, 3).verdict == "not congruent"


def test_congruence_with_charpolys():
    # x^2 - x - 1 has a double root 3 mod 5, matching the integer 3
    assert congruence_detect({"2": [-1, -1, 1]}, {"2": 3}, 5)
    assert congruence_detect({"2": [-1, -1, 1]}, {"2": 1}, 5).verdict == "not congruent"
    with pytest.raises(ValidationError):
        congruence_detect({"2": 1}, {"3": 1}, 5)


def test_connectivity(fx):
    data = fx.load("al_signs.json")
    nodes = [c["label"] for c in data["constituents"]]
    cg = CongruenceGraph(nodes)
    cg.add_clique(["f", "f'", "g", "g'"], 5)
    cg.add_clique(["f", "f'", "h"], 3)
    assert len(connectivity(cg)) == 1
    assert len(connectivity(CongruenceGraph(nodes))) == 5
    mod2 = CongruenceGraph(nodes)
    mod2.add_clique(["f", "g", "h"], 2)
    mod2.add_clique(["f'", "g'", "h"], 2)
    assert len(connectivity(mod2)) == 1


# -- index certificates ------------------------------------------------------------

def test_index_full_power_basis():
    cert = order_index_divisor([-2, 0, 1], {"2": [0, 1]}, [[1, 0], [0, 1]])
    assert cert.generated_index == 1


def test_index_of_Z_2x():
    cert = order_index_divisor([-2, 0, 1], {"2": [0, 2]}, [[1, 0], [0, 1]])
    assert cert.generated_index == 2


def test_index_rejects_large_degree():
    with pytest.raises(UnsupportedError):
        order_index_divisor([1] + [0] * 8 + [1], {"2": [0, 1]}, [[int(i == j) for j in range(9)] for i in range(9)])
