import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from shimura_lab.dualgraph import (
    Edge,
    Vertex,
    WeightedMultigraph,
    admissible_analysis,
    atkin_lehner_swap,
    automorphism_group,
    betti,
    betti_report,
    build_double,
    element_admissibility,
    group_structure,
    quotient_by,
    stabilize,
)
from shimura_lab.dualgraph.permgroup import PermGroup, compose, inverse, perm_order
from shimura_lab.errors import UnsupportedError, ValidationError
from shimura_lab.hecke import SUPPORTED_PRIMES, BrandtDataset, brandt_over_Q
from shimura_lab.verify import brute_force_automorphism_count, random_connected_graph, random_symmetric_graph


def cycle(n, weights=None):
    weights = weights or [1] * n
    return WeightedMultigraph([Vertex(i) for i in range(n)], [Edge(i, i, (i + 1) % n, weights[i]) for i in range(n)])


def graph(n, edges, vw=None):
    vw = vw or [1] * n
    return WeightedMultigraph([Vertex(i, vw[i]) for i in range(n)], [Edge(k, *e) for k, e in enumerate(edges)])


# -- the container ---------------------------------------------------------------

def test_validation():
    with pytest.raises(ValidationError):
        WeightedMultigraph([Vertex(0), Vertex(0)], [])
    with pytest.raises(ValidationError):
        WeightedMultigraph([Vertex(0)], [Edge(0, 0, 1)])
    with pytest.raises(ValidationError):
        WeightedMultigraph([Vertex(0, 0)], [])
    with pytest.raises(ValidationError):
        WeightedMultigraph([Vertex(0), Vertex(1)], [Edge(0, 0, 1, -2)])


def test_loops_count_twice_in_degree():
    g = graph(2, [(0, 0), (0, 1)])
    assert g.degree(0) == 3 and g.degree(1) == 1
    assert len(g.loops()) == 1


def test_json_round_trip():
    g, _ = random_symmetric_graph(random.Random(5), 6, 8)
    again = WeightedMultigraph.from_json(json.loads(json.dumps(g.to_json())))
    assert again == g
    assert again.to_json() == g.to_json()


def test_double_graph_json_round_trip_keeps_tuple_ids():
    g = build_double(brandt_over_Q(11), "2")
    again = WeightedMultigraph.from_json(json.loads(json.dumps(g.to_json())))
    assert again == g


def test_dot_export():
    dot = graph(2, [(0, 1, 5)], [3, 4]).to_dot()
    assert dot.startswith("graph G {")
    assert '"0" -- "1" [label="5"]' in dot and '"0" [label="0 (3)"]' in dot


# -- Betti numbers and stabilization ----------------------------------------------

def test_betti(fx):
    assert betti(WeightedMultigraph.from_json(fx.load("tree.json"))) == 0
    assert betti(cycle(5)) == 1
    assert betti(graph(2, [(0, 1), (0, 1), (0, 1)])) == 2
    rep = betti_report(graph(4, [(0, 1), (2, 3), (2, 3)]))
    assert rep.total == 1 and len(rep.components) == 2


def test_stabilize_removes_pendant_leaf():
    g = graph(4, [(0, 1), (1, 2), (2, 0), (0, 3)])
    s = stabilize(g)
    assert (s.n_vertices, s.n_edges) == (3, 3) and betti(s) == 1


def test_stabilize_path_collapses_to_a_point():
    s = stabilize(graph(3, [(0, 1, 2), (1, 2, 5)]))
    assert s.n_vertices == 1 and s.n_edges == 0
    assert s.metadata["degenerate"] == "single vertex"


def test_stabilize_adds_weights_along_chains():
    # theta graph with one branch subdivided into weights 2 and 5
    g = graph(3, [(0, 1, 1), (0, 1, 1), (0, 2, 2), (2, 1, 5)])
    s = stabilize(g)
    assert (s.n_vertices, s.n_edges) == (2, 3)
    assert sorted(e.w for e in s.edges) == [1, 1, 7]
    assert betti(s) == betti(g) == 2


def test_stabilize_keeps_bare_cycle():
    s = stabilize(cycle(4))
    assert s.metadata["degenerate"] == "single cycle"
    assert betti(s) == 1


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_stabilize_properties(seed):
    rng = random.Random(seed)
    g = random_connected_graph(rng, rng.randint(1, 9), rng.randint(0, 8))
    s = stabilize(g)
    assert betti(s) == betti(g)
    assert stabilize(s) == s
    if "degenerate" not in s.metadata:
        assert all(s.degree(v.id) >= 3 for v in s.vertices)


# -- automorphism groups -----------------------------------------------------------

@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_cycle_is_dihedral(n):
    assert automorphism_group(cycle(n)).order() == 2 * n


def test_alternating_weights_on_four_cycle():
    g = cycle(4, [1, 2, 1, 2])
    assert automorphism_group(g).order() == 4 == brute_force_automorphism_count(g)


def test_parallel_edges_do_not_add_vertex_automorphisms():
    g = graph(2, [(0, 1), (0, 1), (0, 1)])
    A = automorphism_group(g)
    assert A.order() == 2
    for aut in A.automorphisms():
        assert sorted(aut.edge_map.values()) == sorted(e.id for e in g.edges)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_automorphisms_match_brute_force(seed):
    rng = random.Random(seed)
    g = random_connected_graph(rng, rng.randint(1, 7), rng.randint(0, 6))
    A = automorphism_group(g)
    assert A.order() == brute_force_automorphism_count(g)


def test_group_structure_examples():
    d8 = group_structure(automorphism_group(cycle(4)))
    assert d8.order == 8 and d8.involutions == 5
    k4 = PermGroup(4, [(1, 0, 3, 2), (2, 3, 0, 1)])
    rep = group_structure(k4)
    assert rep.order == 4 and rep.involutions == 3 and rep.is_abelian
    assert {"p": 2, "rank": 2, "count": 1} in rep.normal_elementary_abelian
    assert rep.description == "(Z/2)^2"


def test_perm_helpers():
    a, b = (1, 2, 0), (1, 0, 2)
    assert compose(a, inverse(a)) == (0, 1, 2)
    assert perm_order(a) == 3 and perm_order(b) == 2
    assert PermGroup(3, [a, b]).order() == 6
    assert sorted(len(o) for o in PermGroup(5, [(1, 0, 2, 4, 3)]).orbits()) == [1, 2, 2]


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_schreier_sims_matches_closure(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 7)
    gens = [tuple(rng.sample(range(n), n)) for _ in range(rng.randint(1, 3))]
    closure = {tuple(range(n))}
    frontier = list(closure)
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = compose(x, g)
            if y not in closure:
                closure.add(y)
                frontier.append(y)
    G = PermGroup(n, gens)
    assert G.order() == len(closure)
    assert set(G.elements()) == closure


def test_element_enumeration_limit():
    big = PermGroup(9, [tuple(list(range(1, 9)) + [0]), (1, 0) + tuple(range(2, 9))])
    assert big.order() == 362880
    with pytest.raises(UnsupportedError):
        big.elements()


# -- quotients ---------------------------------------------------------------------

def test_antipodal_quotient_of_four_cycle():
    g = cycle(4)
    q = quotient_by(g, PermGroup(4, [(2, 3, 0, 1)]))
    assert (q.n_vertices, q.n_edges, betti(q)) == (2, 2, 1)
    assert all(v.w == 1 for v in q.vertices)


def test_identity_quotient_is_unchanged():
    g = graph(3, [(0, 1, 2), (1, 2, 3), (2, 0, 1)], [1, 2, 3])
    q = quotient_by(g, PermGroup(3, []))
    assert [(v.id, v.w) for v in q.vertices] == [(v.id, v.w) for v in g.vertices]
    assert [(e.u, e.v, e.w) for e in q.edges] == [(e.u, e.v, e.w) for e in g.edges]


def test_fixed_vertex_weight_is_multiplied_by_stabilizer():
    g = graph(3, [(0, 1), (0, 2)])  # swap the two leaves
    q = quotient_by(g, PermGroup(3, [(0, 2, 1)]))
    assert {v.id: v.w for v in q.vertices} == {0: 2, 1: 1}


def test_non_automorphism_is_rejected():
    with pytest.raises(ValidationError):
        quotient_by(cycle(4, [1, 2, 1, 2]), PermGroup(4, [(1, 2, 3, 0)]))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_quotient_betti_has_no_state_drift(seed):
    g, inv = random_symmetric_graph(random.Random(seed), random.Random(seed).randint(2, 9), 6)
    q = quotient_by(g, PermGroup(g.n_vertices, [inv]))
    fresh = WeightedMultigraph.from_json(q.to_json())
    assert betti_report(q) == betti_report(fresh)
    assert q.n_edges + q.metadata["loops_removed"] <= g.n_edges


# -- bipartite doubles -------------------------------------------------------------

def test_double_of_single_class():
    ds = BrandtDataset(weights=(1,), matrices={"2": [[3]]})
    g = build_double(ds, "2")
    assert (g.n_vertices, g.n_edges, betti(g)) == (2, 3, 2)


def test_double_of_two_classes():
    ds = BrandtDataset(weights=(1, 1), matrices={"2": [[0, 3], [3, 0]]})
    g = build_double(ds, "2")
    assert (g.n_vertices, g.n_edges) == (4, 6)
    assert all(g.degree(v.id) == 3 for v in g.vertices)


def test_double_rejects_wrong_degree():
    ds = BrandtDataset(weights=(1,), matrices={"2": [[2]]})
    with pytest.raises(ValidationError, match="Hecke matrix"):
        build_double(ds, "2")


@pytest.mark.parametrize("p", SUPPORTED_PRIMES)
def test_doubles_over_Q(p):
    ds = brandt_over_Q(p)
    for lab in ds.labels:
        g = build_double(ds, lab)
        q = ds.prime_norm(lab)
        assert g.n_vertices == 2 * ds.dimension
        swap = atkin_lehner_swap(g)
        assert quotient_by(g, swap).n_vertices == ds.dimension
        # every class meets q + 1 neighbours, counted with stabilizer weights
        for i, w in enumerate(ds.weights):
            star = g.star((ds.class_labels[i], 0))
            assert sum(w // e.w for e in star) == q + 1


def test_swap_fixed_edges_become_loops():
    ds = brandt_over_Q(11)
    g = build_double(ds, "2")
    q = quotient_by(g, atkin_lehner_swap(g))
    assert g.n_edges - 2 * q.n_edges == q.metadata["loops_removed"]


# -- admissibility -----------------------------------------------------------------

def test_leaf_swap_on_three_star_is_admissible():
    g = graph(4, [(0, 1), (0, 2), (0, 3)])
    rep = element_admissibility(g, (0, 2, 1, 3))
    assert rep.admissible is True


def test_element_fixing_a_full_star_is_not_admissible():
    g = graph(6, [(0, 1), (0, 2), (0, 3), (3, 4), (3, 5)])
    rep = element_admissibility(g, (0, 1, 2, 3, 5, 4))
    assert rep.admissible is False


def test_identity_is_not_applicable():
    g = graph(2, [(0, 1)])
    assert element_admissibility(g, (0, 1)).admissible is None
    assert element_admissibility(g, (0, 1)).to_json()["admissible"] == "not applicable"


def test_admissible_analysis_of_a_cycle():
    # stars have size 2, so no element can fix three edges at a vertex
    rep = admissible_analysis(cycle(6), automorphism_group(cycle(6)))
    assert len(rep.admissible_involutions) == 7
    assert rep.group_admissible is True
