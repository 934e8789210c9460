"""Graph operations driven by Brandt data and by automorphism groups."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Sequence

from ..errors import UnsupportedError, ValidationError
from ..exactalg.primes import factorint
from .automorphism import _Adjacency, induced_automorphism
from .graph import Edge, Vertex, WeightedMultigraph
from .permgroup import ELEMENT_LIMIT, Perm, PermGroup, compose, inverse, perm_order, support


# -- bipartite double ------------------------------------------------------

def _edge_records(ds, label) -> list[tuple[int, int, int, Any]]:
    """Oriented edge classes i -> j as (i, j, weight, id), from data or from T."""
    n = len(ds.weights)
    T = ds.matrices[label]
    explicit = (ds.edges or {}).get(label)
    if explicit is None:
        if any(w != 1 for w in ds.weights):
            raise ValidationError("an explicit edge list is required when a stabilizer weight exceeds 1")
        out = []
        for i in range(n):
            for j in range(n):
                for m in range(T[i][j]):
                    out.append((i, j, 1, f"{i}-{j}#{m}"))
        return out
    out = []
    for k, e in enumerate(explicit):
        if isinstance(e, dict):
            i, j, w, eid = e["u"], e["v"], e.get("w", 1), e.get("id", k)
        else:
            i, j, w = e[:3]
            eid = e[3] if len(e) > 3 else k
        if not (0 <= i < n and 0 <= j < n):
            raise ValidationError(f"edge {eid!r} has an endpoint outside the class list")
        out.append((int(i), int(j), int(w), eid))
    return out


def build_double(ds, label) -> WeightedMultigraph:
    """Bipartite graph on classes x {0, 1}; each oriented class i -> j joins (i,0) to (j,1).

    The adjacency between the two sides is T[label]. Edge data are checked
    against the matrix through b_ij = sum over edges i -> j of w_i / w(e).
    """
    if label not in ds.matrices:
        raise ValidationError(f"no Hecke matrix for prime label {label!r}")
    T = ds.matrices[label]
    n = len(ds.weights)
    Np = ds.prime_norm(label)
    for i, row in enumerate(T):
        if sum(row) != Np + 1:
            raise ValidationError(
                f"not a degree-(Np+1) Hecke matrix: row {i} sums to {sum(row)}, expected {Np + 1}"
            )
    recs = _edge_records(ds, label)
    b = [[Fraction(0)] * n for _ in range(n)]
    for i, j, w, eid in recs:
        if ds.weights[i] % w:
            raise ValidationError(f"edge {eid!r}: weight {w} does not divide the vertex weight {ds.weights[i]}")
        b[i][j] += Fraction(ds.weights[i], w)
    for i in range(n):
        for j in range(n):
            if b[i][j] != T[i][j]:
                raise ValidationError(
                    f"edge list inconsistent with the Hecke matrix at ({i},{j}): {b[i][j]} != {T[i][j]}"
                )
    labels = ds.class_labels
    vertices = [Vertex((labels[i], s), ds.weights[i]) for s in (0, 1) for i in range(n)]
    edges = [Edge(eid, (labels[i], 0), (labels[j], 1), w) for i, j, w, eid in recs]
    g = WeightedMultigraph(vertices, edges, {"bipartition": [0, 1], "prime_label": label})
    swap = atkin_lehner_swap(g)
    if not _Adjacency(g).is_automorphism(swap.generators[0] if swap.generators else swap.identity):
        raise ValidationError("the side swap is not an automorphism: edge weights are not reverse-symmetric")
    return g


def atkin_lehner_swap(g: WeightedMultigraph) -> PermGroup:
    """The group of order 2 exchanging the two sides of a bipartite double."""
    idx = {v.id: k for k, v in enumerate(g.vertices)}
    perm = tuple(idx[(v.id[0], 1 - v.id[1])] for v in g.vertices)
    return PermGroup(g.n_vertices, [perm])


# -- quotients -----------------------------------------------------------------

def _union_find_orbits(n: int, perms: Sequence[Perm]) -> list[list[int]]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in perms:
        for x in range(n):
            a, b = find(x), find(p[x])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for x in range(n):
        groups.setdefault(find(x), []).append(x)
    return sorted(groups.values())


def quotient_by(g: WeightedMultigraph, group: PermGroup) -> WeightedMultigraph:
    """Orbit graph with loops removed.

    Orbit weights are the representative's weight times the stabilizer order.
    """
    if group.degree != g.n_vertices:
        raise ValidationError("group degree does not match the vertex count")
    adj = _Adjacency(g)
    for p in group.generators:
        if not adj.is_automorphism(p):
            raise ValidationError("group generator is not an automorphism of the graph")
    order = group.order()
    eperms = [adj.edge_perm(p) for p in group.generators]
    vorbits = _union_find_orbits(g.n_vertices, group.generators)
    eorbits = _union_find_orbits(g.n_edges, eperms)
    vmap = {}
    vertices = []
    for orb in vorbits:
        rep = g.vertices[orb[0]]
        for x in orb:
            vmap[g.vertices[x].id] = rep.id
        vertices.append(Vertex(rep.id, rep.w * (order // len(orb))))
    edges, removed = [], 0
    for orb in eorbits:
        rep = g.edges[orb[0]]
        u, v = vmap[rep.u], vmap[rep.v]
        if u == v:
            removed += 1
            continue
        edges.append(Edge(rep.id, u, v, rep.w * (order // len(orb))))
    md = {k: v for k, v in g.metadata.items() if k != "bipartition"}
    md.update({
        "quotient_group_order": order,
        "loops_removed": removed,
        "orbit_weight_rule": "representative weight times stabilizer order",
    })
    return WeightedMultigraph(vertices, edges, md)


# -- group structure -----------------------------------------------------------

SUBGROUP_LIMIT = 50_000


def elementary_abelian_subgroups(group: PermGroup, p: int) -> list[frozenset[Perm]]:
    """All elementary abelian p-subgroups (including the trivial one)."""
    elems = group.elements()
    ident = group.identity
    order_p = [x for x in elems if x != ident and perm_order(x) == p]

    def commutes(x, y):
        return compose(x, y) == compose(y, x)

    def extend(S: frozenset, x: Perm) -> frozenset:
        out = set(S)
        power = ident
        for _ in range(p - 1):
            power = compose(power, x)
            out.update(compose(s, power) for s in S)
        return frozenset(out)

    trivial = frozenset([ident])
    seen = {trivial}
    frontier = [trivial]
    while frontier:
        nxt = []
        for S in frontier:
            for x in order_p:
                if x in S or not all(commutes(x, s) for s in S):
                    continue
                T = extend(S, x)
                if T not in seen:
                    seen.add(T)
                    nxt.append(T)
                    if len(seen) > SUBGROUP_LIMIT:
                        raise UnsupportedError("too many elementary abelian subgroups to enumerate")
        frontier = nxt
    return sorted(seen, key=lambda S: (len(S), sorted(S)))


def _is_normal(S: frozenset, group: PermGroup) -> bool:
    for g in group.generators:
        gi = inverse(g)
        if any(compose(compose(gi, s), g) not in S for s in S):
            return False
    return True


def _rank(S: frozenset, p: int) -> int:
    r, n = 0, len(S)
    while n > 1:
        n //= p
        r += 1
    return r


@dataclass
class GroupStructureReport:
    order: int
    involutions: int
    element_orders: dict[int, int]
    is_abelian: bool
    normal_elementary_abelian: list[dict] = field(default_factory=list)
    cyclic_complements: list[dict] = field(default_factory=list)
    description: str = ""

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "involutions": self.involutions,
            "element_orders": {str(k): v for k, v in sorted(self.element_orders.items())},
            "is_abelian": self.is_abelian,
            "normal_elementary_abelian": self.normal_elementary_abelian,
            "cyclic_complements": self.cyclic_complements,
            "description": self.description,
        }


def group_structure(group: PermGroup) -> GroupStructureReport:
    n = group.order()
    if n > ELEMENT_LIMIT:
        raise UnsupportedError(f"group of order {n} exceeds the enumeration limit {ELEMENT_LIMIT}")
    elems = group.elements()
    orders = Counter(perm_order(x) for x in elems)
    gens = group.generators
    abelian = all(compose(a, b) == compose(b, a) for a, b in combinations(gens, 2))
    normal = []
    for p in sorted(factorint(n)) if n > 1 else []:
        for S in elementary_abelian_subgroups(group, p):
            if len(S) > 1 and _is_normal(S, group):
                normal.append((p, S))
    summary = Counter((p, _rank(S, p)) for p, S in normal)
    normal_json = [{"p": p, "rank": r, "count": c} for (p, r), c in sorted(summary.items())]

    cyclic = {}
    for x in elems:
        C = [group.identity]
        y = x
        while y != group.identity:
            C.append(y)
            y = compose(y, x)
        cyclic.setdefault(frozenset(C), x)
    complements = []
    for p, S in normal:
        m = n // len(S)
        comps = [C for C in cyclic if len(C) == m and len(C & S) == 1]
        if comps:
            complements.append({"p": p, "rank": _rank(S, p), "complement_order": m, "count": len(comps)})

    description = ""
    if abelian and n == 1:
        description = "trivial"
    if normal:
        top = max(normal, key=lambda t: len(t[1]))
        same = [t for t in normal if len(t[1]) == len(top[1]) and t[0] == top[0]]
        p, S = top
        r = _rank(S, p)
        base = f"(Z/{p})^{r}" if r > 1 else f"Z/{p}"
        if len(S) == n:
            description = base
        elif len(same) == 1:
            m = n // len(S)
            comps = [C for C in cyclic if len(C) == m and len(C & S) == 1]
            if comps:
                description = f"Z/{m} x {base}" if abelian else f"Z/{m} ⋉ {base}"
    return GroupStructureReport(n, orders.get(2, 0), dict(orders), abelian, normal_json, complements, description)


# -- admissibility -------------------------------------------------------------

@dataclass
class ElementAdmissibility:
    permutation: Perm
    order: int
    admissible: bool | None  # None for the identity: the definition does not apply
    vertex_support: int
    edge_support: int
    fixed_vertices: list
    fixed_star_edges: dict

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "admissible": "not applicable" if self.admissible is None else self.admissible,
            "vertex_support": self.vertex_support,
            "edge_support": self.edge_support,
            "fixed_vertices": [str(v) for v in self.fixed_vertices],
            "fixed_star_edges": {str(k): v for k, v in self.fixed_star_edges.items()},
        }


def element_admissibility(g: WeightedMultigraph, perm: Perm) -> ElementAdmissibility:
    aut = induced_automorphism(g, perm)
    fixed = aut.fixed_vertices()
    fixed_e = set(aut.fixed_edges())
    counts = {v: sum(1 for e in g.star(v) if e.id in fixed_e) for v in fixed}
    ident = all(perm[i] == i for i in range(len(perm)))
    admissible = None if ident else all(c < 3 for c in counts.values())
    return ElementAdmissibility(
        tuple(perm), perm_order(tuple(perm)), admissible, len(support(tuple(perm))),
        len(aut.edge_support()), fixed, counts,
    )


@dataclass
class AdmissibilityReport:
    elements: list[ElementAdmissibility]
    admissible_involutions: list[ElementAdmissibility]
    exponent_two_subgroups: int
    max_admissible_exponent_two_order: int
    group_admissible: bool

    def to_json(self) -> dict:
        return {
            "elements": [e.to_json() for e in self.elements],
            "admissible_involutions": [e.to_json() for e in self.admissible_involutions],
            "exponent_two_subgroups": self.exponent_two_subgroups,
            "max_admissible_exponent_two_order": self.max_admissible_exponent_two_order,
            "group_admissible": self.group_admissible,
        }


def admissible_analysis(g: WeightedMultigraph, group: PermGroup) -> AdmissibilityReport:
    """Admissibility of every element and of every exponent-2 subgroup."""
    per = [element_admissibility(g, x) for x in group.elements()]
    by_perm = {e.permutation: e for e in per}
    nontrivial = [e for e in per if e.admissible is not None]
    invol = [e for e in nontrivial if e.order == 2 and e.admissible]
    best = 1
    subgroups = elementary_abelian_subgroups(group, 2) if group.order() % 2 == 0 else [frozenset([group.identity])]
    for S in subgroups:
        if all(by_perm[x].admissible is not False for x in S):
            best = max(best, len(S))
    return AdmissibilityReport(
        nontrivial, invol, len(subgroups) - 1, best, all(e.admissible for e in nontrivial)
    )
