"""Automorphisms of weighted multigraphs.

An automorphism is a vertex permutation that preserves vertex weights and,
for every pair of vertices, the multiset of weights of the edges joining
them. The induced edge permutation matches parallel edges in (weight, input
position) order, so induced edge maps compose like the vertex maps do.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import Hashable, Mapping, Sequence

from ..errors import ValidationError
from .graph import WeightedMultigraph
from .permgroup import Perm, PermGroup


class _Adjacency:
    """Index-based view of a graph used by the search."""

    def __init__(self, g: WeightedMultigraph):
        self.g = g
        self.n = g.n_vertices
        self.vw = [v.w for v in g.vertices]
        idx = g.vertex_index
        pair_edges: dict[tuple[int, int], list[int]] = defaultdict(list)
        for k, e in enumerate(g.edges):
            a, b = sorted((idx(e.u), idx(e.v)))
            pair_edges[(a, b)].append(k)
        ew = [e.w for e in g.edges]
        self.pair_edges = {key: sorted(ks, key=lambda k: (ew[k], k)) for key, ks in pair_edges.items()}
        self.pair_weights = {key: tuple(ew[k] for k in ks) for key, ks in self.pair_edges.items()}
        self.nbrs: list[dict[int, tuple[int, ...]]] = [dict() for _ in range(self.n)]
        for (a, b), ws in self.pair_weights.items():
            self.nbrs[a][b] = ws
            self.nbrs[b][a] = ws

    def initial_colors(self) -> list[tuple]:
        out = []
        for v in range(self.n):
            inc = []
            for u, ws in self.nbrs[v].items():
                inc.extend(ws * (2 if u == v else 1))
            loops = self.nbrs[v].get(v, ())
            out.append((self.vw[v], len(inc), tuple(sorted(inc)), loops))
        return out

    def is_automorphism(self, perm: Sequence[int]) -> bool:
        if sorted(perm) != list(range(self.n)):
            return False
        if any(self.vw[perm[v]] != self.vw[v] for v in range(self.n)):
            return False
        for (a, b), ws in self.pair_weights.items():
            key = tuple(sorted((perm[a], perm[b])))
            if self.pair_weights.get(key) != ws:
                return False
        return True

    def edge_perm(self, perm: Sequence[int]) -> Perm:
        out = [0] * len(self.g.edges)
        for (a, b), ks in self.pair_edges.items():
            image = self.pair_edges[tuple(sorted((perm[a], perm[b])))]
            for k, k2 in zip(ks, image):
                out[k] = k2
        return tuple(out)


class _Refiner:
    """Colour refinement with colours interned in a table shared by all branches."""

    def __init__(self, adj: _Adjacency):
        self.adj = adj
        self.table: dict = {}

    def intern(self, sig) -> int:
        return self.table.setdefault(sig, len(self.table))

    def refine(self, colors: list[int]) -> list[int]:
        n_classes = len(set(colors))
        while True:
            new = []
            for v in range(self.adj.n):
                around = sorted((colors[u], ws) for u, ws in self.adj.nbrs[v].items())
                new.append(self.intern((colors[v], tuple(around))))
            k = len(set(new))
            colors = new
            if k == n_classes:
                return colors
            n_classes = k

    def individualize(self, colors: list[int], v: int) -> list[int]:
        out = list(colors)
        out[v] = self.intern(("individualized", colors[v]))
        return self.refine(out)


def _target_cell(colors: list[int]) -> list[int] | None:
    cells: dict[int, list[int]] = defaultdict(list)
    for v, c in enumerate(colors):
        cells[c].append(v)
    big = [c for c, vs in cells.items() if len(vs) > 1]
    if not big:
        return None
    # the smallest non-singleton cell keeps the branching factor low
    c = min(big, key=lambda c: (len(cells[c]), c))
    return cells[c]


def _orbit(point: int, gens: list[Perm]) -> set[int]:
    orb, stack = {point}, [point]
    while stack:
        x = stack.pop()
        for g in gens:
            y = g[x]
            if y not in orb:
                orb.add(y)
                stack.append(y)
    return orb


@dataclass(frozen=True)
class GraphAutomorphism:
    vertex_map: Mapping[Hashable, Hashable]
    edge_map: Mapping[Hashable, Hashable]

    def fixed_vertices(self) -> list:
        return [v for v, w in self.vertex_map.items() if v == w]

    def fixed_edges(self) -> list:
        return [e for e, f in self.edge_map.items() if e == f]

    def vertex_support(self) -> list:
        return [v for v, w in self.vertex_map.items() if v != w]

    def edge_support(self) -> list:
        return [e for e, f in self.edge_map.items() if e != f]

    def is_identity(self) -> bool:
        return not self.vertex_support() and not self.edge_support()


def induced_automorphism(g: WeightedMultigraph, perm: Sequence[int]) -> GraphAutomorphism:
    """Wrap a vertex-index permutation, checking that it is an automorphism."""
    adj = _Adjacency(g)
    if not adj.is_automorphism(perm):
        raise ValidationError("permutation is not a weighted automorphism of the graph")
    ep = adj.edge_perm(perm)
    vids = [v.id for v in g.vertices]
    eids = [e.id for e in g.edges]
    return GraphAutomorphism(
        MappingProxyType({vids[i]: vids[perm[i]] for i in range(len(vids))}),
        MappingProxyType({eids[i]: eids[ep[i]] for i in range(len(eids))}),
    )


def is_automorphism(g: WeightedMultigraph, perm: Sequence[int]) -> bool:
    return _Adjacency(g).is_automorphism(perm)


def edge_permutation(g: WeightedMultigraph, perm: Sequence[int]) -> Perm:
    return _Adjacency(g).edge_perm(perm)


class GraphAutomorphismGroup(PermGroup):
    """A permutation group on vertex indices that knows its graph."""

    def __init__(self, graph: WeightedMultigraph, generators):
        super().__init__(graph.n_vertices, generators)
        self.graph = graph

    def automorphisms(self) -> list[GraphAutomorphism]:
        return [induced_automorphism(self.graph, p) for p in self.generators]


def automorphism_group(g: WeightedMultigraph) -> GraphAutomorphismGroup:
    """Full weighted automorphism group by refinement and backtracking.

    Generators come from a stabilizer-chain search: for the first vertex v
    of the target cell, generators of the stabilizer of v are found
    recursively, then one automorphism is sought for each cell member not yet
    in the orbit of v.
    """
    adj = _Adjacency(g)
    ref = _Refiner(adj)
    start = ref.refine([ref.intern(("init", c)) for c in adj.initial_colors()])

    refined_cache: dict[tuple, list[int]] = {}

    def child(colors: list[int], v: int) -> list[int]:
        key = (tuple(colors), v)
        if key not in refined_cache:
            refined_cache[key] = ref.individualize(colors, v)
        return refined_cache[key]

    def find_iso(c1: list[int], c2: list[int]) -> Perm | None:
        if Counter(c1) != Counter(c2):
            return None
        cell = _target_cell(c1)
        if cell is None:
            where = {c: v for v, c in enumerate(c2)}
            perm = tuple(where[c] for c in c1)
            return perm if adj.is_automorphism(perm) else None
        x = cell[0]
        c1x = child(c1, x)
        for y in (v for v, c in enumerate(c2) if c == c1[x]):
            found = find_iso(c1x, ref.individualize(c2, y))
            if found is not None:
                return found
        return None

    def stabilizer_gens(colors: list[int]) -> list[Perm]:
        cell = _target_cell(colors)
        if cell is None:
            return []
        v = cell[0]
        cv = child(colors, v)
        gens = stabilizer_gens(cv)
        orbit = _orbit(v, gens)
        for w in cell[1:]:
            if w in orbit:
                continue
            perm = find_iso(cv, ref.individualize(colors, w))
            if perm is not None:
                gens.append(perm)
                orbit = _orbit(v, gens)
        return gens

    gens = sorted(set(stabilizer_gens(start)))
    for p in gens:
        assert adj.is_automorphism(p)
    return GraphAutomorphismGroup(g, gens)
