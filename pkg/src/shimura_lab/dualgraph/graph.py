"""Weighted multigraphs: vertices and edges carry positive integer weights."""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import Any, Hashable, Iterable, Mapping

from ..errors import ValidationError


@dataclass(frozen=True)
class Vertex:
    id: Hashable
    w: int = 1


@dataclass(frozen=True)
class Edge:
    id: Hashable
    u: Hashable
    v: Hashable
    w: int = 1

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def other(self, x: Hashable) -> Hashable:
        return self.v if x == self.u else self.u


class WeightedMultigraph:
    """Immutable weighted multigraph. Loops and parallel edges are allowed."""

    def __init__(self, vertices: Iterable, edges: Iterable, metadata: Mapping[str, Any] | None = None):
        vs = tuple(v if isinstance(v, Vertex) else Vertex(*v) for v in vertices)
        es = tuple(e if isinstance(e, Edge) else Edge(*e) for e in edges)
        self._vindex = {}
        for i, v in enumerate(vs):
            if v.id in self._vindex:
                raise ValidationError(f"duplicate vertex id {v.id!r}")
            if not isinstance(v.w, int) or v.w < 1:
                raise ValidationError(f"vertex {v.id!r} has non-positive weight {v.w!r}")
            self._vindex[v.id] = i
        self._eindex = {}
        for i, e in enumerate(es):
            if e.id in self._eindex:
                raise ValidationError(f"duplicate edge id {e.id!r}")
            if e.u not in self._vindex or e.v not in self._vindex:
                raise ValidationError(f"edge {e.id!r} has an unknown endpoint")
            if not isinstance(e.w, int) or e.w < 1:
                raise ValidationError(f"edge {e.id!r} has non-positive weight {e.w!r}")
            self._eindex[e.id] = i
        self.vertices = vs
        self.edges = es
        self.metadata = MappingProxyType(dict(metadata or {}))
        star: dict[Hashable, list[Edge]] = defaultdict(list)
        for e in es:
            star[e.u].append(e)
            if not e.is_loop:
                star[e.v].append(e)
        self._star = {v.id: tuple(star.get(v.id, ())) for v in vs}

    # -- basic queries -------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def vertex(self, vid) -> Vertex:
        return self.vertices[self._vindex[vid]]

    def edge(self, eid) -> Edge:
        return self.edges[self._eindex[eid]]

    def vertex_index(self, vid) -> int:
        return self._vindex[vid]

    def edge_index(self, eid) -> int:
        return self._eindex[eid]

    def star(self, vid) -> tuple[Edge, ...]:
        """Edges incident to vid; a loop appears once."""
        return self._star[vid]

    def degree(self, vid) -> int:
        """Star size with loops counted twice (each loop has two half-edges at vid)."""
        return sum(2 if e.is_loop else 1 for e in self._star[vid])

    def loops(self) -> list[Edge]:
        return [e for e in self.edges if e.is_loop]

    def components(self) -> list[list]:
        seen, out = set(), []
        for v in self.vertices:
            if v.id in seen:
                continue
            comp, stack = [], [v.id]
            seen.add(v.id)
            while stack:
                x = stack.pop()
                comp.append(x)
                for e in self._star[x]:
                    y = e.other(x)
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            out.append(comp)
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def with_metadata(self, **extra) -> "WeightedMultigraph":
        md = dict(self.metadata)
        md.update(extra)
        return WeightedMultigraph(self.vertices, self.edges, md)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, WeightedMultigraph)
            and self.vertices == other.vertices
            and self.edges == other.edges
            and dict(self.metadata) == dict(other.metadata)
        )

    def __repr__(self) -> str:
        return f"WeightedMultigraph({self.n_vertices} vertices, {self.n_edges} edges)"

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        out = {
            "vertices": [{"id": v.id, "w": v.w} for v in self.vertices],
            "edges": [{"id": e.id, "u": e.u, "v": e.v, "w": e.w} for e in self.edges],
        }
        if self.metadata:
            out["metadata"] = _jsonable(dict(self.metadata))
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "WeightedMultigraph":
        try:
            vs = [Vertex(_id(v["id"]), int(v.get("w", 1))) for v in data["vertices"]]
            es = [
                Edge(_id(e.get("id", i)), _id(e["u"]), _id(e["v"]), int(e.get("w", 1)))
                for i, e in enumerate(data["edges"])
            ]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed graph record: {exc}") from exc
        return cls(vs, es, data.get("metadata"))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def to_dot(self, name: str = "G") -> str:
        lines = [f"graph {name} {{"]
        for v in self.vertices:
            lines.append(f'  "{v.id}" [label="{v.id} ({v.w})"];')
        for e in self.edges:
            lines.append(f'  "{e.u}" -- "{e.v}" [label="{e.w}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _id(x):
    return tuple(x) if isinstance(x, list) else x


def _jsonable(x):
    if isinstance(x, Mapping):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BettiReport:
    total: int
    components: tuple[tuple[int, int, int], ...]  # (V_i, E_i, 1 + E_i - V_i)

    @property
    def connected(self) -> bool:
        return len(self.components) <= 1


def betti_report(g: WeightedMultigraph) -> BettiReport:
    comps = []
    for comp in g.components():
        cs = set(comp)
        ne = sum(1 for e in g.edges if e.u in cs)
        comps.append((len(comp), ne, 1 + ne - len(comp)))
    return BettiReport(sum(c[2] for c in comps), tuple(comps))


def betti(g: WeightedMultigraph) -> int:
    """First Betti number 1 + E - V, summed over components."""
    return betti_report(g).total


def stabilize(g: WeightedMultigraph) -> WeightedMultigraph:
    """Remove leaves and contract chains until every star has size >= 3.

    Leaf removal runs to exhaustion first, then chain contraction; the two
    alternate until nothing changes. A bare cycle is not contracted further.
    Degenerate outcomes (a single vertex or a single cycle) are recorded in
    metadata["degenerate"].
    """
    if g.n_vertices and not g.is_connected():
        raise ValidationError("stabilize needs a connected graph")
    verts = {v.id: v for v in g.vertices}
    edges = {e.id: e for e in g.edges}
    order_v = [v.id for v in g.vertices]
    order_e = [e.id for e in g.edges]
    star: dict[Hashable, set] = {v: set() for v in verts}
    for e in edges.values():
        star[e.u].add(e.id)
        star[e.v].add(e.id)

    def deg(v) -> int:
        return sum(2 if edges[x].is_loop else 1 for x in star[v])

    changed = True
    while changed:
        changed = False
        leaves = True
        while leaves:
            leaves = False
            if len(verts) <= 1:
                break
            for v in order_v:
                if v in verts and deg(v) == 1:
                    (eid,) = star[v]
                    e = edges.pop(eid)
                    star[e.other(v)].discard(eid)
                    del verts[v], star[v]
                    leaves = changed = True
        if verts and all(deg(v) == 2 for v in verts):
            break  # a bare cycle is left as it is
        for v in order_v:
            if v not in verts or deg(v) != 2 or len(star[v]) != 2:
                continue
            e1, e2 = (edges[x] for x in sorted(star[v], key=order_e_key(order_e)))
            a, b = e1.other(v), e2.other(v)
            new = Edge(f"{e1.id}+{e2.id}", a, b, e1.w + e2.w)
            for e in (e1, e2):
                del edges[e.id]
                star[e.other(v)].discard(e.id)
            del verts[v], star[v]
            edges[new.id] = new
            order_e.append(new.id)
            star[a].add(new.id)
            star[b].add(new.id)
            changed = True
    md = dict(g.metadata)
    if len(verts) == 1 and not edges:
        md["degenerate"] = "single vertex"
    elif verts and all(deg(v) == 2 for v in verts):
        md["degenerate"] = "single cycle"
    vs = [verts[v] for v in order_v if v in verts]
    es = [edges[e] for e in order_e if e in edges]
    return WeightedMultigraph(vs, es, md)


def order_e_key(order_e: list):
    pos = {e: i for i, e in enumerate(order_e)}
    return lambda eid: pos.get(eid, len(pos))
