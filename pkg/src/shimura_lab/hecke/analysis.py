"""Constituents, mod-ell eigensystems, congruences and Hecke-ring indices."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Mapping, Sequence

from ..errors import UnsupportedError, ValidationError
from ..exactalg.finitefield import FqElem, factor_fq, gf, roots_fq
from ..exactalg.linalg import charpoly_berkowitz, det_rational, hnf_rows, kernel, matmul, solve_left, transpose
from ..exactalg.numberfield import NumberField
from ..exactalg.poly import UniPoly, format_poly
from ..exactalg.zfactor import factor_over_q
from .brandt import BrandtDataset

IntMatrix = list[list[int]]

CONGRUENCE_DEGREE_CAP = 24


# -- integral linear algebra -------------------------------------------------

def integer_kernel(m: Sequence[Sequence[int]]) -> IntMatrix:
    """Basis of the saturated lattice {x in Z^n : m x = 0}, as rows."""
    n = len(m[0]) if m else 0
    rows = len(m)
    aug = [[m[i][j] for i in range(rows)] + [1 if k == j else 0 for k in range(n)] for j in range(n)]
    red = hnf_rows(aug)
    # HNF also returns rows with nonzero leading part; only pure tails are kernel vectors
    out = [r[rows:] for r in red if not any(r[:rows])]
    # hnf_rows drops zero rows only, so the count is exact
    return out


def restrict(t: Sequence[Sequence[int]], basis: IntMatrix) -> IntMatrix:
    """Matrix of t on the invariant lattice spanned by the columns `basis` rows."""
    out = []
    for v in basis:
        tv = [sum(t[i][j] * v[j] for j in range(len(v))) for i in range(len(t))]
        c = solve_left([[Fraction(x) for x in b] for b in basis], [Fraction(x) for x in tv])
        if c is None or any(x.denominator != 1 for x in c):
            raise AssertionError("subspace is not invariant under the operator")
        out.append([int(x) for x in c])
    # out[i] holds the image of basis vector i; transpose to act on coordinates
    return transpose(out)


def _poly_matrix(poly: UniPoly, a: Sequence[Sequence[int]], power: int) -> IntMatrix:
    n = len(a)
    d = lcm(*(c.denominator for c in poly.coeffs))
    acc = [[0] * n for _ in range(n)]
    pw = [[int(i == j) for j in range(n)] for i in range(n)]
    for c in poly.coeffs:
        ci = int(c * d)
        acc = [[x + ci * y for x, y in zip(r, s)] for r, s in zip(acc, pw)]
        pw = matmul(pw, a)
    out = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(power):
        out = matmul(out, acc)
    return out


def _charpoly_int(m: Sequence[Sequence[int]]) -> UniPoly:
    return UniPoly(charpoly_berkowitz([[Fraction(x) for x in r] for r in m]))


# -- constituents -----------------------------------------------------------

@dataclass
class Constituent:
    label: str
    dimension: int
    basis: IntMatrix
    charpolys: dict[str, list[tuple[list[int], int]]]
    field_poly: list[int] | None = None
    al_sign: int | None = None
    restricted: dict[str, IntMatrix] = field(default_factory=dict, repr=False)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "dimension": self.dimension,
            "charpolys": {k: [{"factor": f, "multiplicity": e} for f, e in v] for k, v in self.charpolys.items()},
            "field_poly": self.field_poly,
            "al_sign": self.al_sign,
        }


def _primary_split(mats: dict[str, IntMatrix], basis: IntMatrix, key_order: list[str]) -> list[IntMatrix]:
    """Split the lattice spanned by `basis` until every operator has one irreducible factor."""
    for k in key_order:
        t = restrict(mats[k], basis)
        _, facs = factor_over_q(_charpoly_int(t))
        if len(facs) <= 1:
            continue
        parts = []
        for f, e in facs:
            ker = integer_kernel(_poly_matrix(f, t, e))
            # back to ambient coordinates
            parts.append([[sum(c * basis[i][j] for i, c in enumerate(v)) for j in range(len(basis[0]))] for v in ker])
        out = []
        for p in parts:
            out.extend(_primary_split(mats, p, key_order))
        return out
    return [basis]


def split_constituents(
    ds: BrandtDataset, seed: int = 0, al_label: str | None = None, labels: Sequence[str] | None = None
) -> list[Constituent]:
    """Simultaneous rational decomposition of the Hecke action.

    A random integer combination of the operators is split first; each block
    is then split again by any operator whose restriction still has two
    distinct irreducible factors, so the result does not depend on the draw.
    """
    keys = list(labels) if labels is not None else [k for k in ds.labels if k != al_label]
    if not keys:
        raise ValidationError("no Hecke operators to split by")
    mats = {k: [list(r) for r in ds.matrices[k]] for k in keys}
    n = ds.dimension
    rng = random.Random(seed)
    coeffs = {k: rng.randint(-9, 9) or 1 for k in keys}
    combo = [[sum(coeffs[k] * mats[k][i][j] for k in keys) for j in range(n)] for i in range(n)]
    mats_all = dict(mats, __combo__=combo)
    ident = [[int(i == j) for j in range(n)] for i in range(n)]
    blocks = _primary_split(mats_all, ident, ["__combo__"] + keys)

    out = []
    for basis in blocks:
        restricted = {k: restrict(mats[k], basis) for k in keys}
        cps = {}
        for k, t in restricted.items():
            _, facs = factor_over_q(_charpoly_int(t))
            cps[k] = [([int(c) for c in f.coeffs], e) for f, e in facs]
        _, cf = factor_over_q(_charpoly_int(restrict(combo, basis)))
        fpoly = [int(c) for c in cf[0][0].coeffs] if len(cf) == 1 else None
        # prefer a genuine operator whose eigenvalue already generates the field
        for k in keys:
            if fpoly and len(cps[k]) == 1 and len(cps[k][0][0]) == len(fpoly):
                fpoly = cps[k][0][0]
                break
        sign = None
        if al_label is not None:
            w = restrict([list(r) for r in ds.matrices[al_label]], basis)
            d = len(w)
            for s in (1, -1):
                if all(w[i][j] == (s if i == j else 0) for i in range(d) for j in range(d)):
                    sign = s
            if sign is None:
                raise ValidationError("Atkin-Lehner operator is not a scalar on a constituent")
        out.append(Constituent("", len(basis), basis, cps, fpoly, sign, restricted))
    out.sort(key=lambda c: (c.dimension, sorted((k, v) for k, v in c.charpolys.items())))
    for i, c in enumerate(out):
        c.label = f"c{i + 1}"
    return out


def constituent_dimensions(ds: BrandtDataset, **kw) -> list[int]:
    return sorted(c.dimension for c in split_constituents(ds, **kw))


# -- mod-ell eigensystems ---------------------------------------------------

@dataclass
class EigensystemModL:
    ell: int
    k: int
    values: dict[str, FqElem]
    multiplicity: int
    orbit: int = -1
    name: str = ""

    def serialized(self) -> tuple:
        return tuple((lab, self.values[lab].value) for lab in sorted(self.values))

    def frobenius(self, times: int = 1) -> tuple:
        return tuple((lab, self.values[lab].frobenius(times).value) for lab in sorted(self.values))

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "k": self.k,
            "values": {lab: str(v) for lab, v in sorted(self.values.items())},
            "multiplicity": self.multiplicity,
            "orbit": self.orbit,
            "name": self.name,
        }


@dataclass
class EigensystemReport:
    ell: int
    k: int
    systems: list[EigensystemModL]
    orbits: list[list[int]]
    semisimple: bool
    required_degree: int
    complete: bool
    per_constituent: dict[str, list[int]] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "k": self.k,
            "systems": [s.to_json() for s in self.systems],
            "orbits": self.orbits,
            "semisimple": self.semisimple,
            "required_degree": self.required_degree,
            "complete": self.complete,
            "per_constituent": self.per_constituent,
            "notes": self.notes,
        }


def _reduce_matrix(F, m) -> list[list[FqElem]]:
    return [[FqElem(F, F.from_int(int(x))) for x in r] for r in m]


def _eigensystems(mats: Mapping[str, IntMatrix], ell: int, k: int):
    F = gf(ell, k)
    keys = sorted(mats)
    n = len(next(iter(mats.values())))
    zero, one = FqElem(F, 0), FqElem(F, 1)
    needed = 1
    split_ok = True
    roots_by_key = {}
    for key in keys:
        cp = charpoly_berkowitz([[Fraction(x) for x in r] for r in mats[key]])
        red = [F.from_int(int(c)) for c in cp]
        for g, _ in factor_fq(gf(ell), [int(c) % ell for c in cp]):
            needed = lcm(needed, len(g) - 1)
        roots_by_key[key] = roots_fq(F, red)
    if k % needed:
        split_ok = False
    spaces = [([[one if i == j else zero for j in range(n)] for i in range(n)], {})]
    for key in keys:
        t = _reduce_matrix(F, mats[key])
        nxt = []
        for basis, assign in spaces:
            for r in roots_by_key[key]:
                lam = FqElem(F, r)
                shifted = [[t[i][j] - (lam if i == j else zero) for j in range(n)] for i in range(n)]
                ker = kernel(shifted, zero, one)
                common = _intersect(basis, ker, zero, one)
                if common:
                    nxt.append((common, dict(assign, **{key: lam})))
        spaces = nxt
    systems = [EigensystemModL(ell, k, assign, len(basis)) for basis, assign in spaces]
    total = sum(s.multiplicity for s in systems)
    return systems, needed, split_ok, total == n


def _intersect(a, b, zero, one):
    from ..exactalg.linalg import intersect_spaces

    return intersect_spaces(a, b, zero, one)


def _orbits(systems: list[EigensystemModL], ell: int, k: int) -> list[list[int]]:
    index = {s.serialized(): i for i, s in enumerate(systems)}
    seen, out = set(), []
    for i, s in enumerate(systems):
        if i in seen:
            continue
        orb = sorted({index[s.frobenius(t)] for t in range(k) if s.frobenius(t) in index})
        seen.update(orb)
        out.append(orb)
    return out


def mod_ell_eigensystems(
    ds: BrandtDataset | Mapping[str, IntMatrix],
    ell: int,
    k: int,
    constituents: Sequence[Constituent] | None = None,
    labels: Sequence[str] | None = None,
) -> EigensystemReport:
    """Simultaneous eigensystems of the operators reduced mod ell, over GF(ell^k).

    Multiplicity counts independent simultaneous eigenvectors. Frobenius
    orbits are numbered in lexicographic order of their first member, and
    the orbit representatives are named theta, theta', theta'', ...
    """
    if isinstance(ds, BrandtDataset):
        keys = list(labels) if labels is not None else ds.labels
        mats = {key: [list(r) for r in ds.matrices[key]] for key in keys}
    else:
        mats = {key: [list(r) for r in m] for key, m in ds.items()}
    systems, needed, split_ok, full = _eigensystems(mats, ell, k)
    systems.sort(key=lambda s: s.serialized())
    orbits = _orbits(systems, ell, k)
    orbits.sort(key=lambda o: systems[o[0]].serialized())
    for n_orb, orb in enumerate(orbits):
        for i in orb:
            systems[i].orbit = n_orb
            systems[i].name = "theta" + "'" * n_orb
    notes = []
    if not split_ok:
        notes.append(f"eigenvalues need GF({ell}^{needed}); enlarge k to a multiple of {needed}")
    if split_ok and not full:
        notes.append("non-semisimple: simultaneous eigenvectors do not span")
    per = {}
    if constituents:
        index = {s.serialized(): i for i, s in enumerate(systems)}
        for c in constituents:
            sub, _, _, _ = _eigensystems({key: c.restricted[key] for key in mats}, ell, k)
            per[c.label] = sorted({systems[index[s.serialized()]].orbit for s in sub if s.serialized() in index})
    return EigensystemReport(ell, k, systems, orbits, split_ok and full, needed, split_ok, per, notes)


# -- congruences ---------------------------------------------------------------

@dataclass(frozen=True)
class CongruenceVerdict:
    verdict: str  # "congruent", "not congruent" or "inconclusive"
    ell: int
    degree: int
    witness: dict = field(default_factory=dict)
    obstruction: str | None = None

    def __bool__(self) -> bool:
        return self.verdict == "congruent"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "ell": self.ell,
            "degree": self.degree,
            "witness": self.witness,
            "obstruction": self.obstruction,
            "scope": "per-label root agreement (a necessary condition)",
        }


def _as_charpoly(v) -> list[int]:
    if isinstance(v, int):
        return [-v, 1]
    coeffs = [int(c) for c in v]
    if len(coeffs) < 2:
        raise ValidationError("a characteristic polynomial needs degree >= 1")
    return coeffs


def congruence_detect(table_a: Mapping, table_b: Mapping, ell: int) -> CongruenceVerdict:
    """Do two eigenvalue tables agree mod ell at every prime label?

    Entries are integers or characteristic polynomials (low-to-high integer
    coefficients). Roots are compared in GF(ell^m) with m the lcm of all
    factor degrees mod ell, capped at 24.
    """
    if not table_a or not table_b:
        raise ValidationError("congruence tables must be non-empty")
    if set(table_a) != set(table_b):
        raise ValidationError("congruence tables cover different prime labels")
    polys = {lab: (_as_charpoly(table_a[lab]), _as_charpoly(table_b[lab])) for lab in table_a}
    base = gf(ell)
    m = 1
    for pa, pb in polys.values():
        for p in (pa, pb):
            red = [c % ell for c in p]
            if red[-1] == 0:
                raise ValidationError(f"leading coefficient vanishes mod {ell}")
            for g, _ in factor_fq(base, red):
                m = lcm(m, len(g) - 1)
    if m > CONGRUENCE_DEGREE_CAP:
        return CongruenceVerdict("inconclusive", ell, m, {}, f"needs GF({ell}^{m}) beyond the cap")
    F = gf(ell, m)
    witness = {}
    for lab in sorted(polys, key=str):
        pa, pb = polys[lab]
        ra = set(roots_fq(F, [F.from_int(c) for c in pa]))
        rb = set(roots_fq(F, [F.from_int(c) for c in pb]))
        common = sorted(ra & rb)
        if not common:
            return CongruenceVerdict("not congruent", ell, m, {}, f"no common root mod {ell} at {lab}")
        witness[str(lab)] = F.format(common[0])
    return CongruenceVerdict("congruent", ell, m, witness)


@dataclass
class CongruenceGraph:
    nodes: list[str]
    edges: list[tuple[str, str, int, str]] = field(default_factory=list)

    def add(self, a: str, b: str, ell: int, witness: str = "") -> None:
        for x in (a, b):
            if x not in self.nodes:
                raise ValidationError(f"unknown constituent {x!r}")
        self.edges.append((a, b, ell, witness))

    def add_clique(self, members: Sequence[str], ell: int, witness: str = "") -> None:
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                self.add(a, b, ell, witness)

    def to_json(self) -> dict:
        return {"nodes": self.nodes, "edges": [list(e) for e in self.edges]}


def connectivity(cg: CongruenceGraph) -> list[list[str]]:
    parent = {x: x for x in cg.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, _, _ in cg.edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    comps: dict[str, list[str]] = {}
    for x in cg.nodes:
        comps.setdefault(find(x), []).append(x)
    return sorted((sorted(c) for c in comps.values()), key=lambda c: (len(c), c))


# -- index of the Hecke ring in a maximal order ----------------------------------

@dataclass(frozen=True)
class IndexCertificate:
    generated_index: int | None
    labels: tuple[str, ...]
    statement: str


def order_index_divisor(
    field_poly: Sequence[int],
    eigenvalues: Mapping[str, Sequence],
    maximal_order_basis: Sequence[Sequence],
) -> IndexCertificate:
    """Index of the ring generated by the eigenvalues inside a maximal order.

    Eigenvalues and the order basis are coordinates on the power basis of
    Q[x]/(field_poly). The ring generated by finitely many eigenvalues sits
    inside the full Hecke ring, so its index d certifies that the true index
    divides d.
    """
    n = len(field_poly) - 1
    if n > 8:
        raise UnsupportedError("index certificates need a coefficient field of degree <= 8")
    K = NumberField(list(field_poly))
    gens = [K([Fraction(c) for c in v]) for v in eigenvalues.values()]
    ring = [K.one()] + gens
    lattice = _hnf_basis([list(x.coords) for x in ring])
    while True:
        elems = [K(v) for v in lattice]
        prods = [list((a * b).coords) for a in elems for b in elems]
        new = _hnf_basis(lattice + prods)
        if new == lattice:
            break
        lattice = new
    labels = tuple(sorted(eigenvalues, key=str))
    if len(lattice) < n:
        return IndexCertificate(None, labels, "eigenvalues generate a ring of lower rank; no bound")
    Ob = [[Fraction(c) for c in r] for r in maximal_order_basis]
    for v in lattice:
        c = solve_left(Ob, v)
        if c is None or any(x.denominator != 1 for x in c):
            raise ValidationError("generated ring is not contained in the supplied order")
    index = abs(det_rational(lattice) / det_rational(Ob))
    if index.denominator != 1:
        raise AssertionError("non-integral lattice index")
    d = int(index)
    return IndexCertificate(d, labels, f"[O : T] divides {d} (ring generated by labels {', '.join(labels)})")


def _hnf_basis(rows: list[list]) -> list[list[Fraction]]:
    rows = [[Fraction(c) for c in r] for r in rows]
    d = lcm(*(c.denominator for r in rows for c in r))
    red = hnf_rows([[int(c * d) for c in r] for r in rows])
    return [[Fraction(c, d) for c in r] for r in red]


def describe_poly(coeffs: Sequence[int]) -> str:
    return format_poly(coeffs)
