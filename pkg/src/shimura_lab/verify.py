"""The acceptance ledger: numbered checks against reference and derived values."""
from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .census import frobenius_group_cycle_types, harbater_frobenius
from .dualgraph import (
    Edge,
    Vertex,
    WeightedMultigraph,
    admissible_analysis,
    atkin_lehner_swap,
    automorphism_group,
    betti,
    betti_report,
    build_double,
    group_structure,
    quotient_by,
    stabilize,
)
from .dualgraph.permgroup import PermGroup
from .errors import ShimuraLabError
from .exactalg.numberfield import NumberField, split_prime
from .exactalg.zeta import zeta_at_2
from .fixtures import Fixtures
from .fuchsian import (
    Signature,
    borel_volume,
    elliptic_count,
    elliptic_orders_scan,
    hyperelliptic_certificate,
    solve_genus,
    weierstrass_report,
)
from .hecke import (
    BrandtDataset,
    CongruenceGraph,
    SUPPORTED_PRIMES,
    brandt_over_Q,
    congruence_detect,
    connectivity,
    mod_ell_eigensystems,
    order_index_divisor,
    split_constituents,
)
from .quatarith import PrimeRecord

VOLUME_RTOL = 1e-3
TRIANGLE_TOL = 1e-6


@dataclass
class CheckResult:
    cid: str
    title: str
    status: str  # PASS, FAIL or SKIP
    detail: str

    def line(self) -> str:
        return f"[{self.status}] {self.cid:>3}  {self.title}: {self.detail}"

    def to_json(self) -> dict:
        return {"id": self.cid, "title": self.title, "status": self.status, "detail": self.detail}


def _result(cid: str, title: str, ok: bool, detail: str) -> CheckResult:
    return CheckResult(cid, title, "PASS" if ok else "FAIL", detail)


# -- random graphs shared with the property tests ------------------------------

def random_connected_graph(rng: random.Random, n: int, extra: int, weights=(1, 2, 3), loops: bool = True):
    vs = [Vertex(i, rng.choice(weights)) for i in range(n)]
    es = []
    for i in range(1, n):
        es.append(Edge(len(es), rng.randrange(i), i, rng.choice(weights)))
    for _ in range(extra):
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v and not loops:
            continue
        es.append(Edge(len(es), u, v, rng.choice(weights)))
    return WeightedMultigraph(vs, es)


def random_symmetric_graph(rng: random.Random, n: int, extra: int, weights=(1, 2, 3)):
    """A connected graph invariant under a random involution, and that involution."""
    perm = list(range(n))
    pts = list(range(n))
    rng.shuffle(pts)
    for a, b in zip(pts[0::2][: rng.randint(0, n // 2)], pts[1::2]):
        perm[a], perm[b] = b, a
    vw = {}
    for i in range(n):
        vw.setdefault(min(i, perm[i]), rng.choice(weights))
    vs = [Vertex(i, vw[min(i, perm[i])]) for i in range(n)]
    pairs: list[tuple[int, int, int]] = []

    def add_orbit(u, v, w):
        pairs.append((u, v, w))
        if {perm[u], perm[v]} != {u, v}:
            pairs.append((perm[u], perm[v], w))

    for _ in range(extra):
        add_orbit(rng.randrange(n), rng.randrange(n), rng.choice(weights))
    # join components with further orbits until connected
    while True:
        g = WeightedMultigraph(vs, [Edge(k, u, v, w) for k, (u, v, w) in enumerate(pairs)])
        comps = g.components()
        if len(comps) == 1:
            return g, tuple(perm)
        add_orbit(comps[0][0], comps[1][0], rng.choice(weights))


def brute_force_automorphism_count(g: WeightedMultigraph) -> int:
    """Count vertex permutations preserving vertex weights and the weighted edge multiset."""
    ids = [v.id for v in g.vertices]
    weight = {v.id: v.w for v in g.vertices}
    target = Counter((frozenset((e.u, e.v)), e.w) for e in g.edges)
    count = 0
    for image in itertools.permutations(ids):
        sigma = dict(zip(ids, image))
        if any(weight[a] != weight[b] for a, b in sigma.items()):
            continue
        moved = Counter((frozenset((sigma[e.u], sigma[e.v])), e.w) for e in g.edges)
        if moved == target:
            count += 1
    return count


# -- individual checks ---------------------------------------------------------

def check_scan(fx: Fixtures) -> CheckResult:
    F = fx.base_field()
    got = elliptic_orders_scan(F, fx.ramified_primes("D"), q_max=64)
    return _result("1", "elliptic-order scan over F", got == [3, 4, 6, 8, 16, 32], f"q in {got}")


def check_elliptic_counts(fx: Fixtures) -> CheckResult:
    recs, S = fx.cm_records(), fx.ramified_primes("D")
    got = {q: elliptic_count(q, recs, S) for q in (2, 3, 32)}
    return _result("2", "elliptic counts", got == {2: 17, 3: 9, 32: 1}, f"e_q = {got}")


def check_genus_solve(fx: Fixtures) -> CheckResult:
    g1 = solve_genus(Fraction(1455, 32), {2: 17, 3: 9, 32: 1})
    g2 = solve_genus(Fraction(2910, 32), {3: 18, 16: 1})
    return _result("3", "signature solve", (g1, g2) == (16, 40), f"g = {g1} and {g2}")


def check_double_cover(fx: Fixtures) -> CheckResult:
    big = Signature.parse("(40; 3^18, 16^1)").vol_over_2pi()
    small = Signature.parse("(16; 2^17, 3^9, 32^1)").vol_over_2pi()
    return _result("4", "double-cover volume identity", big == 2 * small, f"{big} = 2 x {small}")


def check_borel_volume(fx: Fixtures, prime_bound: int = 10**6) -> CheckResult:
    F = fx.base_field()
    S = fx.ramified_primes("D")
    z = zeta_at_2(F, prime_bound)
    target = Fraction(1455, 32)
    closing = []
    for k in range(0, 2 * F.degree + 1):
        v = borel_volume(F, S, 2**k, z)
        rel = abs(float(v.vol_over_2pi) - float(target)) / float(target)
        if rel <= VOLUME_RTOL:
            closing.append((2**k, float(v.vol_over_2pi), rel))
    if not closing:
        return _result("5", "Borel volume", False, "no power-of-2 index closes vol/2pi = 1455/32")
    idx, val, rel = closing[0]
    return _result(
        "5", "Borel volume", True,
        f"zeta_F(2) = {z.value:.10f} (+-{z.error_bound:.1e}); [H:F^x2] = {idx}; vol/2pi = {val:.6f}, rel err {rel:.1e}",
    )


def check_weierstrass(fx: Fixtures) -> CheckResult:
    rep = weierstrass_report(16)
    cert = hyperelliptic_certificate(16, 17, 34)
    ok = (rep.min_count, rep.max_count, rep.weight_budget) == (34, 4080, 4080) and str(cert) == "hyperelliptic, #W = 34"
    return _result("6", "Weierstrass arithmetic", ok,
                   f"({rep.min_count}, {rep.max_count}, {rep.weight_budget}); {cert}")


def check_triangle(fx: Fixtures, prime_bound: int = 10**6) -> CheckResult:
    Q = NumberField([0, 1], name="Q")
    S = [PrimeRecord(2), PrimeRecord(3)]
    v = borel_volume(Q, S, None, zeta_at_2(Q, prime_bound))
    err = abs(float(v.vol_over_2pi) - 1 / 12)
    g = solve_genus(Fraction(1, 12), [2, 4, 6])
    return _result("7", "triangle-group oracle", err <= TRIANGLE_TOL and g == 0,
                   f"vol/2pi = {float(v.vol_over_2pi):.9f} (|err| {err:.1e}, index {v.index_H}); genus {g}")


def check_graph_properties(fx: Fixtures, n_random: int = 500, n_aut: int = 200, seed: int = 2024) -> CheckResult:
    rng = random.Random(seed)
    problems = []
    for t in range(n_random):
        g, inv = random_symmetric_graph(rng, rng.randint(2, 9), rng.randint(0, 10))
        q = quotient_by(g, PermGroup(g.n_vertices, [inv]))
        fresh = WeightedMultigraph.from_json(q.to_json())
        if betti_report(q).total != sum(1 + len([e for e in fresh.edges if e.u in set(c)]) - len(c)
                                        for c in fresh.components()):
            problems.append(f"quotient betti drift #{t}")
        h = random_connected_graph(rng, rng.randint(1, 10), rng.randint(0, 8))
        s = stabilize(h)
        if betti(s) != betti(h):
            problems.append(f"stabilize changed betti #{t}")
        if stabilize(s) != s:
            problems.append(f"stabilize not idempotent #{t}")
    for t in range(n_aut):
        h = random_connected_graph(rng, rng.randint(1, 8), rng.randint(0, 6))
        if automorphism_group(h).order() != brute_force_automorphism_count(h):
            problems.append(f"automorphism mismatch #{t}")
    for p in SUPPORTED_PRIMES:
        ds = brandt_over_Q(p)
        for lab in ds.labels:
            g = build_double(ds, lab)
            if quotient_by(g, atkin_lehner_swap(g)).n_vertices * 2 != g.n_vertices:
                problems.append(f"swap quotient p={p} q={lab}")
    return _result("8", "graph engine properties", not problems,
                   "; ".join(problems[:5]) if problems else
                   f"{n_random} quotient/stabilize cases, {n_aut} brute-force automorphism cases, all Brandt doubles")


def check_brandt_oracle(fx: Fixtures) -> list[CheckResult]:
    d2, d11 = brandt_over_Q(2), brandt_over_Q(11)
    out = [_result("9a", "Brandt oracle p=2", d2.dimension == 1 and d2.weights == (12,),
                   f"{d2.dimension} class, weights {list(d2.weights)}")]
    mass = sum(Fraction(1, w) for w in d11.weights)
    out.append(_result("9b", "Brandt oracle p=11", sorted(d11.weights) == [4, 6] and mass == Fraction(10, 24),
                       f"weights {sorted(d11.weights)} (unit groups mod +-1), mass {mass}; expected [4, 6] and 10/24"))
    bad = []
    for p in SUPPORTED_PRIMES:
        ds = brandt_over_Q(p)
        for lab in ds.labels:
            q = ds.prime_norm(lab)
            if any(sum(r) != q + 1 for r in ds.matrices[lab]):
                bad.append(f"p={p}, q={q}")
    out.append(_result("9c", "Brandt row sums", not bad, "all T_q rows sum to q+1" if not bad else ", ".join(bad)))
    return out


def check_splitting(fx: Fixtures) -> CheckResult:
    Lf, Kh, F = fx.field("L_f"), fx.field("K_h"), fx.base_field()
    cases = {
        "(L_f,2) inert": split_prime(Lf, 2).is_inert(),
        "(L_f,5) totally ramified": split_prime(Lf, 5).is_totally_ramified(),
        "(L_f,3) e=f=2": [(P.e, P.f) for P in split_prime(Lf, 3).primes] == [(2, 2)],
        "(K_h,2) totally ramified": split_prime(Kh, 2).is_totally_ramified(),
        "(F,2) totally ramified": split_prime(F, 2).is_totally_ramified(),
    }
    failed = [k for k, v in cases.items() if not v]
    return _result("10", "prime splitting", not failed, "all five" if not failed else "failed: " + ", ".join(failed))


def check_congruences(fx: Fixtures) -> CheckResult:
    a = {"2": 3, "3": -1, "5": 7}
    b = {k: v + 5 for k, v in a.items()}
    ok = (
        congruence_detect(a, a, 5).verdict == "congruent"
        and congruence_detect(a, b, 5).verdict == "congruent"
        and congruence_detect(a, b, 3).verdict == "not congruent"
    )
    data = fx.load("al_signs.json")
    cg = CongruenceGraph([c["label"] for c in data["constituents"]])
    for c in data["congruences"]:
        cg.add_clique(c["members"], c["ell"])
    comps = connectivity(cg)
    empty = connectivity(CongruenceGraph(list(cg.nodes)))
    ok = ok and len(comps) == 1 and len(empty) == 5
    return _result("11", "congruence and connectivity", ok, f"{len(comps)} component(s); {len(empty)} without edges")


def check_external(fx: Fixtures) -> list[CheckResult]:
    title = "dual graph and Hecke data over F"
    if not fx.has("brandt.json"):
        return [CheckResult("12", title, "SKIP", "external brandt.json not supplied")]
    claims = fx.load("dual_graph_claims.json")
    out = []
    try:
        ds = BrandtDataset.from_json(fx.load("brandt.json"))
        label = ds.labels[0]
        g = build_double(ds, label)
        gq = quotient_by(g, atkin_lehner_swap(g))
        gst = stabilize(gq)
        counts = ((gq.n_vertices, gq.n_edges, betti(gq)), (gst.n_vertices, gst.n_edges, betti(gst)))
        want = ((58, 73, 16), (30, 45, 16))
        out.append(_result("12a", "graph counts", counts == want, f"G' {counts[0]}, G_st {counts[1]}"))
        A = automorphism_group(gq)
        rep = group_structure(A)
        Ast = automorphism_group(gst)
        out.append(_result(
            "12b", "automorphism group",
            rep.order == 64 and rep.involutions == 19 and Ast.order() == rep.order
            and rep.description == claims["automorphisms"]["structure"],
            f"order {rep.order}, {rep.involutions} involutions, {rep.description}; |Aut(G_st)| = {Ast.order()}",
        ))
        adm = admissible_analysis(gq, A)
        supports = sorted(e.vertex_support for e in adm.admissible_involutions)
        out.append(_result(
            "12c", "admissible involutions",
            supports == [28] * 4 and adm.max_admissible_exponent_two_order == 2 and not adm.group_admissible,
            f"admissible supports {supports}, max admissible exponent-2 order "
            f"{adm.max_admissible_exponent_two_order}, whole group admissible: {adm.group_admissible}",
        ))
        dims = sorted(c.dimension for c in split_constituents(ds))
        want_dims = claims["constituent_dimensions"]
        has = not (Counter(want_dims) - Counter(dims))
        out.append(_result("12d", "constituent dimensions", has, f"dimensions {dims}"))
        rep2 = mod_ell_eigensystems(ds, 2, 4)
        mult_one = all(s.multiplicity == 1 for s in rep2.systems)
        out.append(_result("12e", "mod-2 eigensystems", len(rep2.orbits) >= 2 and mult_one,
                           f"{len(rep2.orbits)} Frobenius classes over GF(16)"))
    except ShimuraLabError as exc:
        out.append(CheckResult("12", title, "FAIL", f"external data rejected: {exc}"))
    if fx.has("eigendata.json"):
        ed = fx.load("eigendata.json")
        g_rec = next((c for c in ed.get("constituents", []) if c.get("label") == "g"), None)
        if g_rec and "eigenvalues" in g_rec and "maximal_order_basis" in g_rec:
            cert = order_index_divisor(g_rec["field_poly"], g_rec["eigenvalues"], g_rec["maximal_order_basis"])
            out.append(_result("12f", "index [O_Lg : T_g]", cert.generated_index == 1, cert.statement))
        else:
            out.append(CheckResult("12f", "index [O_Lg : T_g]", "SKIP", "eigendata lacks g eigenvalues in coordinates"))
    else:
        out.append(CheckResult("12f", "index [O_Lg : T_g]", "SKIP", "external eigendata.json not supplied"))
    return out


def check_census(fx: Fixtures, prime_bound: int = 10**4) -> CheckResult:
    data = fx.load("harbater.json")
    allowed = {tuple(sorted(a)) for a in data["allowed_patterns"]}
    derived = frobenius_group_cycle_types(17)
    rep = harbater_frobenius(data["poly"], prime_bound, allowed)
    ok = allowed == derived and rep.all_allowed and rep.patterns.get("17", 0) > 0
    return _result("13", "Harbater census", ok,
                   f"patterns {dict(sorted(rep.patterns.items()))}; skipped {sorted(rep.skipped)}")


CHECKS: list[tuple[str, Callable]] = [
    ("1", check_scan), ("2", check_elliptic_counts), ("3", check_genus_solve), ("4", check_double_cover),
    ("5", check_borel_volume), ("6", check_weierstrass), ("7", check_triangle), ("8", check_graph_properties),
    ("9", check_brandt_oracle), ("10", check_splitting), ("11", check_congruences), ("12", check_external),
    ("13", check_census),
]


def run_all(fx: Fixtures | None = None, only: set[str] | None = None) -> list[CheckResult]:
    fx = fx or Fixtures()
    out: list[CheckResult] = []
    for cid, fn in CHECKS:
        if only and cid not in only:
            continue
        try:
            res = fn(fx)
        except ShimuraLabError as exc:
            res = CheckResult(cid, fn.__name__, "FAIL", f"error: {exc}")
        out.extend(res if isinstance(res, list) else [res])
    return out
