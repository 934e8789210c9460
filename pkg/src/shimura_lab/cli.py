"""Command-line front end: `shimura-lab <group> <command> [options]`."""
from __future__ import annotations

import argparse
import contextlib
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import __version__
from .census import harbater_frobenius
from .dualgraph import (
    WeightedMultigraph,
    admissible_analysis,
    atkin_lehner_swap,
    automorphism_group,
    betti_report,
    build_double,
    group_structure,
    quotient_by,
    stabilize,
)
from .errors import ShimuraLabError, ValidationError
from .exactalg.numberfield import field_from_json, split_prime
from .exactalg.zeta import zeta_at_2
from .fixtures import Fixtures
from .fuchsian import (
    CMOrderRecord,
    Signature,
    borel_volume,
    elliptic_orders_scan,
    hyperelliptic_certificate,
    signature_of_maximal_group,
    solve_genus,
    weierstrass_report,
)
from .hecke import (
    BrandtDataset,
    CongruenceGraph,
    brandt_over_Q,
    congruence_detect,
    connectivity,
    mod_ell_eigensystems,
    split_constituents,
)
from .quatarith import atkin_lehner_ranks, quaternion_from_json, validate_ramification

EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class Outcome:
    """What a command produced: a JSON payload, human text, and manifest extras."""

    def __init__(self, payload, text: str, assumptions: list[str] | None = None):
        self.payload = payload
        self.text = text
        self.assumptions = assumptions or []


class Context:
    def __init__(self, args):
        self.fixtures = Fixtures(args.fixtures)
        self.inputs: dict[str, str] = {}

    def read_json(self, path: str | None, fallback: str | None = None):
        """Load a user file, or the named fixture when no path is given."""
        if path is None:
            if fallback is None:
                raise ValidationError("an input file is required")
            self.inputs[f"fixture:{fallback}"] = self.fixtures.digest(fallback)
            return self.fixtures.load(fallback)
        p = Path(path)
        try:
            raw = p.read_bytes()
        except OSError as exc:
            raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc
        self.inputs[path] = hashlib.sha256(raw).hexdigest()
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from exc

    def field(self, path):
        return field_from_json(self.read_json(path, "F.json"))

    def quaternion(self, qpath, fpath):
        nf = self.field(fpath)
        return quaternion_from_json(self.read_json(qpath, "D.json"), nf)

    def graph(self, path):
        data = self.read_json(path)
        # accept the --json envelope of another command
        if isinstance(data, dict) and "manifest" in data and "result" in data:
            data = data["result"]
        if isinstance(data, dict) and "graph" in data and "vertices" not in data:
            data = data["graph"]
        return WeightedMultigraph.from_json(data)

    def brandt(self, path, overq: int | None):
        if overq is not None:
            return brandt_over_Q(overq)
        if path is None and not self.fixtures.has("brandt.json"):
            raise ValidationError("no Brandt data: pass --brandt FILE or --over-q P")
        return BrandtDataset.from_json(self.read_json(path, "brandt.json"))


def _table(rows: list[tuple]) -> str:
    if not rows:
        return ""
    width = max(len(str(r[0])) for r in rows)
    return "\n".join(f"{str(k):<{width}}  {v}" for k, v in rows)


# -- nf ------------------------------------------------------------------------

def cmd_nf_info(ctx: Context, a) -> Outcome:
    nf = ctx.field(a.file)
    r1, r2 = nf.signature
    out = {"name": nf.name, "degree": nf.degree, "signature": [r1, r2], "discriminant": nf.discriminant}
    rows = [("name", nf.name or "-"), ("degree", nf.degree), ("signature", f"({r1}, {r2})"),
            ("discriminant", nf.discriminant)]
    splits = {}
    for p in a.prime or []:
        s = split_prime(nf, p)
        splits[str(p)] = [[e, f] for e, f in s.factors]
        rows.append((f"p = {p}", s.describe()))
    if splits:
        out["splitting"] = splits
    return Outcome(out, _table(rows))


def cmd_nf_zeta(ctx: Context, a) -> Outcome:
    nf = ctx.field(a.file)
    z = zeta_at_2(nf, a.bound)
    return Outcome({"zeta_2": z.value, "error_bound": z.error_bound, "prime_bound": a.bound},
                   f"zeta(2) = {z.value:.12f}  (+- {z.error_bound:.2e}, primes <= {a.bound})")


def cmd_nf_census(ctx: Context, a) -> Outcome:
    data = ctx.read_json(a.file, "harbater.json")
    rep = harbater_frobenius(data["poly"], a.bound, data.get("allowed_patterns"))
    rows = [(lab, n) for lab, n in sorted(rep.patterns.items())]
    rows.append(("skipped", ", ".join(f"{p} ({why})" for p, why in sorted(rep.skipped.items())) or "none"))
    if rep.allowed:
        rows.append(("all allowed", "yes" if rep.all_allowed else f"no: {rep.outside}"))
    return Outcome(rep.to_json(), _table(rows))


# -- quat ----------------------------------------------------------------------

def cmd_quat_validate(ctx: Context, a) -> Outcome:
    q = ctx.quaternion(a.file, a.field)
    rep = validate_ramification(q)
    lines = [f"parity: {rep.parity_total} ramified places (even)",
             f"real ramification: {list(rep.real_computed)} (matches)"]
    lines += [f"{c['prime']}: Hilbert symbol {c['symbol']:+d}" for c in rep.odd_checks]
    lines += rep.notes
    return Outcome(rep.to_json(), "\n".join(lines), [f"trusted ramification at {t}" for t in rep.trusted])


def cmd_quat_ranks(ctx: Context, a) -> Outcome:
    q = ctx.quaternion(a.file, a.field)
    r = atkin_lehner_ranks(q, a.narrow_class_number_one)
    out = {"r": r.r, "s": r.s, "r_plus": r.r_plus, "s_bound": r.s_bound, "assumption": r.assumption}
    return Outcome(out, _table([("r", r.r), ("s", r.s), ("r_+", r.r_plus), ("s bound", r.s_bound)]),
                   ["narrow class number one (flag)", r.assumption])


# -- fuchsian ------------------------------------------------------------------

def cmd_fuchsian_signature(ctx: Context, a) -> Outcome:
    nf = ctx.field(a.field)
    q = ctx.quaternion(a.quat, a.field)
    recs = [CMOrderRecord.from_json(r) for r in ctx.read_json(a.cm, "cm_orders.json")["records"]]
    S = list(q.ramified_finite)
    rep = signature_of_maximal_group(nf, S, recs, a.index_h, a.bound)
    if a.group == "maximal":
        return Outcome(rep.to_json(), f"{rep.signature}\nvol/2pi = {rep.exact_volume}", rep.assumptions)
    unit = ctx.read_json(a.unit_data, "signatures.json")["unit_group"]
    sig = Signature.parse(unit["signature"])
    stated = Fraction(unit["vol_over_2pi"])
    if sig.vol_over_2pi() != stated:
        raise ValidationError(f"unit-group signature {sig} has vol/2pi {sig.vol_over_2pi()}, not {stated}")
    ratio = sig.vol_over_2pi() / rep.exact_volume
    out = {"signature": str(sig), "vol_over_2pi": str(stated), "cover_degree": str(ratio),
           "maximal_group": rep.to_json()}
    assumptions = rep.assumptions + [f"unit-group signature taken as input ({unit.get('provenance', '')})"]
    return Outcome(out, f"{sig}\nvol/2pi = {stated} = {ratio} x vol(maximal)", assumptions)


def cmd_fuchsian_scan(ctx: Context, a) -> Outcome:
    nf = ctx.field(a.field)
    q = ctx.quaternion(a.quat, a.field)
    got = elliptic_orders_scan(nf, list(q.ramified_finite), q_max=a.q_max)
    return Outcome({"q_max": a.q_max, "orders": got}, "possible elliptic orders: " + ", ".join(map(str, got)))


def cmd_fuchsian_weierstrass(ctx: Context, a) -> Outcome:
    rep = weierstrass_report(a.genus)
    out = rep.to_json()
    text = _table([("min #W", rep.min_count), ("max #W", rep.max_count), ("weight budget", rep.weight_budget)])
    if a.cm_count is not None and a.galois_degree is not None:
        cert = hyperelliptic_certificate(a.genus, a.cm_count, a.galois_degree)
        out["certificate"] = cert.to_json()
        out["verdict"] = str(cert)
        text += "\n" + str(cert)
    return Outcome(out, text)


def cmd_fuchsian_genus(ctx: Context, a) -> Outcome:
    vol = Fraction(a.vol)
    ell = Signature.parse(f"(0; {a.elliptic})").elliptic if a.elliptic else ()
    g = solve_genus(vol, dict(ell))
    sig = Signature(g, ell)
    return Outcome({"genus": g, "signature": str(sig)}, str(sig))


def cmd_fuchsian_volume(ctx: Context, a) -> Outcome:
    nf = ctx.field(a.field)
    q = ctx.quaternion(a.quat, a.field)
    v = borel_volume(nf, list(q.ramified_finite), a.index_h, prime_bound=a.bound)
    return Outcome(v.to_json(), f"vol/2pi = {float(v.vol_over_2pi):.9f} (+- {v.error_bound:.2e}), [H:F^x2] = {v.index_H}",
                   [f"[H:F^x2] = {v.index_H}"])


# -- graph ---------------------------------------------------------------------

def _graph_outcome(g: WeightedMultigraph) -> Outcome:
    b = betti_report(g)
    return Outcome(g.to_json(), f"{g.n_vertices} vertices, {g.n_edges} edges, betti {b.total}")


def cmd_graph_build(ctx: Context, a) -> Outcome:
    ds = ctx.brandt(a.brandt, a.over_q)
    label = a.label or ds.labels[0]
    return _graph_outcome(build_double(ds, label))


def cmd_graph_quotient(ctx: Context, a) -> Outcome:
    g = ctx.graph(a.input)
    group = atkin_lehner_swap(g) if a.by == "swap" else automorphism_group(g)
    q = quotient_by(g, group)
    return _graph_outcome(q)


def cmd_graph_stabilize(ctx: Context, a) -> Outcome:
    return _graph_outcome(stabilize(ctx.graph(a.input)))


def cmd_graph_betti(ctx: Context, a) -> Outcome:
    rep = betti_report(ctx.graph(a.input))
    out = {"betti": rep.total, "components": list(rep.components)}
    return Outcome(out, str(rep.total))


def cmd_graph_aut(ctx: Context, a) -> Outcome:
    g = ctx.graph(a.input)
    rep = group_structure(automorphism_group(g))
    return Outcome(rep.to_json(), _table([("order", rep.order), ("involutions", rep.involutions),
                                          ("structure", rep.description)]))


def cmd_graph_admissible(ctx: Context, a) -> Outcome:
    g = ctx.graph(a.input)
    rep = admissible_analysis(g, automorphism_group(g))
    rows = [("admissible involutions", len(rep.admissible_involutions)),
            ("supports", [e.vertex_support for e in rep.admissible_involutions]),
            ("max admissible (Z/2)^k order", rep.max_admissible_exponent_two_order),
            ("whole group admissible", rep.group_admissible)]
    return Outcome(rep.to_json(), _table(rows))


def cmd_graph_export(ctx: Context, a) -> Outcome:
    g = ctx.graph(a.input)
    if a.dot:
        return Outcome({"dot": g.to_dot()}, g.to_dot().rstrip("\n"))
    return _graph_outcome(g)


# -- hecke ---------------------------------------------------------------------

def cmd_hecke_split(ctx: Context, a) -> Outcome:
    ds = ctx.brandt(a.brandt, a.over_q)
    cons = split_constituents(ds, seed=a.seed)
    rows = [(c.label, f"dim {c.dimension}" + (f", AL {c.al_sign:+d}" if c.al_sign else "")) for c in cons]
    return Outcome({"constituents": [c.to_json() for c in cons]}, _table(rows))


def cmd_hecke_eigensystems(ctx: Context, a) -> Outcome:
    ds = ctx.brandt(a.brandt, a.over_q)
    rep = mod_ell_eigensystems(ds, a.ell, a.deg)
    lines = []
    for s in rep.systems:
        vals = ", ".join(f"T{lab}={v}" for lab, v in s.to_json()["values"].items())
        lines.append(f"{s.name}: {vals} (multiplicity {s.multiplicity})")
    lines += rep.notes
    return Outcome(rep.to_json(), "\n".join(lines))


def _charpoly_table(ctx: Context, ref: str, eigen: str | None) -> dict:
    p = Path(ref)
    if p.suffix == ".json" and p.exists():
        data = ctx.read_json(ref)
        return data.get("charpolys", data)
    ed = ctx.read_json(eigen, "eigendata.json")
    for c in ed.get("constituents", []):
        if c.get("label") == ref:
            return c["charpolys"]
    raise ValidationError(f"no constituent {ref!r} in eigendata")


def cmd_hecke_congruence(ctx: Context, a) -> Outcome:
    ta = _charpoly_table(ctx, a.a, a.eigen)
    tb = _charpoly_table(ctx, a.b, a.eigen)
    v = congruence_detect(ta, tb, a.ell)
    return Outcome(v.to_json(), f"{v.verdict} mod {a.ell}" + (f": {v.obstruction}" if v.obstruction else ""))


def cmd_hecke_connect(ctx: Context, a) -> Outcome:
    data = ctx.read_json(a.file, "al_signs.json")
    cg = CongruenceGraph([c["label"] for c in data["constituents"]])
    for c in data.get("congruences", []):
        cg.add_clique(c["members"], c["ell"])
    comps = connectivity(cg)
    return Outcome({"components": comps, "connected": len(comps) == 1},
                   f"{len(comps)} component(s): " + "; ".join("{" + ", ".join(c) + "}" for c in comps))


def cmd_hecke_overq(ctx: Context, a) -> Outcome:
    ds = brandt_over_Q(a.p)
    rows = [("classes", ds.dimension), ("weights", list(ds.weights))]
    rows += [(f"T_{lab}", ds.matrices[lab]) for lab in ds.labels]
    return Outcome(ds.to_json(), _table(rows))


# -- paper ---------------------------------------------------------------------

def cmd_paper_verify(ctx: Context, a) -> Outcome:
    from .verify import run_all

    only = set(a.only.split(",")) if a.only else None
    results = run_all(ctx.fixtures, only)
    ctx.inputs.update({f"fixture:{n}": ctx.fixtures.digest(n) for n in _fixture_names(ctx.fixtures)})
    text = "\n".join(r.line() for r in results)
    counts = {s: sum(r.status == s for r in results) for s in ("PASS", "FAIL", "SKIP")}
    text += f"\n{counts['PASS']} passed, {counts['FAIL']} failed, {counts['SKIP']} skipped"
    return Outcome({"results": [r.to_json() for r in results], "counts": counts}, text)


def _fixture_names(fx: Fixtures) -> list[str]:
    from .fixtures import EXTERNAL, SHIPPED

    return [n for n in SHIPPED + EXTERNAL if fx.has(n)]


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    common.add_argument("--fixtures", metavar="DIR", default=argparse.SUPPRESS, help="override fixture directory")

    root = _Parser(prog="shimura-lab", description=__doc__)
    root.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    root.add_argument("--json", action="store_true", default=False, help="machine-readable output")
    root.add_argument("--fixtures", metavar="DIR", default=None, help="override fixture directory")
    groups = root.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def add(group, name: str, fn: Callable, help: str):
        p = group.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=fn)
        return p

    def field_opts(p):
        p.add_argument("--field", metavar="FILE", help="base field JSON (default: shipped F)")
        p.add_argument("--quat", metavar="FILE", help="quaternion algebra JSON (default: shipped D)")

    def brandt_opts(p):
        p.add_argument("--brandt", metavar="FILE", help="Brandt dataset JSON (default: fixture brandt.json)")
        p.add_argument("--over-q", type=int, metavar="P", help="use the computed definite algebra over Q of discriminant P")

    nf = groups.add_parser("nf", help="number fields").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = add(nf, "info", cmd_nf_info, "degree, signature, discriminant, splitting")
    p.add_argument("file", nargs="?")
    p.add_argument("--prime", type=int, action="append", help="prime to decompose (repeatable)")
    p = add(nf, "split", cmd_nf_info, "decompose primes")
    p.add_argument("file", nargs="?")
    p.add_argument("--prime", type=int, action="append", required=True)
    p = add(nf, "zeta", cmd_nf_zeta, "Dedekind zeta at s = 2")
    p.add_argument("file", nargs="?")
    p.add_argument("--bound", type=int, default=10**6)
    p = add(nf, "census", cmd_nf_census, "Frobenius cycle-type census of a polynomial")
    p.add_argument("file", nargs="?")
    p.add_argument("--bound", type=int, default=10**4)

    qa = groups.add_parser("quat", help="quaternion algebras").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = add(qa, "validate", cmd_quat_validate, "check the ramification data")
    p.add_argument("file", nargs="?")
    p.add_argument("--field", metavar="FILE")
    p = add(qa, "ranks", cmd_quat_ranks, "Atkin-Lehner group ranks")
    p.add_argument("file", nargs="?")
    p.add_argument("--field", metavar="FILE")
    p.add_argument("--narrow-class-number-one", action="store_true")

    fu = groups.add_parser("fuchsian", help="Fuchsian group signatures").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    p = add(fu, "signature", cmd_fuchsian_signature, "signature and volume ledger")
    field_opts(p)
    p.add_argument("--cm", metavar="FILE", help="CM order records (default: shipped)")
    p.add_argument("--group", choices=("maximal", "unit"), default="maximal")
    p.add_argument("--unit-data", metavar="FILE", help="unit-group signature input (default: shipped)")
    p.add_argument("--index-h", type=int, help="[H : F^x2] override")
    p.add_argument("--bound", type=int, default=10**6, help="Euler product prime bound")
    p = add(fu, "volume", cmd_fuchsian_volume, "Borel covolume")
    field_opts(p)
    p.add_argument("--index-h", type=int)
    p.add_argument("--bound", type=int, default=10**6)
    p = add(fu, "scan", cmd_fuchsian_scan, "possible elliptic orders")
    field_opts(p)
    p.add_argument("--q-max", type=int, default=64)
    p = add(fu, "weierstrass", cmd_fuchsian_weierstrass, "Weierstrass point arithmetic")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--cm-count", type=int)
    p.add_argument("--galois-degree", type=int)
    p = add(fu, "genus", cmd_fuchsian_genus, "solve for the genus")
    p.add_argument("--vol", required=True, help="vol/2pi as a fraction, e.g. 1455/32")
    p.add_argument("--elliptic", default="", help="e.g. '2^17, 3^9, 32^1'")

    gr = groups.add_parser("graph", help="weighted multigraphs").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = add(gr, "build", cmd_graph_build, "bipartite double of a Brandt matrix")
    brandt_opts(p)
    p.add_argument("--label", help="Hecke operator label (default: first)")
    for name, fn, hlp in (("stabilize", cmd_graph_stabilize, "stable contraction"),
                          ("betti", cmd_graph_betti, "first Betti number"),
                          ("aut", cmd_graph_aut, "automorphism group"),
                          ("admissible", cmd_graph_admissible, "admissible automorphisms"),
                          ("quotient", cmd_graph_quotient, "quotient by a group"),
                          ("export", cmd_graph_export, "re-emit as JSON or DOT")):
        p = add(gr, name, fn, hlp)
        p.add_argument("--in", dest="input", required=True, metavar="FILE")
        if name == "quotient":
            p.add_argument("--by", choices=("swap", "aut"), default="swap")
        if name == "export":
            p.add_argument("--dot", action="store_true")

    he = groups.add_parser("hecke", help="Hecke modules").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = add(he, "split", cmd_hecke_split, "constituents")
    brandt_opts(p)
    p.add_argument("--seed", type=int, default=0)
    p = add(he, "eigensystems", cmd_hecke_eigensystems, "mod-ell eigensystems")
    brandt_opts(p)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--deg", type=int, default=1)
    p = add(he, "congruence", cmd_hecke_congruence, "compare two charpoly tables mod ell")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--eigen", metavar="FILE", help="eigendata file for label lookups")
    p = add(he, "connect", cmd_hecke_connect, "connected components of the congruence graph")
    p.add_argument("file", nargs="?")
    p = add(he, "overq", cmd_hecke_overq, "Brandt matrices over Q")
    p.add_argument("p", type=int)

    pa = groups.add_parser("paper", help="end-to-end pipeline").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = add(pa, "verify", cmd_paper_verify, "run the acceptance ledger")
    p.add_argument("--only", help="comma-separated check ids")
    return root


def manifest(argv: list[str], ctx: Context, out: Outcome) -> dict:
    body = json.dumps(out.payload, sort_keys=True, default=str)
    return {
        "command": argv,
        "inputs": dict(sorted(ctx.inputs.items())),
        "version": __version__,
        "assumptions": out.assumptions,
        "output_sha256": hashlib.sha256(body.encode()).hexdigest(),
    }


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        ctx = Context(args)
        out = args.func(ctx, args)
    except ShimuraLabError as exc:
        print(f"error: {exc}", file=stderr)
        return exc.exit_code
    if args.json:
        doc = {"result": out.payload, "manifest": manifest(argv, ctx, out)}
        print(json.dumps(doc, sort_keys=True, indent=2, default=str), file=stdout)
    else:
        print(out.text, file=stdout)
        for line in out.assumptions:
            print(f"assumption: {line}", file=stdout)
    if args.func is cmd_paper_verify and out.payload["counts"]["FAIL"]:
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
