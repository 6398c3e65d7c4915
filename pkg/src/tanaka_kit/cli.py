"""Command-line front end: ``tanaka-kit <subcommand> ...``.

Exit status: 0 when every result matches the expectations stored in the
input fixtures (or none are stored), 1 on a mismatch, 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial
from pathlib import Path

from . import FIXTURES, __version__
from .errors import InputError, load_json

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2


def resolve(path):
    """A path as given, else the bundled fixture of the same name."""
    p = Path(path)
    if p.exists():
        return p
    name = p.name if p.suffix == ".json" else p.name + ".json"
    q = FIXTURES / name
    if q.exists():
        return q
    raise InputError(f"{path}: no such file or bundled fixture")


def jobs():
    raw = os.environ.get("TANAKA_KIT_JOBS", "")
    if not raw:
        return max(1, min(4, os.cpu_count() or 1))
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"TANAKA_KIT_JOBS={raw!r} is not an integer") from None
    if n < 1:
        raise InputError("TANAKA_KIT_JOBS must be at least 1")
    return n


def run_jobs(fn, items):
    """Map ``fn`` over ``items``, concurrently up to the job cap; results keep input order."""
    n = min(jobs(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


class Output:
    def __init__(self, args):
        self.json = args.json
        self.path = getattr(args, "output", None)
        self.lines = []

    def text(self, line=""):
        if not self.json:
            print(line, flush=True)
            self.lines.append(line)

    def finish(self, report):
        if self.json:
            print(json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False))
        if self.path:
            Path(self.path).write_text(json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
                                       encoding="utf-8")


def _mismatch(label, got, want):
    return f"{label}: got {got}, expected {want}"


# -- prolong --------------------------------------------------------------------------------

def _prolong_one(job):
    from .liealg import algebra_from_dict
    from .prolong import level_contains, tanaka_prolong
    path, kmax = job
    d = load_json(path)
    g = algebra_from_dict(d)
    r = tanaka_prolong(g, kmax)
    rep = {"input": Path(path).name, **r.report()}
    exp = d.get("expect", {}).get("prolong")
    bad = []
    if exp:
        if "dims" in exp and list(r.dims[:len(exp["dims"])]) != exp["dims"]:
            bad.append(_mismatch("dims", r.dims, exp["dims"]))
        if "total" in exp and r.total != exp["total"]:
            bad.append(_mismatch("total", r.total, exp["total"]))
        if "level1_contains" in exp:
            in_span, same = level_contains(r, 1, exp["level1_contains"])
            if not (in_span and same):
                bad.append("degree-1 basis does not span the expected cochains")
    rep["expectation"] = "none" if not exp else ("mismatch" if bad else "match")
    rep["mismatches"] = bad
    return rep


def cmd_prolong(args, out):
    reports = run_jobs(_prolong_one, [(resolve(p), args.kmax) for p in args.inputs])
    for rep in reports:
        out.text(f"{rep['input']}: dims {rep['dims']}, total {rep['total']}")
        for b in rep["basis"]:
            out.text(f"  degree {b['degree']}  {b['name']} = {b['cochain']}")
        for a in rep["genericity_assumptions"]:
            out.text(f"  assuming {a}")
        out.text(f"  expectation: {rep['expectation']}")
        for m in rep["mismatches"]:
            out.text(f"  MISMATCH {m}")
    out.finish(reports if len(reports) > 1 else reports[0])
    return EXIT_MISMATCH if any(r["mismatches"] for r in reports) else EXIT_OK


# -- deform ---------------------------------------------------------------------------------

def _branch_label(spec):
    return "generic" if not spec else "special " + ", ".join(f"{k} = {v}" for k, v in spec.items())


def _settle_report(path, on_step=None, on_branch=None, audit=False):
    from .deform import audit_pins, check_certificate, replay, settle
    d = load_json(path)
    branches = []
    for spec, ds, v in settle(d, on_step, on_branch):
        b = {"specialization": spec, **v.to_dict(ds), "trace": v.trace_lines(ds)}
        b["replay"] = replay(ds, v)
        if v.status == "Inconsistent":
            b["certificate_checked"] = check_certificate(ds, v)
        branches.append(b)
    overall = branches[0]["verdict"]
    if overall == "Inconsistent" and any(b["verdict"] != "Inconsistent" for b in branches):
        overall = "Residual"
    rep = {"input": Path(path).name, "verdict": overall, "branches": branches}
    exp = d.get("expect", {}).get("deform", {}).get("verdict")
    bad = []
    if exp and overall != exp:
        bad.append(_mismatch("verdict", overall, exp))
    for b in branches:
        if b["replay"] != b["verdict"]:
            bad.append(f"replay of branch {b['specialization']} gives {b['replay']}")
        if b.get("certificate_checked") is False:
            bad.append(f"certificate of branch {b['specialization']} does not check")
    rep["expectation"] = "none" if not exp else ("mismatch" if bad else "match")
    rep["mismatches"] = bad
    if audit:
        rep["pin_audit"] = [a.to_dict() for a in audit_pins(d)]
    return rep


def _deform_job(path, audit=False):
    return _settle_report(path, audit=audit)


def cmd_deform(args, out):
    paths = [resolve(p) for p in args.inputs]
    stream = not args.json and (len(paths) == 1 or jobs() == 1)
    if stream:
        reports = []
        for p in paths:
            load_json(p)
            out.text(f"{p.name}:")
            rep = _settle_report(p, on_step=lambda s, ds: out.text(f"    {s.describe(ds)}"),
                                 on_branch=lambda spec: out.text(f"  [{_branch_label(spec)}] trace:"),
                                 audit=args.audit_pins)
            reports.append(rep)
            _print_deform(rep, out, trace=False)
    else:
        reports = run_jobs(partial(_deform_job, audit=args.audit_pins), paths)
        for rep in reports:
            out.text(f"{rep['input']}:")
            _print_deform(rep, out, trace=True)
    out.finish(reports if len(reports) > 1 else reports[0])
    return EXIT_MISMATCH if any(r["mismatches"] for r in reports) else EXIT_OK


def _print_deform(rep, out, trace):
    for b in rep["branches"]:
        head = _branch_label(b["specialization"])
        if trace and b["trace"]:
            out.text(f"  [{head}] trace:")
            for line in b["trace"]:
                out.text(f"    {line}")
        extra = ""
        if "certificate" in b:
            extra = f", certificate {b['certificate']['value']} from eq#{b['certificate']['equation']}"
        out.text(f"  [{head}] {b['verdict']} ({b['unknowns']} unknowns, {b['equations']} equations, "
                 f"{b['steps']} substitutions{extra})")
        for r in b.get("residual", [])[:10]:
            out.text(f"    residual: {r} = 0")
        if len(b.get("residual", [])) > 10:
            out.text(f"    ... {len(b['residual']) - 10} more residual equations")
    out.text(f"  verdict: {rep['verdict']}; expectation: {rep['expectation']}")
    for m in rep["mismatches"]:
        out.text(f"  MISMATCH {m}")
    if "pin_audit" in rep:
        crit = [a for a in rep["pin_audit"] if a["critical"]]
        out.text(f"  pin audit: {len(rep['pin_audit'])} pinned relations, {len(crit)} critical")
        for a in crit:
            out.text(f"    FLAG {a['pin']}: {a['outcome']} without it")


# -- curve and tube -------------------------------------------------------------------------

def cmd_curve(args, out):
    from .crgeom import curve_from_dict, curve_nondegenerate
    reports = []
    for p in args.inputs:
        path = resolve(p)
        d = load_json(path)
        rep = curve_nondegenerate(curve_from_dict(d)).to_dict()
        exp = d.get("expect", {}).get("curve")
        bad = []
        if exp:
            if "nondegenerate" in exp and rep["nondegenerate"] != exp["nondegenerate"]:
                bad.append(_mismatch("nondegenerate", rep["nondegenerate"], exp["nondegenerate"]))
            if "wronskian" in exp and not _same_expr(rep["wronskian"], exp["wronskian"], d.get("variable", "t")):
                bad.append(_mismatch("wronskian", rep["wronskian"], exp["wronskian"]))
        rep = {"input": path.name, **rep, "expectation": "none" if not exp else ("mismatch" if bad else "match"),
               "mismatches": bad}
        reports.append(rep)
        out.text(f"{path.name}: W = {rep['wronskian']}; nondegenerate: {rep['nondegenerate']}")
        for f in rep["factors"]:
            out.text(f"  factor {f['factor']} (multiplicity {f['multiplicity']}): {f['verdict']}")
        for x in rep["excluded_locus"]:
            out.text(f"  excluded: {x}")
        out.text(f"  expectation: {rep['expectation']}")
        for m in bad:
            out.text(f"  MISMATCH {m}")
    out.finish(reports if len(reports) > 1 else reports[0])
    return EXIT_MISMATCH if any(r["mismatches"] for r in reports) else EXIT_OK


def _same_expr(a, b, var):
    import sympy as sp
    loc = {var: sp.Symbol(var, real=True)}
    try:
        return sp.simplify(sp.sympify(a.replace("^", "**"), locals=loc)
                           - sp.sympify(str(b).replace("^", "**"), locals=loc)) == 0
    except (sp.SympifyError, TypeError):
        return a == b


def _tube_report(m, args, exp):
    from .crgeom import (NotThreeNondegenerate, check_bracket_inclusions, freeman_ranks, is_cr_symmetry,
                         levi_form, normalized_sections)
    import sympy as sp
    rep = {"model": m.describe(), "d_rank": m.d_rank()}
    fr = freeman_ranks(m)
    rep["freeman"] = fr.to_dict()
    if args.levi and not fr.degenerate:
        rep["levi"] = [levi_form(m, k).to_dict() for k in (1, 2, 3)]
    if not fr.degenerate:
        rep["bracket_table"] = check_bracket_inclusions(m).to_dict()
    if args.sections:
        try:
            rep["sections"] = normalized_sections(m).to_dict()
        except NotThreeNondegenerate as e:
            rep["sections"] = {"error": str(e)}
    if args.symmetries:
        sym = {f"dy{k}": is_cr_symmetry(m, k).to_dict() for k in range(4)}
        sym["rho"] = is_cr_symmetry(m, sp.eye(4)).to_dict()
        rep["symmetries"] = sym
    bad = []
    if exp:
        if "ranks" in exp and rep["freeman"]["ranks"] != exp["ranks"]:
            bad.append(_mismatch("ranks", rep["freeman"]["ranks"], exp["ranks"]))
        if "degenerate" in exp and fr.degenerate != exp["degenerate"]:
            bad.append(_mismatch("degenerate", fr.degenerate, exp["degenerate"]))
        if "hol_nondegenerate" in exp and fr.hol_nondegenerate != exp["hol_nondegenerate"]:
            bad.append(_mismatch("hol_nondegenerate", fr.hol_nondegenerate, exp["hol_nondegenerate"]))
        if "bracket_table" in exp and rep.get("bracket_table", {}).get("ok") != exp["bracket_table"]:
            bad.append(_mismatch("bracket_table", rep.get("bracket_table", {}).get("ok"), exp["bracket_table"]))
        if "symmetries" in exp and "symmetries" in rep:
            for k, want in exp["symmetries"].items():
                got = rep["symmetries"][k]["symmetry"]
                if got != want:
                    bad.append(_mismatch(f"symmetry {k}", got, want))
    rep["expectation"] = "none" if not exp else ("mismatch" if bad else "match")
    rep["mismatches"] = bad
    return rep


def cmd_tube(args, out):
    from .crgeom import Variant, build_tube, curve_from_dict, hyperquadric_tube
    if args.hyperquadric:
        m, exp, label = hyperquadric_tube(), None, "hyperquadric"
    else:
        if not args.input:
            raise InputError("tube needs a curve file or --hyperquadric")
        path = resolve(args.input)
        d = load_json(path)
        exp = d.get("expect", {}).get("tube")
        variant = args.variant or (exp or {}).get("variant", "tangent")
        if exp and exp.get("variant", "tangent") != variant:
            exp = None  # expectations refer to the other variant
        m, label = build_tube(curve_from_dict(d), Variant(variant)), path.name
        if exp and "symmetries" in exp:
            args.symmetries = True
    rep = {"input": label, **_tube_report(m, args, exp)}
    _print_tube(rep, out)
    out.finish(rep)
    return EXIT_MISMATCH if rep["mismatches"] else EXIT_OK


def _print_tube(rep, out):
    fr = rep["freeman"]
    out.text(f"{rep['input']}: tube over the {rep['model']['variant']} surface, chart {rep['model']['chart']}")
    out.text(f"  rank D = {rep['d_rank']}, rank D + [D, D] = {fr['bracket_rank']}")
    if fr["degenerate"]:
        out.text("  D is not bracket generating: the tube is Levi degenerate everywhere")
    else:
        out.text(f"  Freeman ranks (D10, K10, L10) = {tuple(fr['ranks'])}; "
                 f"holomorphically nondegenerate: {fr['hol_nondegenerate']}")
        out.text(f"  K10 = span {fr['K10']}, L10 = span {fr['L10']}")
        bt = rep["bracket_table"]
        out.text(f"  bracket table: {'holds' if bt['ok'] else 'fails'} ({len(bt['checked'])} entries, "
                 f"{len(bt['violations'])} violations)")
    for lf in rep.get("levi", []):
        out.text(f"  Levi form of order {lf['order']}: {lf['matrix']}")
    if "sections" in rep:
        s = rep["sections"]
        if "error" in s:
            out.text(f"  normalized sections: {s['error']}")
        else:
            out.text(f"  X10 = {s['X10']}, Y10 = {s['Y10']}, Z10 = {s['Z10']} (mu = {s['mu']}, nu = {s['nu']})")
    for k, v in rep.get("symmetries", {}).items():
        tail = "" if v["symmetry"] else f" (residue {v['residue']}, failing frame fields {v['failures']})"
        out.text(f"  {k}: {'symmetry' if v['symmetry'] else 'not a symmetry'}{tail}")
    if fr["genericity_locus"]:
        out.text(f"  valid where {', '.join(fr['genericity_locus'])} != 0")
    out.text(f"  expectation: {rep['expectation']}")
    for m in rep["mismatches"]:
        out.text(f"  MISMATCH {m}")


# -- catalog --------------------------------------------------------------------------------

def _parse_values(text):
    out = {}
    if not text:
        return out
    for part in text.split(","):
        if "=" not in part:
            raise InputError(f"bad parameter assignment {part!r}; use name=value")
        k, v = part.split("=", 1)
        try:
            out[k.strip()] = Fraction(v.strip())
        except ValueError:
            raise InputError(f"parameter {k.strip()} needs a rational value, got {v.strip()!r}") from None
    return out


def cmd_catalog(args, out):
    from .crgeom import catalog, catalog_entry, curve_nondegenerate, jordan_nondegenerate, tube_symmetry_algebra
    if args.segre:
        try:
            entries = [catalog_entry(args.segre, args.label)]
        except (KeyError, ValueError) as e:
            raise InputError(str(e)) from None
    else:
        entries = catalog()
    values = _parse_values(args.values)
    if values and not args.segre:
        raise InputError("--values needs --segre")
    reports = []
    for hc in entries:
        rep = {"curve": hc.name(), "components": list(hc.components), "parameters": list(hc.parameters)}
        try:
            if values:
                hc.check_values(values)
            c = hc.curve(values or None)
        except ValueError as e:
            raise InputError(f"{hc.name()}: {e}") from None
        nd = curve_nondegenerate(c)
        rep["nondegeneracy"] = nd.to_dict()
        if not hc.parameters or values:
            rep["jordan_nondegenerate"] = jordan_nondegenerate(hc.v(values or None))
        out.text(f"{hc.name()}: gamma = ({', '.join(hc.components)})")
        out.text(f"  W = {rep['nondegeneracy']['wronskian']}; nondegenerate: {nd.nondegenerate}")
        if args.symmetries:
            missing = [p for p in hc.parameters if p not in values]
            if missing:
                raise InputError(f"{hc.name()}: --symmetries needs values for {', '.join(missing)}")
            sr = tube_symmetry_algebra(hc, values)
            rep["symmetry_algebra"] = sr.to_dict()
            for name, v in sr.verdicts.items():
                out.text(f"  {name}: {'symmetry' if v.ok else 'not a symmetry'}")
            out.text(f"  Jacobi: {sr.jacobi_ok}; brackets match vector fields: {sr.brackets_match}")
            out.text(f"  ad(v) on the translations: {[str(x) for x in sr.ad_spectrum]}")
            if sr.maximal:
                out.text("  maximally symmetric model")
        reports.append(rep)
    out.finish(reports if len(reports) > 1 else reports[0])
    ok = all(r["nondegeneracy"]["nondegenerate"] is not False for r in reports)
    ok = ok and all(r.get("symmetry_algebra", {}).get("jacobi", True) for r in reports)
    return EXIT_OK if ok else EXIT_MISMATCH


# -- verify-paper ---------------------------------------------------------------------------

def _criterion_job(n):
    from .acceptance import run_criterion
    return run_criterion(n).to_dict()


def cmd_verify(args, out):
    from .acceptance import CRITERIA
    numbers = sorted(CRITERIA)
    if args.only:
        try:
            numbers = sorted({int(x) for x in args.only.split(",")})
        except ValueError:
            raise InputError(f"--only expects comma-separated numbers, got {args.only!r}") from None
        bad = [n for n in numbers if n not in CRITERIA]
        if bad:
            raise InputError(f"no acceptance criterion {bad[0]}")
    results = run_jobs(_criterion_job, numbers)
    for r in results:
        out.text(f"[{'PASS' if r['ok'] else 'FAIL'}] {r['criterion']:2d}. {r['title']}")
        if args.verbose or not r["ok"]:
            for d in r["details"]:
                out.text(f"      {d}")
    passed = sum(r["ok"] for r in results)
    out.text(f"{passed}/{len(results)} criteria pass")
    report = [{k: v for k, v in r.items() if k != "seconds"} for r in results]
    out.finish(report)
    return EXIT_OK if passed == len(results) else EXIT_MISMATCH


# -- entry point ----------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="tanaka-kit", description="Tanaka prolongation, filtered deformations "
                                 "and CR geometry of tube hypersurfaces.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a machine-readable report")
    common.add_argument("-o", "--output", help="also write the JSON report to this file")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prolong", parents=[common], help="Tanaka prolongation of a graded symbol")
    p.add_argument("inputs", nargs="+", help="algebra fixtures (liealg.v1)")
    p.add_argument("--kmax", type=int, default=3, help="highest degree to compute (default 3)")
    p.set_defaults(func=cmd_prolong)

    p = sub.add_parser("deform", parents=[common], help="Jacobi obstructions to filtered deformations")
    p.add_argument("inputs", nargs="+", help="deformation fixtures (deform.v1)")
    p.add_argument("--audit-pins", action="store_true",
                   help="re-run with each pinned relation removed and flag those the verdict depends on")
    p.set_defaults(func=cmd_deform)

    p = sub.add_parser("tube", parents=[common], help="Freeman filtration and symmetries of a tube")
    p.add_argument("input", nargs="?", help="curve file (curve.v1)")
    p.add_argument("--variant", choices=["tangent", "osculating"], help="surface built from the curve")
    p.add_argument("--hyperquadric", action="store_true", help="use the Levi-nondegenerate hyperquadric tube")
    p.add_argument("--levi", action="store_true", help="print the Levi forms of orders 1 to 3")
    p.add_argument("--sections", action="store_true", help="compute normalized sections X10, Y10, Z10")
    p.add_argument("--symmetries", action="store_true", help="test translations and the radial field")
    p.set_defaults(func=cmd_tube)

    p = sub.add_parser("curve", parents=[common], help="Wronskian nondegeneracy of curves")
    p.add_argument("inputs", nargs="+", help="curve files (curve.v1)")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("catalog", parents=[common], help="homogeneous nondegenerate curves")
    p.add_argument("--segre", help="Segre type, e.g. (1111)")
    p.add_argument("--label", help="curve label within the Segre type")
    p.add_argument("--values", help="parameter values, e.g. alpha=2,beta=4")
    p.add_argument("--symmetries", action="store_true", help="verify the symmetry algebra of the tube")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("verify-paper", parents=[common], help="run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("-v", "--verbose", action="store_true", help="show every check")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    from .crgeom import ChartError, FunctionError, TubeError, UnsupportedCase
    from .deform import DeformationError
    from .liealg import LieAlgebraError
    from .scalars import ContextError, ScalarParseError
    args = build_parser().parse_args(argv)
    out = Output(args)
    try:
        return args.func(args, out)
    except (InputError, ScalarParseError, ContextError, LieAlgebraError, DeformationError,
            FunctionError, ChartError, TubeError, UnsupportedCase) as e:
        print(f"tanaka-kit: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
