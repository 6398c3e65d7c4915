"""Projective curves in RP^3 given by affine lifts, and the homogeneous-curve catalog."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import sympy as sp

from .functions import CoordFunction, FunctionError, FunctionRing

__all__ = [
    "Curve",
    "NondegeneracyReport",
    "HomogeneousCurve",
    "UnsupportedCase",
    "det",
    "wronskian4",
    "curve_nondegenerate",
    "jordan_nondegenerate",
    "rnc_spectrum_test",
    "is_rational_normal_generator",
    "catalog",
    "catalog_entry",
    "curve_from_dict",
    "load_curve",
    "check_nonvanishing",
]


class UnsupportedCase(ValueError):
    pass


def det(m):
    """Determinant by cofactor expansion (entries from any commutative ring)."""
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = None
    for j in range(n):
        if not m[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total if total is not None else m[0][0] - m[0][0]


@dataclass
class Curve:
    """Affine lift t -> gamma(t) in R^4 of a projective curve."""

    components: list            # four CoordFunction of the ring's single coordinate
    ring: FunctionRing
    domain: dict = field(default_factory=dict)       # {"min": q or None, "max": q or None}
    parameters: dict = field(default_factory=dict)   # name -> rational value, for catalog members
    inequalities: list = field(default_factory=list)  # sympy expressions g with g > 0
    exclusions: list = field(default_factory=list)   # sympy expressions e with e != 0
    tag: str = ""

    def __post_init__(self):
        if len(self.components) != 4:
            raise FunctionError("a curve needs four components")
        if len(self.ring.coords) != 1:
            raise FunctionError("a curve ring has exactly one coordinate")

    @property
    def variable(self):
        return self.ring.coords[0]

    def derivative(self, k=1):
        comps = list(self.components)
        for _ in range(k):
            comps = [f.diff(self.variable) for f in comps]
        return comps

    def jets(self, n=4):
        out = [list(self.components)]
        for _ in range(n - 1):
            out.append([f.diff(self.variable) for f in out[-1]])
        return out

    def describe(self):
        return [str(f) for f in self.components]


def wronskian4(c: Curve) -> CoordFunction:
    return det(c.jets(4))


# -- sign decisions ----------------------------------------------------------------

def _farkas_sign(f, ineqs, syms):
    """+1/-1 if the linear ``f`` has that strict sign on {g > 0 : g in ineqs}, else 0."""
    if not ineqs:
        return 0
    lam = sp.symbols(f"lam0:{len(ineqs)}")
    syms = sorted(set(syms).union(*[g.free_symbols for g in ineqs]), key=lambda s: s.name)
    for sgn in (1, -1):
        expr = sp.expand(sgn * f - sum(l * g for l, g in zip(lam, ineqs)))
        eqs = [expr.coeff(s) for s in syms]
        sol = sp.solve(eqs, lam, dict=True)
        if not sol:
            continue
        sol = sol[0]
        vals = [sol.get(l, sp.Integer(0)) for l in lam]
        # free multipliers are set to zero
        vals = [v.subs({l: 0 for l in lam}) for v in vals]
        c0 = sp.expand(expr.subs(dict(zip(lam, vals))))
        c0 = c0.subs({s: 0 for s in syms})
        if all(v >= 0 for v in vals) and c0 >= 0 and (c0 > 0 or any(v > 0 for v in vals)):
            return sgn
    return 0


def _univariate_ok(f, y, exclusions, interval=(None, None)):
    """True iff the univariate ``f`` has no real zero outside the excluded values/interval."""
    excluded = set()
    for e in exclusions:
        if e.free_symbols <= {y} and sp.Poly(e, y).degree() == 1:
            excluded.add(sp.solve(e, y)[0])
    lo, hi = interval
    for r in sp.Poly(f, y).real_roots():
        if r in excluded:
            continue
        if lo is not None and r <= lo:
            continue
        if hi is not None and r >= hi:
            continue
        return False
    return True


def check_nonvanishing(f, params, inequalities=(), exclusions=()):
    """Decide whether the parameter polynomial ``f`` is nonzero on the admissible region.

    Returns "nonzero", "vanishes" (a zero exists in the region) or "undecided".
    """
    f = sp.expand(sp.sympify(f))
    syms = sorted(f.free_symbols, key=lambda s: s.name)
    if not syms:
        return "nonzero" if f != 0 else "vanishes"
    unknown = [s for s in syms if s.name not in params]
    if unknown:
        return "undecided"
    poly = sp.Poly(f, *syms)
    ineqs = [sp.expand(g) for g in inequalities]
    if poly.total_degree() == 1 and ineqs:
        if _farkas_sign(f, ineqs, syms):
            return "nonzero"
        return "undecided"
    if ineqs:
        return "undecided"
    excl = [sp.expand(e) for e in exclusions]
    if len(syms) == 1:
        return "nonzero" if _univariate_ok(f, syms[0], excl) else "vanishes"
    if len(syms) == 2:
        for x, y in (syms, syms[::-1]):
            d = sp.Poly(f, x).degree()
            if d == 1:
                a = sp.Poly(f, x).all_coeffs()[0]
                if a.free_symbols:
                    continue
                return "vanishes"  # x = -b(y)/a is a real zero for any admissible y
            if d == 2:
                a, b, c = sp.Poly(f, x).all_coeffs()
                disc = sp.expand(b * b - 4 * a * c)
                lead_ok = (not a.free_symbols and a != 0) or (
                    a.free_symbols <= {y} and _univariate_ok(a, y, excl))
                if not lead_ok:
                    continue
                if not disc.free_symbols:
                    if disc < 0:
                        return "nonzero"
                    continue
                if disc.free_symbols <= {y}:
                    roots = [r for r in sp.Poly(disc, y).real_roots()]
                    if not _univariate_ok(disc, y, excl):
                        continue
                    # sign of the discriminant between its (excluded) roots
                    pts = sorted(set(roots))
                    samples = [pts[0] - 1] + [(p + q) / 2 for p, q in zip(pts, pts[1:])] + [pts[-1] + 1] if pts else [0]
                    if all(disc.subs(y, s) < 0 for s in samples):
                        return "nonzero"
    return "undecided"


@dataclass
class NondegeneracyReport:
    nondegenerate: bool | None      # None: could not be decided
    wronskian: CoordFunction
    factors: list                   # (factor string, multiplicity, verdict)
    excluded_locus: list            # curve-parameter values (or descriptions) where it vanishes

    def to_dict(self):
        return {
            "nondegenerate": self.nondegenerate,
            "wronskian": self.wronskian.pretty(),
            "factors": [{"factor": f, "multiplicity": int(m), "verdict": v} for f, m, v in self.factors],
            "excluded_locus": [str(x) for x in self.excluded_locus],
        }


def curve_nondegenerate(c: Curve) -> NondegeneracyReport:
    W = wronskian4(c)
    if not W:
        return NondegeneracyReport(False, W, [], ["identically zero"])
    ring = c.ring
    p = ring.symbols[c.variable]
    if not W.is_unit():
        return NondegeneracyReport(None, W, [("several generalized monomials", 1, "undecided")], [])
    (a, b), coef = next(iter(W.terms.items()))
    lo, hi = c.domain.get("min"), c.domain.get("max")
    verdicts, locus = [], []
    ok = True
    if a != 0 and (lo is None or lo < 0):
        verdicts.append((f"{p}^({a})", 1, "undecided"))
        ok = None
    expr = sp.factor(coef.as_expr())
    num, den = sp.fraction(expr)
    const, facs = sp.factor_list(num)
    for fac, mult in facs:
        fac = fac.subs(ring.symbols[ring.log_name], sp.log(p)) if ring.log_name else fac
        if fac.has(sp.log):
            verdicts.append((str(fac), mult, "undecided"))
            ok = None if ok else ok
            continue
        if p in fac.free_symbols:
            others = fac.free_symbols - {p}
            if others:
                verdicts.append((str(fac), mult, "undecided"))
                ok = None if ok else ok
                continue
            roots = [r for r in sp.Poly(fac, p).real_roots()
                     if (lo is None or r > lo) and (hi is None or r < hi)]
            if roots:
                locus.extend(roots)
                verdicts.append((str(fac), mult, "vanishes"))
                ok = False
            else:
                verdicts.append((str(fac), mult, "nonzero"))
            continue
        v = check_nonvanishing(fac, ring.parameters, c.inequalities, c.exclusions)
        verdicts.append((str(fac), mult, v))
        if v == "vanishes":
            ok = False
        elif v == "undecided" and ok:
            ok = None
    if const == 0:
        ok = False
    return NondegeneracyReport(ok, W, verdicts, locus)


# -- Jordan structure -------------------------------------------------------------------

def _as_matrix(v):
    m = sp.Matrix(v)
    if m.shape != (4, 4) and m.shape[0] != m.shape[1]:
        raise ValueError("square matrix expected")
    return m.applyfunc(lambda x: sp.nsimplify(x) if not isinstance(x, sp.Basic) else x)


def jordan_nondegenerate(v) -> bool:
    """One Jordan block per eigenvalue (over C), decided over Q."""
    m = _as_matrix(v)
    if m.free_symbols:
        raise UnsupportedCase("substitute rational parameter values first")
    x = sp.Symbol("x")
    cp = m.charpoly(x).as_expr()
    _, facs = sp.factor_list(cp, x)
    n = m.shape[0]
    for fac, mult in facs:
        d = sp.Poly(fac, x).degree()
        if d > 2:
            raise UnsupportedCase(f"irreducible factor of degree {d}: {fac}")
        pm = sp.zeros(n, n)
        for k, c in enumerate(reversed(sp.Poly(fac, x).all_coeffs())):
            pm += c * m ** k
        nullity = n - pm.rank()
        if nullity // d != 1:
            return False
    return True


def is_rational_normal_generator(v) -> bool:
    """Whether the traceless part of ``v`` lies in an irreducible sl_2 of sl_4.

    Its eigenvalues are then (-3n, -n, n, 3n) with n possibly imaginary, or it
    is a single nilpotent Jordan block.
    """
    m = _as_matrix(v)
    m0 = m - (m.trace() / 4) * sp.eye(4)
    x = sp.Symbol("x")
    c = sp.Poly(m0.charpoly(x).as_expr(), x).all_coeffs()  # x^4 + c1 x^3 + c2 x^2 + c3 x + c4
    c2, c3, c4 = c[2], c[3], c[4]
    if c3 != 0:
        return False
    if c2 == 0:
        return c4 == 0 and (m0 ** 3) != sp.zeros(4, 4)
    n2 = -c2 / 10
    return sp.simplify(c4 - 9 * n2 ** 2) == 0


def rnc_spectrum_test(alpha, beta):
    """Whether diag(4*v~ - (1+a+b)) for type (1111) is proportional to (-3, -1, 1, 3).

    Returns (verdict, spectrum, nu) with ``nu`` the proportionality factor or None.
    """
    a, b = Fraction(alpha), Fraction(beta)
    if not 1 < a < b:
        raise ValueError("parameters must satisfy 1 < alpha < beta")
    spec = (-1 - a - b, 3 - a - b, 3 * a - 1 - b, 3 * b - 1 - a)
    nu = spec[2]
    ok = nu != 0 and spec == (-3 * nu, -nu, nu, 3 * nu)
    return ok, spec, (nu if ok else None)


# -- catalog -------------------------------------------------------------------------------

@dataclass(frozen=True)
class HomogeneousCurve:
    segre: str
    label: str
    variable: str                # "tau" (tau > 0) or "t"
    flow: str                    # "tau*d/dtau", "d/dtau" or "d/dt"
    parameters: tuple
    components: tuple            # strings in the function grammar
    generator: tuple             # 4x4 entries as strings, v*gamma = flow(gamma)
    inequalities: tuple = ()
    exclusions: tuple = ()
    samples: tuple = ()          # admissible rational parameter choices

    def name(self):
        return f"{self.segre} {self.label}"

    def _symbols(self):
        return {p: sp.Symbol(p, real=True) for p in self.parameters}

    def v(self, values=None):
        syms = self._symbols()
        m = sp.Matrix(4, 4, lambda i, j: sp.sympify(self.generator[i][j], locals=syms))
        if values:
            m = m.subs({syms[k]: sp.Rational(Fraction(v).numerator, Fraction(v).denominator)
                        for k, v in values.items()})
        return m

    def check_values(self, values):
        syms = self._symbols()
        subs = {syms[k]: sp.nsimplify(Fraction(v)) for k, v in values.items()}
        missing = set(self.parameters) - set(values)
        if missing:
            raise ValueError(f"missing parameter values: {sorted(missing)}")
        for g in self.inequalities:
            if not sp.sympify(g, locals=syms).subs(subs) > 0:
                raise ValueError(f"inadmissible parameters: need {g} > 0")
        for e in self.exclusions:
            if sp.sympify(e, locals=syms).subs(subs) == 0:
                raise ValueError(f"inadmissible parameters: need {e} != 0")

    def curve(self, values=None):
        """The curve, symbolic in the parameters unless ``values`` are given."""
        values = dict(values or {})
        if values:
            self.check_values(values)
        free = tuple(p for p in self.parameters if p not in values)
        ring = FunctionRing([self.variable], self.variable, free)
        syms = self._symbols()
        subs = {syms[k]: sp.nsimplify(Fraction(v)) for k, v in values.items()}
        comps = []
        for text in self.components:
            expr = _parse_plain(text, self.variable, syms).subs(subs)
            comps.append(ring.from_sympy(expr))
        dom = {"min": 0, "max": None} if self.variable == "tau" else {"min": None, "max": None}
        ineq = [sp.sympify(g, locals=syms) for g in self.inequalities] if not values else []
        excl = [sp.sympify(e, locals=syms) for e in self.exclusions] if not values else []
        return Curve(comps, ring, dom, {k: Fraction(v) for k, v in values.items()}, ineq, excl,
                     tag=self.name())

    def generator_consistent(self, values=None):
        """flow(gamma) == v * gamma componentwise."""
        c = self.curve(values)
        ring = c.ring
        m = self.v(values)
        d = c.derivative()
        if self.flow == "tau*d/dtau":
            d = [ring.coord(self.variable) * f for f in d]
        for i in range(4):
            rhs = ring.zero()
            for j in range(4):
                if m[i, j] != 0:
                    rhs = rhs + ring.from_sympy(m[i, j]) * c.components[j]
            if d[i] != rhs:
                return False
        return True


def _parse_plain(text, var, syms):
    local = dict(syms)
    local[var] = sp.Symbol(var, real=True)
    local.update({"exp": sp.exp, "ln": sp.log, "cos": sp.cos, "sin": sp.sin})
    return sp.sympify(text.replace("^", "**"), locals=local)


_CATALOG = (
    HomogeneousCurve("(1111)", "gamma_ab", "tau", "tau*d/dtau", ("alpha", "beta"),
                     ("1", "tau", "tau^alpha", "tau^beta"),
                     (("0", "0", "0", "0"), ("0", "1", "0", "0"), ("0", "0", "alpha", "0"), ("0", "0", "0", "beta")),
                     inequalities=("alpha - 1", "beta - alpha"),
                     samples=({"alpha": 2, "beta": 3}, {"alpha": 2, "beta": 4}, {"alpha": 3, "beta": 5},
                              {"alpha": Fraction(3, 2), "beta": Fraction(5, 2)})),
    HomogeneousCurve("(211)", "gamma_b", "tau", "tau*d/dtau", ("beta",),
                     ("1", "ln(tau)", "tau^(beta-1)", "tau^(-beta-3)"),
                     (("0", "0", "0", "0"), ("1", "0", "0", "0"), ("0", "0", "beta-1", "0"), ("0", "0", "0", "-beta-3")),
                     exclusions=("beta - 1", "beta + 1", "beta + 3"),
                     samples=({"beta": 2}, {"beta": Fraction(1, 2)}, {"beta": -2})),
    HomogeneousCurve("(211)", "gamma_inf", "tau", "tau*d/dtau", (),
                     ("1", "ln(tau)", "tau", "tau^-1"),
                     (("0", "0", "0", "0"), ("1", "0", "0", "0"), ("0", "0", "1", "0"), ("0", "0", "0", "-1")),
                     samples=({},)),
    HomogeneousCurve("(31)", "gamma", "tau", "tau*d/dtau", (),
                     ("1", "ln(tau)", "ln(tau)^2", "tau^-4"),
                     (("0", "0", "0", "0"), ("1", "0", "0", "0"), ("0", "2", "0", "0"), ("0", "0", "0", "-4")),
                     samples=({},)),
    HomogeneousCurve("(22)", "gamma", "tau", "tau*d/dtau", (),
                     ("1", "ln(tau)", "tau^-2", "tau^-2*ln(tau)"),
                     (("0", "0", "0", "0"), ("1", "0", "0", "0"), ("0", "0", "-2", "0"), ("0", "0", "1", "-2")),
                     samples=({},)),
    HomogeneousCurve("(4)", "gamma", "tau", "d/dtau", (),
                     ("1", "tau", "tau^2", "tau^3"),
                     (("0", "0", "0", "0"), ("1", "0", "0", "0"), ("0", "2", "0", "0"), ("0", "0", "3", "0")),
                     samples=({},)),
    HomogeneousCurve("(1c11)", "gamma_ab", "t", "d/dt", ("alpha", "beta"),
                     ("cos(beta*t)", "sin(beta*t)", "exp((alpha-1)*t)", "exp(-(alpha+3)*t)"),
                     (("0", "-beta", "0", "0"), ("beta", "0", "0", "0"), ("0", "0", "alpha-1", "0"), ("0", "0", "0", "-alpha-3")),
                     exclusions=("alpha + 1", "beta"),
                     samples=({"alpha": 2, "beta": 1}, {"alpha": 0, "beta": 3}, {"alpha": Fraction(-1, 2), "beta": -2})),
    HomogeneousCurve("(1c11)", "gamma_inf_b", "t", "d/dt", ("beta",),
                     ("cos(beta*t)", "sin(beta*t)", "exp(t)", "exp(-t)"),
                     (("0", "-beta", "0", "0"), ("beta", "0", "0", "0"), ("0", "0", "1", "0"), ("0", "0", "0", "-1")),
                     exclusions=("beta",),
                     samples=({"beta": 1}, {"beta": Fraction(5, 3)})),
    HomogeneousCurve("(1c2)", "gamma_b", "t", "d/dt", ("beta",),
                     ("cos(beta*t)", "sin(beta*t)", "t*exp(-2*t)", "exp(-2*t)"),
                     (("0", "-beta", "0", "0"), ("beta", "0", "0", "0"), ("0", "0", "-2", "1"), ("0", "0", "0", "-2")),
                     exclusions=("beta",),
                     samples=({"beta": 1}, {"beta": -3})),
    HomogeneousCurve("(2c)", "gamma", "t", "d/dt", (),
                     ("cos(t)", "sin(t)", "t*cos(t)", "t*sin(t)"),
                     (("0", "-1", "0", "0"), ("1", "0", "0", "0"), ("1", "0", "0", "-1"), ("0", "1", "1", "0")),
                     samples=({},)),
    HomogeneousCurve("(1c1c)", "gamma_ab", "t", "d/dt", ("alpha", "beta"),
                     ("cos(alpha*t)", "sin(alpha*t)", "exp(-2*t)*cos(beta*t)", "exp(-2*t)*sin(beta*t)"),
                     (("0", "-alpha", "0", "0"), ("alpha", "0", "0", "0"), ("0", "0", "-2", "-beta"), ("0", "0", "beta", "-2")),
                     exclusions=("alpha", "beta"),
                     samples=({"alpha": 1, "beta": 1}, {"alpha": 2, "beta": -1})),
    HomogeneousCurve("(1c1c)", "gamma_b", "t", "d/dt", ("beta",),
                     ("cos(t)", "sin(t)", "cos(beta*t)", "sin(beta*t)"),
                     (("0", "-1", "0", "0"), ("1", "0", "0", "0"), ("0", "0", "0", "-beta"), ("0", "0", "beta", "0")),
                     exclusions=("beta", "beta - 1", "beta + 1"),
                     samples=({"beta": 2}, {"beta": 3}, {"beta": Fraction(1, 2)})),
)


def catalog():
    """The twelve homogeneous nondegenerate curve families."""
    return list(_CATALOG)


def catalog_entry(segre, label=None):
    hits = [h for h in _CATALOG if h.segre == segre and (label is None or h.label == label)]
    if not hits:
        raise KeyError(f"no catalog entry {segre} {label or ''}".strip())
    if len(hits) > 1:
        raise KeyError(f"{segre} has several entries: {[h.label for h in hits]}")
    return hits[0]


# -- curve.v1 ---------------------------------------------------------------------------------

def curve_from_dict(d):
    from ..errors import InputError
    try:
        var = d.get("variable", "t")
        params = d.get("parameters", {})
        names = [k for k, v in params.items() if v is None]
        values = {k: Fraction(str(v)) for k, v in params.items() if v is not None}
        ring = FunctionRing([var], var, names)
        syms = {n: sp.Symbol(n, real=True) for n in params}
        subs = {syms[k]: sp.Rational(v.numerator, v.denominator) for k, v in values.items()}
        comps = []
        for text in d["components"]:
            expr = _parse_plain(text, var, syms).subs(subs)
            comps.append(ring.from_sympy(expr))
        dom = d.get("domain", {})
        dom = {"min": None if dom.get("min") is None else Fraction(str(dom["min"])),
               "max": None if dom.get("max") is None else Fraction(str(dom["max"]))}
        ineq = [sp.sympify(g, locals=syms) for g in d.get("inequalities", [])]
        excl = [sp.sympify(e, locals=syms) for e in d.get("exclusions", [])]
        return Curve(comps, ring, dom, values, ineq, excl, tag=d.get("name", ""))
    except KeyError as e:
        raise InputError(f"missing field {e.args[0]!r}") from None
    except (FunctionError, sp.SympifyError, TypeError) as e:
        raise InputError(str(e)) from None


def load_curve(path):
    from ..errors import load_json
    return curve_from_dict(load_json(path))
