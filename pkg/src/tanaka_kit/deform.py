"""Filtered deformations of graded Lie algebras and their Jacobi obstructions.

A filtered deformation keeps the graded bracket and adds components of
strictly higher degree.  Every such component that is neither pinned by a
fixed relation nor forbidden by a grading element becomes an unknown.  The
Jacobi identity then gives polynomial equations (of degree at most two)
which are eliminated by unit-coefficient linear substitutions.

Conjugation: the unknown of a slot and the unknown of its conjugate slot
are independent variables.  This is a relaxation of the real problem, so an
inconsistency found here is an inconsistency of the real problem as well.
"""

from __future__ import annotations

import copy
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .liealg import GradedLieAlgebra, LieAlgebraError
from .scalars import Scalar, ScalarParseError, UnitContext, format_scalar, parse_scalar

__all__ = [
    "Poly",
    "DeformationUnknown",
    "Pin",
    "DeformationSystem",
    "DeformationError",
    "Verdict",
    "build_deformation",
    "jacobi_system",
    "eliminate",
    "replay",
    "check_certificate",
    "sample_solutions",
    "check_soundness",
    "load_deformation",
    "deformation_from_dict",
    "specialize_units",
    "certificate_exceptions",
    "settle",
    "PinAudit",
    "audit_pins",
]


class DeformationError(ValueError):
    pass


# -- polynomials -----------------------------------------------------------------

class Poly:
    """Polynomial in indexed unknowns with Scalar coefficients.

    A monomial is a sorted tuple of variable indices (repetition = power).
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, c):
        return cls({(): c}) if c else cls()

    @classmethod
    def var(cls, k, coef):
        return cls({(k,): coef})

    def __bool__(self):
        return bool(self.terms)

    def copy(self):
        return Poly(dict(self.terms))

    def add_to(self, other, scale=None):
        """In-place ``self += scale * other``."""
        t = self.terms
        for m, c in other.terms.items():
            if scale is not None:
                c = scale * c
            if m in t:
                s = t[m] + c
                if s:
                    t[m] = s
                else:
                    del t[m]
            elif c:
                t[m] = c
        return self

    def __add__(self, other):
        return self.copy().add_to(other)

    def __sub__(self, other):
        return self.copy().add_to(other, Scalar.const(-1))

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def scale(self, c):
        return Poly({m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Scalar):
            return self.scale(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                c = c1 * c2
                if m in out:
                    s = out[m] + c
                    if s:
                        out[m] = s
                    else:
                        del out[m]
                elif c:
                    out[m] = c
        return Poly(out)

    def variables(self):
        return sorted({v for m in self.terms for v in m})

    def degree(self):
        return max((len(m) for m in self.terms), default=-1)

    def is_constant(self):
        return all(not m for m in self.terms)

    def constant(self):
        return self.terms.get((), None)

    def linear_coefficient(self, v):
        """Coefficient of ``v`` when ``v`` occurs only in the degree-one monomial."""
        c = None
        for m, coef in self.terms.items():
            if v in m:
                if m != (v,):
                    return None
                c = coef
        return c

    def substitute(self, v, expr):
        """Replace variable ``v`` by the polynomial ``expr``."""
        if not any(v in m for m in self.terms):
            return self
        out = Poly()
        powers = {1: expr}
        for m, c in self.terms.items():
            k = m.count(v)
            if not k:
                out.add_to(Poly({m: c}))
                continue
            if k not in powers:
                p = expr
                for _ in range(k - 1):
                    p = p * expr
                powers[k] = p
            rest = tuple(x for x in m if x != v)
            out.add_to(Poly({rest: c}) * powers[k])
        return out

    def evaluate(self, values, units=None):
        """Value at ``values`` (dict var -> Scalar); units are substituted by ``units``."""
        total = Scalar.const(0)
        for m, c in self.terms.items():
            t = c.evaluate(units) if units is not None else c
            for v in m:
                t = t * values[v]
            total = total + t
        return total

    def format(self, names):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (len(m), m)):
            c = self.terms[m]
            mon = "*".join(names[v] for v in m)
            cs = str(c)
            if not mon:
                parts.append(cs)
            elif cs == "1":
                parts.append(mon)
            elif cs == "-1":
                parts.append("-" + mon)
            elif c.is_unit() and not cs.startswith("(") and "+" not in cs and "-" not in cs[1:]:
                parts.append(f"{cs}*{mon}")
            else:
                parts.append(f"({cs})*{mon}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def to_json(self, names):
        return self.format(names)


# -- system ------------------------------------------------------------------------

@dataclass(frozen=True)
class DeformationUnknown:
    name: str
    slot: tuple | None     # (i, j, k) with i < j, or None for a declared parameter
    excess: int            # deg k - deg i - deg j (0 for declared parameters)
    partner: int | None = None  # index of the unknown on the conjugate slot
    real: bool = False


@dataclass
class Pin:
    x: str
    y: str
    z: str
    const: Scalar
    coeffs: dict = field(default_factory=dict)  # declared unknown name -> Scalar
    note: str = ""


@dataclass
class DeformationSystem:
    base: GradedLieAlgebra
    unknowns: list
    constants: dict          # (i, j) with i < j -> {k: Poly}
    pins: list
    graded_by: int | None
    weights: dict | None
    notes: list = field(default_factory=list)
    _equations: list | None = None

    @property
    def names(self):
        return [u.name for u in self.unknowns]

    def structure_constant(self, i, j, k):
        if i == j:
            return Poly()
        if i < j:
            return self.constants.get((i, j), {}).get(k, Poly())
        return -self.constants.get((j, i), {}).get(k, Poly())

    def bracket_row(self, i, j):
        if i == j:
            return {}
        if i < j:
            return self.constants.get((i, j), {})
        return {k: -p for k, p in self.constants.get((j, i), {}).items()}


def _conj_slot(g, i, j, k):
    a, b, c = g.basis[i].conj, g.basis[j].conj, g.basis[k].conj
    if a < b:
        return (a, b, c), 1
    return (b, a, c), -1


def _parse_pin_value(val, ctx):
    if isinstance(val, dict):
        const = parse_scalar(val.get("const", "0"), ctx)
        coeffs = {name: parse_scalar(c, ctx) for name, c in val.get("vars", {}).items()}
        return const, coeffs
    return parse_scalar(val, ctx), {}


def build_deformation(base, unknown_policy="all", pins=(), graded_by=None, parameters=(),
                      auto_conjugate=True):
    """Set up the unknown corrections of a graded bracket.

    ``unknown_policy`` is ``"all"`` (every admissible slot of positive
    excess), ``"none"``, or an explicit list of slots ``(x, y, z)``.
    ``pins`` fixes slot coefficients to constants or linear combinations of
    the declared ``parameters`` (dicts with ``name`` and ``real``).
    ``graded_by`` names an element S whose bracket stays graded and whose
    eigenvalues must be additive on every unknown slot.
    """
    g = base
    if g.filtered:
        raise DeformationError("the base of a deformation must be graded")
    ctx = g.ctx
    n = g.dim
    unknowns = []
    pname = {}
    for p in parameters:
        pname[p["name"]] = len(unknowns)
        unknowns.append(DeformationUnknown(p["name"], None, 0, None, bool(p.get("real", False))))

    weights = None
    s_idx = None
    if graded_by is not None:
        s_idx = g.idx(graded_by)
        ad = g.ad_matrix(s_idx)
        weights = {}
        for (r, c), v in ad.items():
            if r != c:
                raise DeformationError(f"ad({graded_by}) is not diagonal on the basis")
        for k in range(n):
            w = ad.get((k, k), Scalar.const(0, 0, ctx))
            if not w.is_constant():
                raise DeformationError("grading eigenvalues must be constants")
            weights[k] = w

    # pins, closed under conjugation
    pinned = {}

    def put(i, j, k, const, coeffs, note):
        if i > j:
            i, j = j, i
            const = -const
            coeffs = {nm: -c for nm, c in coeffs.items()}
        if i == j:
            raise DeformationError("a pin on [x, x] is meaningless")
        key = (i, j, k)
        val = (const, tuple(sorted(coeffs.items())))
        if key in pinned and pinned[key][0] != val:
            raise DeformationError(
                f"slot [{g.basis[i].name},{g.basis[j].name}]->{g.basis[k].name} pinned twice with different values")
        pinned[key] = (val, note)

    pin_objs = []
    for p in pins:
        if not isinstance(p, Pin):
            raise DeformationError("pins must be Pin instances")
        for nm in p.coeffs:
            if nm not in pname:
                raise DeformationError(f"pin refers to undeclared parameter {nm!r}")
        i, j, k = g.idx(p.x), g.idx(p.y), g.idx(p.z)
        put(i, j, k, p.const, dict(p.coeffs), p.note)
        pin_objs.append(p)
        if auto_conjugate:
            (a, b, c), sgn = _conj_slot(g, min(i, j), max(i, j), k)
            sg = 1 if i < j else -1
            cc = {}
            for nm, v in p.coeffs.items():
                u = unknowns[pname[nm]]
                if not u.real:
                    raise DeformationError(
                        f"conjugating a pin needs {nm!r} to be real (declare a separate parameter otherwise)")
                cc[nm] = v.conj()
            const = p.const.conj()
            if sg * sgn < 0:
                const = -const
                cc = {nm: -v for nm, v in cc.items()}
            put(a, b, c, const, cc, p.note + " (conjugate)" if p.note else "conjugate")

    # pinned values must agree with the graded part on slots of excess 0
    for (i, j, k), ((const, coeffs), note) in pinned.items():
        exc = g.basis[k].degree - g.basis[i].degree - g.basis[j].degree
        if exc < 0:
            raise DeformationError("pin on a slot of negative excess violates the filtration")
        graded = g.bracket_basis(i, j).get(k, Scalar.const(0, 0, ctx))
        if exc == 0 and (coeffs or const != graded):
            raise DeformationError(
                f"pin on graded slot [{g.basis[i].name},{g.basis[j].name}]->{g.basis[k].name} "
                f"disagrees with the graded bracket")
        if s_idx is not None and s_idx in (i, j) and (coeffs or const != graded):
            raise DeformationError("pins on brackets with the grading element must equal their graded value")

    if unknown_policy == "all":
        explicit = None
    elif unknown_policy == "none":
        explicit = set()
    else:
        explicit = set()
        for x, y, z in unknown_policy:
            i, j = g.idx(x), g.idx(y)
            explicit.add((min(i, j), max(i, j), g.idx(z)))

    slot_var = {}
    constants = {}
    for i in range(n):
        for j in range(i + 1, n):
            row = {}
            for k, c in g.bracket_basis(i, j).items():
                row[k] = Poly.const(c)
            for k in range(n):
                exc = g.basis[k].degree - g.basis[i].degree - g.basis[j].degree
                key = (i, j, k)
                if key in pinned:
                    (const, coeffs), _ = pinned[key]
                    if exc > 0:
                        p = Poly.const(const)
                        for nm, v in coeffs:
                            p.add_to(Poly.var(pname[nm], v))
                        row[k] = p
                    continue
                if exc <= 0:
                    continue
                if explicit is not None and key not in explicit:
                    continue
                if s_idx is not None:
                    if s_idx in (i, j):
                        continue
                    if weights[k] != weights[i] + weights[j]:
                        continue
                name = f"c[{g.basis[i].name},{g.basis[j].name};{g.basis[k].name}]"
                slot_var[key] = len(unknowns)
                unknowns.append(DeformationUnknown(name, key, exc))
                row[k] = Poly.var(len(unknowns) - 1, Scalar.const(1, 0, ctx))
            if row:
                constants[(i, j)] = row

    # conjugate partners
    final = []
    for idx, u in enumerate(unknowns):
        if u.slot is None:
            final.append(u)
            continue
        cs, _ = _conj_slot(g, *u.slot)
        final.append(DeformationUnknown(u.name, u.slot, u.excess, slot_var.get(cs), u.real))
    return DeformationSystem(g, final, constants, pin_objs, s_idx, weights)


def jacobi_system(ds):
    """Jacobi equations: one polynomial per basis triple and output component."""
    if ds._equations is not None:
        return ds._equations
    g = ds.base
    n = g.dim
    eqs = []
    for a, b, c in combinations(range(n), 3):
        acc = {}
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            for m, p in ds.bracket_row(x, y).items():
                for k, q in ds.bracket_row(m, z).items():
                    acc.setdefault(k, Poly()).add_to(p * q)
        for k in sorted(acc):
            if acc[k]:
                eqs.append(((a, b, c, k), acc[k]))
    ds._equations = eqs
    return eqs


# -- elimination -------------------------------------------------------------------

@dataclass
class Step:
    kind: str                 # "substitute" or "contradiction"
    var: int | None
    expr: Poly | None
    equation: int             # index into the original equation list
    branch: tuple = ()

    def describe(self, ds):
        names = ds.names
        if self.kind == "substitute":
            return f"eq#{self.equation}: {names[self.var]} := {self.expr.format(names)}"
        return f"eq#{self.equation} reduces to {self.expr.format(names)}, which involves no unknowns"


@dataclass
class Verdict:
    status: str               # "Inconsistent" | "Residual" | "Consistent"
    steps: list
    residual: list = field(default_factory=list)  # (equation index, polynomial)
    certificate: tuple | None = None  # (equation index, constant)
    assumptions: list = field(default_factory=list)

    def substitutions(self):
        return [(s.var, s.expr) for s in self.steps if s.kind == "substitute"]

    def to_dict(self, ds):
        names = ds.names
        out = {
            "verdict": self.status,
            "unknowns": len(ds.unknowns),
            "equations": len(jacobi_system(ds)),
            "steps": len([s for s in self.steps if s.kind == "substitute"]),
        }
        if self.certificate is not None:
            out["certificate"] = {"equation": self.certificate[0],
                                  "triple": [ds.base.basis[k].name for k in jacobi_system(ds)[self.certificate[0]][0]],
                                  "value": str(self.certificate[1])}
        if self.residual:
            out["residual"] = [p.format(names) for _, p in self.residual]
        if self.assumptions:
            out["assumptions"] = [str(a) + " != 0" for a in self.assumptions]
        return out

    def trace_lines(self, ds):
        return [s.describe(ds) for s in self.steps]


def _pick(eqs, alive):
    """Equation and variable for the next unit substitution, or None."""
    best = None
    for e in alive:
        p = eqs[e]
        vs = p.variables()
        if best is not None and len(vs) > best[0]:
            continue
        for v in vs:
            c = p.linear_coefficient(v)
            if c is not None and c.is_unit():
                key = (len(vs), v, e)
                if best is None or key < best:
                    best = key
                break
    if best is None:
        return None
    return best[2], best[1]


def eliminate(ds, on_step=None):
    """Linear-cascade elimination of the Jacobi system.

    ``on_step`` is called with each :class:`Step` as soon as it is made.
    """
    original = jacobi_system(ds)
    eqs = [p.copy() for _, p in original]
    alive = set(range(len(eqs)))
    occurs = {}
    for e, p in enumerate(eqs):
        for v in p.variables():
            occurs.setdefault(v, set()).add(e)
    steps = []

    def emit(step):
        steps.append(step)
        if on_step is not None:
            on_step(step)

    while True:
        for e in sorted(alive):
            p = eqs[e]
            if not p:
                alive.discard(e)
            elif p.is_constant():
                step = Step("contradiction", None, p, e)
                emit(step)
                return Verdict("Inconsistent", steps, certificate=(e, p.constant()))
        if not alive:
            return Verdict("Consistent", steps)
        choice = _pick(eqs, sorted(alive))
        if choice is None:
            res = [(e, eqs[e]) for e in sorted(alive)]
            return Verdict("Residual", steps, residual=res)
        e, v = choice
        p = eqs[e]
        a = p.linear_coefficient(v)
        rest = p - Poly.var(v, a)
        expr = rest.scale(-a.inverse())
        emit(Step("substitute", v, expr, e))
        touched = occurs.pop(v, set())
        for f in touched:
            if f not in alive:
                continue
            q = eqs[f].substitute(v, expr)
            eqs[f] = q
            for w in q.variables():
                occurs.setdefault(w, set()).add(f)
        alive.discard(e)


def replay(ds, verdict):
    """Re-run the recorded substitutions on the original system.

    Returns the terminal status reached; it must equal ``verdict.status``.
    """
    eqs = [p.copy() for _, p in jacobi_system(ds)]
    used = set()
    for s in verdict.steps:
        q = eqs[s.equation]
        if s.equation in used:
            return "BrokenTrace"
        if s.kind != "substitute":
            return "Inconsistent" if q and q.is_constant() else "BrokenTrace"
        a = q.linear_coefficient(s.var)
        if a is None or not a.is_unit():
            return "BrokenTrace"
        if (q - Poly.var(s.var, a)).scale(-a.inverse()).terms != s.expr.terms:
            return "BrokenTrace"
        used.add(s.equation)
        eqs = [p if k in used else p.substitute(s.var, s.expr) for k, p in enumerate(eqs)]
    remaining = [p for k, p in enumerate(eqs) if k not in used and p]
    return "Residual" if remaining else "Consistent"


def check_certificate(ds, verdict):
    """Apply the substitutions to the certificate equation only and test for a nonzero constant."""
    if verdict.certificate is None:
        return False
    e, value = verdict.certificate
    p = jacobi_system(ds)[e][1]
    for v, expr in verdict.substitutions():
        p = p.substitute(v, expr)
    return p.is_constant() and bool(p) and p.constant() == value


# -- random soundness checks ---------------------------------------------------------

def _random_unit_value(rng):
    # a Gaussian rational of modulus one: ((a^2-b^2) + 2abi) / (a^2+b^2)
    while True:
        a, b = rng.randint(-9, 9), rng.randint(1, 9)
        n = a * a + b * b
        if n:
            return Scalar.const(Fraction(a * a - b * b, n), Fraction(2 * a * b, n))


def _random_value(rng):
    return Scalar.const(Fraction(rng.randint(-20, 20), rng.randint(1, 6)),
                        Fraction(rng.randint(-20, 20), rng.randint(1, 6)))


def sample_solutions(ds, verdict, count=100, seed=0, max_tries=50):
    """Random points satisfying the residual system, extended by back-substitution.

    Returns a list of (assignment, unit values).  Residual equations are
    satisfied by solving them one at a time for a variable in which they
    are linear, or by zeroing a variable dividing all their monomials.
    Attempts alternate between dense and sparse random choices (free
    variables set to zero with some probability), since dense choices
    rarely satisfy overdetermined residual systems.
    """
    rng = random.Random(seed)
    subs = verdict.substitutions()
    solved = {v for v, _ in subs}
    nvars = len(ds.unknowns)
    out = []
    for _ in range(count):
        for attempt in range(max_tries):
            sparsity = (0.0, 0.5, 0.8, 0.95)[attempt % 4]

            def pick():
                return Scalar.const(0) if rng.random() < sparsity else _random_value(rng)

            units = {nm: _random_unit_value(rng) for nm in ds.base.ctx.names}
            vals = {}
            ok = True
            for _, p in verdict.residual:
                q = Poly({m: Scalar.const(*c.evaluate(units).constant_value()) for m, c in p.terms.items()})
                for v, val in vals.items():
                    q = q.substitute(v, Poly.const(val))
                if not q:
                    continue
                free = [v for v in q.variables() if v not in vals]
                # a free variable dividing every monomial can be zeroed
                common = [v for v in free if all(v in m for m in q.terms)]
                if common and rng.random() < max(sparsity, 0.25):
                    vals[rng.choice(common)] = Scalar.const(0)
                    continue
                # a variable of degree at most one in every monomial becomes
                # linear once the others are fixed at random values
                target = next((v for v in free if all(m.count(v) <= 1 for m in q.terms)), None)
                if target is not None:
                    trial = dict(vals)
                    for v in free:
                        if v != target:
                            trial[v] = pick()
                            q = q.substitute(v, Poly.const(trial[v]))
                    if not q:
                        vals = trial
                        continue
                    a = q.linear_coefficient(target)
                    if a is not None and a:
                        rest = q - Poly.var(target, a)
                        trial[target] = -(rest.constant() or Scalar.const(0)) * a.inverse()
                        vals = trial
                        continue
                if common:
                    vals[common[0]] = Scalar.const(0)
                    continue
                ok = False
                break
            if not ok:
                continue
            for v in range(nvars):
                if v not in solved and v not in vals:
                    vals[v] = pick()
            for v, expr in reversed(subs):
                q = Poly({m: Scalar.const(*c.evaluate(units).constant_value()) for m, c in expr.terms.items()})
                vals[v] = q.evaluate(vals)
            # residual equations must hold at the sample
            if all(p.evaluate(vals, units) == 0 for _, p in verdict.residual):
                out.append((vals, units))
                break
    return out


def check_soundness(ds, verdict, count=100, seed=0):
    """True when every sampled residual solution satisfies all original equations."""
    samples = sample_solutions(ds, verdict, count, seed)
    if len(samples) < count:
        raise DeformationError(f"only {len(samples)} of {count} residual solutions could be sampled")
    for vals, units in samples:
        for _, p in jacobi_system(ds):
            if p.evaluate(vals, units) != 0:
                return False
    return True


# -- deform.v1 -------------------------------------------------------------------------

def deformation_from_dict(d):
    from .errors import InputError
    from .liealg import algebra_from_dict
    base = algebra_from_dict(d, filtered=False)
    ctx = base.ctx
    try:
        unk = d.get("unknowns", {"policy": "all"})
        policy = unk.get("policy", "all")
        if isinstance(policy, list):
            policy = [tuple(s) for s in policy]
        params = unk.get("parameters", [])
        pins = []
        for p in d.get("pinned", []):
            const, coeffs = _parse_pin_value(p["value"], ctx)
            pins.append(Pin(p["x"], p["y"], p["z"], const, coeffs, p.get("note", "")))
        graded_by = d.get("graded_by")
        return build_deformation(base, policy, pins, graded_by, params,
                                 auto_conjugate=d.get("auto_conjugate", True))
    except KeyError as e:
        raise InputError(f"missing field {e.args[0]!r}") from None
    except (DeformationError, LieAlgebraError) as e:
        raise InputError(str(e)) from None


def load_deformation(path):
    from .errors import load_json
    return deformation_from_dict(load_json(path))


def specialize_units(d, values):
    """Copy of deformation input ``d`` with some units fixed to unit scalars of the others.

    ``values`` maps a unit name to text such as ``"I*u1^-2"``.  Every scalar
    string mentioning a specialized unit is rewritten; other strings are kept.
    This is how special values of a phase, excluded by a generic certificate,
    are examined separately.
    """
    old = UnitContext(tuple(d.get("units", ())))
    new = UnitContext(tuple(n for n in old.names if n not in values))
    subs = {k: parse_scalar(v, new) for k, v in values.items()}
    for k, v in subs.items():
        if k not in old.names:
            raise DeformationError(f"unknown unit {k!r}")
        if not v.is_unit():
            raise DeformationError(f"{k} := {v} is not a unit")
    idx = {old.names.index(k) for k in values}

    def walk(x):
        if isinstance(x, dict):
            return {k: walk(v) for k, v in x.items()}
        if isinstance(x, list):
            return [walk(v) for v in x]
        if isinstance(x, str):
            try:
                sc = parse_scalar(x, old)
            except (ScalarParseError, ValueError):
                return x
            if idx & set(sc.units_used()):
                return format_scalar(sc.substitute_units(subs, new))
        return x

    out = walk(copy.deepcopy(d))
    out["units"] = list(new.names)
    return out


def certificate_exceptions(d, verdict):
    """Unit specializations on which a non-unit certificate vanishes.

    A one-term certificate is a unit and has none.  A two-term certificate
    c1*m1 + c2*m2 vanishes exactly when m1/m2 = -c2/c1; this is solved for
    one unit whose exponent is +-1 or +-2, giving at most two specializations
    (as accepted by :func:`specialize_units`).  Other shapes raise.
    """
    import sympy as sp
    if verdict.certificate is None:
        return []
    cert = verdict.certificate[1]
    if cert.is_unit():
        return []
    names = cert.ctx.names
    terms = list(cert.terms)
    if len(terms) != 2:
        raise DeformationError(f"cannot describe where {cert} vanishes")
    (e1, (x1, y1)), (e2, (x2, y2)) = terms
    diff = [a - b for a, b in zip(e1, e2)]
    r = -sp.Rational(x2.numerator, x2.denominator) - sp.I * sp.Rational(y2.numerator, y2.denominator)
    r = sp.nsimplify(r / (sp.Rational(x1.numerator, x1.denominator) + sp.I * sp.Rational(y1.numerator, y1.denominator)))
    for k in reversed(range(len(names))):
        dk = diff[k]
        if abs(dk) not in (1, 2) or any(diff[j] % dk for j in range(len(names)) if j != k):
            continue
        z = sp.Symbol("z")
        roots = sp.roots(sp.Poly(z ** abs(dk) - (r if dk > 0 else 1 / r), z))
        if sum(roots.values()) != abs(dk) or any(not sp.re(q).is_Rational or not sp.im(q).is_Rational for q in roots):
            continue
        rest = "*".join(f"{names[j]}^{-diff[j] // dk}" for j in range(len(names)) if j != k and diff[j])
        out = []
        for q in sorted(roots, key=lambda q: (sp.re(q), sp.im(q))):
            c = str(sp.nsimplify(q)).replace("**", "^")
            out.append({names[k]: f"({c})*{rest}" if rest else f"({c})"})
        return out
    raise DeformationError(f"cannot describe where {cert} vanishes")


def settle(d, on_step=None, on_branch=None, _spec=None):
    """Eliminate, then re-run on every unit specialization excluded by the certificate.

    Returns a list of (specialization, system, verdict); the first entry is the
    generic run with an empty specialization.  The overall outcome is
    Inconsistent when every entry is Inconsistent.  ``on_branch`` receives the
    specialization before each run and ``on_step`` receives (step, system) as
    each substitution is made.
    """
    spec = dict(_spec or {})
    if on_branch is not None:
        on_branch(spec)
    ds = deformation_from_dict(d)
    v = eliminate(ds, None if on_step is None else (lambda s: on_step(s, ds)))
    out = [(spec, ds, v)]
    if v.status == "Inconsistent":
        for sub in certificate_exceptions(d, v):
            out.extend(settle(specialize_units(d, sub), on_step, on_branch, {**spec, **sub}))
    return out


class _OverBudget(Exception):
    pass


@dataclass
class PinAudit:
    """Outcome of settling a system with one pinned relation removed."""
    index: int
    pin: dict
    outcome: str              # a verdict status, "Unfinished" or "Undetermined"

    @property
    def critical(self):
        return self.outcome != "Inconsistent"

    def label(self):
        p = self.pin
        val = p["value"] if isinstance(p["value"], str) else json.dumps(p["value"], sort_keys=True)
        return f"[{p['x']},{p['y']}] -> {p['z']} = {val}"

    def to_dict(self):
        return {"index": self.index, "pin": self.label(), "outcome": self.outcome,
                "critical": self.critical}


def audit_pins(d, max_steps=100, max_terms=40):
    """Settle ``d`` once per pinned relation, with that relation removed.

    A relation is critical when its removal changes the overall verdict away
    from Inconsistent.  Runs that exceed ``max_steps`` substitutions in a
    branch, or substitute an expression with more than ``max_terms`` terms,
    are reported as "Unfinished"; certificates whose zero set cannot be
    split on are reported as "Undetermined".  Both count as critical.
    """
    out = []
    for k, pin in enumerate(d.get("pinned", [])):
        d2 = copy.deepcopy(d)
        del d2["pinned"][k]
        count = [0]

        def step(s, ds):
            count[0] += 1
            if count[0] > max_steps or (s.expr is not None and len(s.expr.terms) > max_terms):
                raise _OverBudget

        try:
            statuses = {v.status for _, _, v in settle(d2, on_step=step, on_branch=lambda spec: count.__setitem__(0, 0))}
            outcome = "Inconsistent" if statuses == {"Inconsistent"} else \
                next(s for s in ("Consistent", "Residual") if s in statuses)
        except _OverBudget:
            outcome = "Unfinished"
        except DeformationError:
            outcome = "Undetermined"
        out.append(PinAudit(k, copy.deepcopy(pin), outcome))
    return out
