"""A closed differential ring of coordinate functions.

An element is a finite sum  sum_k c_k * p^{a_k} * exp(b_k * p)  where ``p`` is
the distinguished curve variable of the ring, the keys ``(a_k, b_k)`` are
pairwise distinct, and each coefficient ``c_k`` is a rational function (over
the Gaussian rationals) in the chart coordinates, ``ln p`` and the real
parameters.  Integer parts of ``a_k`` are moved into the coefficient, so two
functions are equal iff their keyed coefficients agree.  cos and sin are
stored through exponentials, which makes cos^2 + sin^2 = 1 automatic.

Parameters are treated as independent transcendentals: the zero test is
exact for generic parameter values.  Substitute rational values to study a
specific member of a family.
"""

from __future__ import annotations

from fractions import Fraction
from math import floor

import sympy as sp
from sympy.parsing.sympy_parser import parse_expr, standard_transformations
from sympy.polys.fields import field

__all__ = ["FunctionRing", "CoordFunction", "FunctionError"]


class FunctionError(ValueError):
    pass


def _real_symbol(name):
    return sp.Symbol(name, real=True)


class FunctionRing:
    """Coordinates, an optional curve variable and real parameters."""

    def __init__(self, coords, param=None, parameters=()):
        coords = tuple(coords)
        if param is not None and param not in coords:
            raise FunctionError(f"curve variable {param!r} is not a coordinate")
        self.coords = coords
        self.param = param
        self.parameters = tuple(parameters)
        self.log_name = f"ln_{param}" if param else None
        names = list(coords) + ([self.log_name] if param else []) + list(self.parameters)
        if len(set(names)) != len(names):
            raise FunctionError("coordinate and parameter names must be distinct")
        self.symbols = {n: _real_symbol(n) for n in names}
        self.field, *gens = field([self.symbols[n] for n in names], sp.QQ_I)
        self.ring = self.field.ring
        self.gens = dict(zip(names, gens))
        self.gen_index = {n: k for k, n in enumerate(names)}
        self.domain = self.ring.domain

    def __repr__(self):
        return f"FunctionRing(coords={self.coords}, param={self.param!r}, parameters={self.parameters})"

    def same(self, other):
        return (self.coords, self.param, self.parameters) == (other.coords, other.param, other.parameters)

    # -- constructors ---------------------------------------------------------
    def const(self, c):
        return CoordFunction(self, {_ZERO_KEY: self._coef(c)})

    def zero(self):
        return CoordFunction(self, {})

    def one(self):
        return self.const(1)

    def coord(self, name):
        if name not in self.coords:
            raise FunctionError(f"unknown coordinate {name!r}")
        return CoordFunction(self, {_ZERO_KEY: self.gens[name]})

    def symbol(self, name):
        """A parameter or coordinate as a function."""
        if name in self.coords:
            return self.coord(name)
        if name in self.parameters:
            return CoordFunction(self, {_ZERO_KEY: self.gens[name]})
        raise FunctionError(f"unknown name {name!r}")

    def log_param(self):
        self._need_param()
        return CoordFunction(self, {_ZERO_KEY: self.gens[self.log_name]})

    def power(self, a):
        """p^a for a rational or parameter-linear exponent ``a``."""
        self._need_param()
        return CoordFunction(self, {(sp.sympify(a), sp.Integer(0)): self.field.one})

    def exp(self, b):
        """exp(b*p) for a constant ``b`` (may involve I and parameters)."""
        self._need_param()
        return CoordFunction(self, {(sp.Integer(0), sp.sympify(b)): self.field.one})

    def cos(self, b):
        b = sp.sympify(b)
        return (self.exp(sp.I * b) + self.exp(-sp.I * b)) * self.const(sp.Rational(1, 2))

    def sin(self, b):
        b = sp.sympify(b)
        return (self.exp(sp.I * b) - self.exp(-sp.I * b)) * self.const(-sp.I / 2)

    def _need_param(self):
        if self.param is None:
            raise FunctionError("this ring has no curve variable")

    def _coef(self, c):
        if isinstance(c, Fraction):
            c = sp.Rational(c.numerator, c.denominator)
        if hasattr(c, "ctx") and hasattr(c, "constant_value"):  # a constant Scalar
            re, im = c.constant_value()
            c = sp.Rational(re.numerator, re.denominator) + sp.I * sp.Rational(im.numerator, im.denominator)
        return self.field.from_expr(sp.sympify(c).subs(self._plain_to_real()))

    def _plain_to_real(self):
        return {sp.Symbol(n): s for n, s in self.symbols.items()}

    # -- sympy bridge ------------------------------------------------------------
    def from_sympy(self, expr):
        """Convert a sympy expression built from the ring's names, exp, log, cos, sin."""
        expr = sp.sympify(expr).subs(self._plain_to_real())
        return _convert(self, expr)

    def parse(self, text):
        """Parse a component string such as ``"t^2*exp(-2*t)"`` or ``"cos(beta*t)"``."""
        local = dict(self.symbols)
        local.update({"exp": sp.exp, "ln": sp.log, "log": sp.log, "cos": sp.cos, "sin": sp.sin,
                      "I": sp.I, "E": sp.E})
        try:
            expr = parse_expr(text.replace("^", "**"), local_dict=local,
                              transformations=standard_transformations, evaluate=True)
        except Exception as e:  # sympy raises several exception types here
            raise FunctionError(f"cannot parse {text!r}: {e}") from None
        return self.from_sympy(expr)

    def key_to_field(self, e):
        return self.field.from_expr(sp.sympify(e).subs(self._plain_to_real()))

    def frac_diff(self, f, name):
        """Partial derivative of a coefficient with respect to a generator."""
        g = self.ring.gens[self.gen_index[name]]
        p, q = f.numer, f.denom
        dp, dq = p.diff(g), q.diff(g)
        if not dq:
            return self.field.new(dp, q)
        return self.field.new(dp * q - p * dq, q * q)

    def frac_conj(self, f):
        D = self.domain
        def c(poly):
            return self.ring({m: D(v.x, -v.y) for m, v in poly.terms()})
        return self.field.new(c(f.numer), c(f.denom))

    def transfer(self, f):
        """Bring a function of another ring (with compatible names) into this one."""
        if f.ring is self:
            return f
        return self.from_sympy(f.as_expr())


_ZERO_KEY = (sp.Integer(0), sp.Integer(0))


def _split_key(ring, a, b):
    """Normalize a key; returns (key, integer shift of the power)."""
    a = sp.expand(sp.sympify(a))
    b = sp.expand(sp.sympify(b))
    const = a.as_independent(*a.free_symbols, as_Add=True)[0] if a.free_symbols else a
    if not const.is_Rational:
        raise FunctionError(f"exponent {a} has a non-rational constant part")
    n = int(floor(const))
    return (sp.expand(a - n), b), n


def _key_sort(k):
    return (sp.default_sort_key(k[0]), sp.default_sort_key(k[1]))


class CoordFunction:
    """Immutable element of a :class:`FunctionRing`."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        # terms: key -> field element; keys are normalized here
        out = {}
        for (a, b), c in terms.items():
            if not c:
                continue
            if (a, b) == _ZERO_KEY:
                key, n = _ZERO_KEY, 0
            else:
                key, n = _split_key(ring, a, b)
            if n:
                c = c * ring.gens[ring.param] ** n
            if key in out:
                s = out[key] + c
                if s:
                    out[key] = s
                else:
                    del out[key]
            else:
                out[key] = c
        self.ring = ring
        self.terms = out

    # -- predicates ------------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_unit(self):
        """Single generalized monomial with a nonzero coefficient (invertible generically)."""
        return len(self.terms) == 1

    def is_constant(self):
        if list(self.terms) not in ([], [_ZERO_KEY]):
            return False
        c = self.terms.get(_ZERO_KEY)
        return c is None or (c.numer.is_ground and c.denom.is_ground)

    def constant_value(self):
        if not self.is_constant():
            raise FunctionError("not a constant")
        c = self.terms.get(_ZERO_KEY)
        return sp.Integer(0) if c is None else sp.nsimplify(c.as_expr())

    def complexity(self):
        return 1000 * len(self.terms) + sum(len(c.numer) + len(c.denom) for c in self.terms.values())

    def depends_on(self, name):
        if name == self.ring.param and any(k != _ZERO_KEY for k in self.terms):
            return True
        names = [name]
        if name == self.ring.param:
            names.append(self.ring.log_name)
        idx = [self.ring.gen_index[n] for n in names]
        for c in self.terms.values():
            for poly in (c.numer, c.denom):
                for m in poly.monoms():
                    if any(m[i] for i in idx):
                        return True
        return False

    # -- arithmetic ------------------------------------------------------------
    def _other(self, other):
        if isinstance(other, CoordFunction):
            if other.ring is not self.ring:
                raise FunctionError("functions from different rings")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._other(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            if k in t:
                s = t[k] + c
                if s:
                    t[k] = s
                else:
                    del t[k]
            else:
                t[k] = c
        return _raw(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return _raw(self.ring, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        other = self._other(other)
        if len(other.terms) == 1 and _ZERO_KEY in other.terms:
            c = other.terms[_ZERO_KEY]
            return _raw(self.ring, {k: v * c for k, v in self.terms.items()})
        if len(self.terms) == 1 and _ZERO_KEY in self.terms:
            return other * self
        acc = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = (k1[0] + k2[0], k1[1] + k2[1])
                acc.setdefault(key, []).append(c1 * c2)
        return CoordFunction(self.ring, {k: _sum(v, self.ring) for k, v in acc.items()})

    __rmul__ = __mul__

    def inverse(self):
        if not self.is_unit():
            raise ZeroDivisionError("only single generalized monomials can be inverted")
        (a, b), c = next(iter(self.terms.items()))
        return CoordFunction(self.ring, {(-a, -b): 1 / c})

    def __truediv__(self, other):
        return self * self._other(other).inverse()

    def __rtruediv__(self, other):
        return self._other(other) * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("integer powers only")
        if n < 0:
            return self.inverse() ** (-n)
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) or isinstance(other, sp.Basic):
            other = self.ring.const(other)
        if not isinstance(other, CoordFunction):
            return NotImplemented
        return not (self - other)

    def __hash__(self):
        raise TypeError("CoordFunction is not hashable")

    # -- calculus and conjugation ---------------------------------------------------
    def diff(self, name):
        ring = self.ring
        if name not in ring.coords:
            raise FunctionError(f"unknown coordinate {name!r}")
        out = {}
        p = ring.param
        for (a, b), c in self.terms.items():
            d = ring.frac_diff(c, name)
            if name == p:
                pg = ring.gens[p]
                d = d + ring.frac_diff(c, ring.log_name) / pg
                if a != 0:
                    d = d + ring.key_to_field(a) * c / pg
                if b != 0:
                    d = d + ring.key_to_field(b) * c
            if d:
                out[(a, b)] = d
        return _raw(ring, out)

    def conj(self):
        ring = self.ring
        out = {}
        for (a, b), c in self.terms.items():
            out[(a, sp.expand(sp.conjugate(b)))] = ring.frac_conj(c)
        return CoordFunction(ring, out)

    def real_part(self):
        return (self + self.conj()) * self.ring.const(sp.Rational(1, 2))

    def imag_part(self):
        return (self - self.conj()) * self.ring.const(-sp.I / 2)

    def subs(self, values):
        """Substitute rational values for parameters (or coordinates); returns a function of the same ring."""
        ring = self.ring
        rv = {ring.symbols[k]: sp.sympify(v) for k, v in values.items()}
        return ring.from_sympy(self.as_expr().subs(rv))

    # -- output ----------------------------------------------------------------------
    def as_expr(self):
        ring = self.ring
        total = sp.Integer(0)
        for (a, b), c in sorted(self.terms.items(), key=lambda kv: _key_sort(kv[0])):
            e = c.as_expr()
            if ring.param:
                e = e.subs(ring.symbols[ring.log_name], sp.log(ring.symbols[ring.param]))
                pv = ring.symbols[ring.param]
                if a != 0:
                    e = e * pv ** a
                if b != 0:
                    e = e * sp.exp(b * pv)
            total = total + e
        return total

    def pretty(self):
        e = self.as_expr()
        try:
            e = sp.factor(e)
        except Exception:  # factor may fail on exotic mixtures; fall back to the raw form
            pass
        return str(e)

    def __str__(self):
        return str(self.as_expr())

    def __repr__(self):
        return f"CoordFunction({self})"


def _raw(ring, terms):
    obj = object.__new__(CoordFunction)
    obj.ring = ring
    obj.terms = terms
    return obj


def _sum(vals, ring):
    s = ring.field.zero
    for v in vals:
        s = s + v
    return s


def _convert(ring, e):
    p = ring.symbols.get(ring.param) if ring.param else None
    if e.is_Number or e is sp.I or (e.is_number and not e.has(sp.exp, sp.log, sp.cos, sp.sin)):
        return ring.const(e)
    if e.is_Symbol:
        for n, s in ring.symbols.items():
            if s == e:
                if n == ring.log_name:
                    return ring.log_param()
                return ring.symbol(n)
        raise FunctionError(f"unknown symbol {e}")
    if e.is_Add:
        out = ring.zero()
        for a in e.args:
            out = out + _convert(ring, a)
        return out
    if e.is_Mul:
        out = ring.one()
        for a in e.args:
            out = out * _convert(ring, a)
        return out
    if e.is_Pow:
        base, ex = e.args
        if p is not None and base == p and not ex.is_Integer:
            if ex.free_symbols - {ring.symbols[n] for n in ring.parameters}:
                raise FunctionError(f"exponent {ex} may only involve parameters")
            return ring.power(ex)
        if ex.is_Integer:
            return _convert(ring, base) ** int(ex)
        raise FunctionError(f"unsupported power {e}")
    if isinstance(e, sp.exp):
        arg = sp.expand(e.args[0])
        if p is None:
            raise FunctionError("exp needs a curve variable")
        coeff = sp.expand(arg / p) if arg.has(p) else None
        if coeff is None or coeff.has(p):
            raise FunctionError(f"exp argument must be linear in {ring.param}: {arg}")
        return ring.exp(coeff)
    if isinstance(e, sp.log):
        if p is not None and e.args[0] == p:
            return ring.log_param()
        raise FunctionError(f"log is only allowed of the curve variable: {e}")
    if isinstance(e, (sp.cos, sp.sin)):
        arg = sp.expand(e.args[0])
        coeff = sp.expand(arg / p) if p is not None and arg.has(p) else None
        if coeff is None or coeff.has(p):
            raise FunctionError(f"trigonometric argument must be linear in the curve variable: {arg}")
        return ring.cos(coeff) if isinstance(e, sp.cos) else ring.sin(coeff)
    raise FunctionError(f"unsupported expression {e}")
