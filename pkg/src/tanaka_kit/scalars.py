"""Exact scalars: Gaussian rationals extended by formal unit symbols.

A :class:`Scalar` is a Laurent polynomial in the unit symbols ``u_1..u_m``
with coefficients in Q(i).  Units model phases such as ``e^{i theta}``, so
conjugation inverts them.  All values are immutable and canonical: zero
coefficients are dropped and terms are kept sorted by exponent vector.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

__all__ = [
    "UnitContext",
    "Scalar",
    "ContextError",
    "ScalarParseError",
    "scalar_normalize",
    "conjugate",
    "parse_scalar",
    "ZERO",
    "ONE",
    "I",
]


class ContextError(ValueError):
    """Raised when scalars from different unit contexts are combined."""


class ScalarParseError(ValueError):
    def __init__(self, msg, text="", pos=0):
        super().__init__(f"{msg} at column {pos + 1} in {text!r}")
        self.text = text
        self.pos = pos


@dataclass(frozen=True)
class UnitContext:
    """Names of the unit symbols available to a computation."""

    names: tuple = ()

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate unit names {names}")
        for n in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", n) or n == "I":
                raise ValueError(f"bad unit name {n!r}")

    @property
    def m(self):
        return len(self.names)

    def unit(self, name, power=1):
        """The scalar ``name**power``."""
        k = self.names.index(name)
        e = [0] * self.m
        e[k] = power
        return Scalar._make(self, {tuple(e): (Fraction(1), Fraction(0))})

    def units(self):
        return [self.unit(n) for n in self.names]

    def const(self, re_part, im_part=0):
        return Scalar.const(re_part, im_part, ctx=self)

    def parse(self, text):
        return parse_scalar(text, self)


EMPTY = UnitContext(())


def _merge_ctx(a, b):
    if a is b or a == b:
        return a
    if a.m == 0:
        return b
    if b.m == 0:
        return a
    raise ContextError(f"unit contexts differ: {a.names} vs {b.names}")


def _lift(terms, src, dst):
    """Re-index exponent vectors of a constant-context term dict."""
    if src.m == dst.m:
        return terms
    # only the empty context is ever lifted
    zero = (0,) * dst.m
    return {zero: c for _, c in terms.items()}


class Scalar:
    """Element of Q(i)[u_1^{+-1}, ..., u_m^{+-1}]."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, *a, **k):
        raise TypeError("use Scalar.const, UnitContext.unit or scalar_normalize")

    @classmethod
    def _make(cls, ctx, terms):
        # terms: dict exps -> (re, im), assumed nonzero entries only
        obj = object.__new__(cls)
        obj.ctx = ctx
        obj.terms = tuple(sorted((e, c) for e, c in terms.items()))
        obj._hash = None
        return obj

    @classmethod
    def const(cls, re_part=0, im_part=0, ctx=EMPTY):
        re_part, im_part = Fraction(re_part), Fraction(im_part)
        if not re_part and not im_part:
            return cls._make(ctx, {})
        return cls._make(ctx, {(0,) * ctx.m: (re_part, im_part)})

    @classmethod
    def coerce(cls, x, ctx=EMPTY):
        if isinstance(x, Scalar):
            return x
        if isinstance(x, complex):
            raise TypeError("floating point values are not accepted")
        if isinstance(x, (int, Fraction)):
            return cls.const(x, 0, ctx)
        raise TypeError(f"cannot make a Scalar from {type(x).__name__}")

    # -- inspection -------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and not any(self.terms[0][0]))

    def is_unit(self):
        """True for a single nonzero term (an invertible element)."""
        return len(self.terms) == 1

    def is_real(self):
        return self == self.conj()

    def constant_value(self):
        """(re, im) of a constant scalar."""
        if not self.terms:
            return Fraction(0), Fraction(0)
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms[0][1]

    def complexity(self):
        return len(self.terms)

    def units_used(self):
        used = set()
        for e, _ in self.terms:
            used.update(k for k, x in enumerate(e) if x)
        return sorted(used)

    # -- arithmetic -------------------------------------------------------
    def _other(self, other):
        if not isinstance(other, Scalar):
            other = Scalar.coerce(other, EMPTY)
        ctx = _merge_ctx(self.ctx, other.ctx)
        a = dict(_lift(dict(self.terms), self.ctx, ctx))
        b = dict(_lift(dict(other.terms), other.ctx, ctx))
        return ctx, a, b

    def __add__(self, other):
        try:
            ctx, a, b = self._other(other)
        except TypeError:
            return NotImplemented
        for e, (x, y) in b.items():
            if e in a:
                p, q = a[e]
                p, q = p + x, q + y
                if p or q:
                    a[e] = (p, q)
                else:
                    del a[e]
            else:
                a[e] = (x, y)
        return Scalar._make(ctx, a)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._make(self.ctx, {e: (-x, -y) for e, (x, y) in self.terms})

    def __sub__(self, other):
        try:
            return self + (-Scalar.coerce(other, self.ctx) if not isinstance(other, Scalar) else -other)
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            ctx, a, b = self._other(other)
        except TypeError:
            return NotImplemented
        out = {}
        for e1, (x1, y1) in a.items():
            for e2, (x2, y2) in b.items():
                e = tuple(i + j for i, j in zip(e1, e2))
                x, y = x1 * x2 - y1 * y2, x1 * y2 + y1 * x2
                if e in out:
                    p, q = out[e]
                    x, y = p + x, q + y
                if x or y:
                    out[e] = (x, y)
                elif e in out:
                    del out[e]
        return Scalar._make(ctx, out)

    __rmul__ = __mul__

    def inverse(self):
        if len(self.terms) != 1:
            raise ZeroDivisionError(f"{self} is not a unit of the scalar ring")
        e, (x, y) = self.terms[0]
        n = x * x + y * y
        return Scalar._make(self.ctx, {tuple(-i for i in e): (x / n, -y / n)})

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            other = Scalar.coerce(other, EMPTY)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other, self.ctx) * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = Scalar.const(1, 0, self.ctx)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self):
        return Scalar._make(self.ctx, {tuple(-i for i in e): (x, -y) for e, (x, y) in self.terms})

    def with_context(self, ctx):
        """Re-home a scalar into ``ctx`` (only from the empty context or ctx itself)."""
        if self.ctx == ctx:
            return self
        if self.ctx.m:
            raise ContextError(f"cannot move {self.ctx.names} scalar to {ctx.names}")
        return Scalar._make(ctx, _lift(dict(self.terms), self.ctx, ctx))

    def evaluate(self, values: Mapping[str, "Scalar"]):
        """Substitute every unit by a constant scalar (e.g. a Gaussian point of modulus 1)."""
        out = Scalar.const(0)
        for e, (x, y) in self.terms:
            t = Scalar.const(x, y)
            for k, p in enumerate(e):
                if p:
                    t = t * Scalar.coerce(values[self.ctx.names[k]]) ** p
            out = out + t
        return out

    def substitute_units(self, values: Mapping[str, "Scalar"], ctx: "UnitContext"):
        """Move to ``ctx`` replacing the units named in ``values`` by unit scalars of ``ctx``."""
        out = Scalar.const(0, 0, ctx)
        for e, (x, y) in self.terms:
            t = Scalar.const(x, y, ctx)
            for k, p in enumerate(e):
                if not p:
                    continue
                name = self.ctx.names[k]
                u = Scalar.coerce(values[name], ctx).with_context(ctx) if name in values else ctx.unit(name)
                t = t * u ** p
            out = out + t
        return out

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other, EMPTY)
            except TypeError:
                return NotImplemented
        if self.ctx != other.ctx and self.ctx.m and other.ctx.m:
            return False
        if self.ctx.m != other.ctx.m:
            # compare through the constant context
            if not (self.is_constant() and other.is_constant()):
                return False
            return self.constant_value() == other.constant_value()
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(("const", self.constant_value()))
            else:
                self._hash = hash((self.ctx.names, self.terms))
        return self._hash

    def sort_key(self):
        return tuple((e, c) for e, c in self.terms)

    # -- printing ---------------------------------------------------------
    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"Scalar({format_scalar(self)!r})"


def _fmt_q(q):
    return str(q.numerator) if q.denominator == 1 else f"({q.numerator}/{q.denominator})"


def _fmt_coef(x, y):
    """Coefficient text plus a flag telling whether it is exactly +-1."""
    if not y:
        if x == 1:
            return "", True
        if x == -1:
            return "-", True
        return _fmt_q(x), False
    if not x:
        if y == 1:
            return "I", False
        if y == -1:
            return "-I", False
        return f"{_fmt_q(y)}*I", False
    sign = "+" if y > 0 else "-"
    ay = abs(y)
    im = "I" if ay == 1 else f"{_fmt_q(ay)}*I"
    return f"({_fmt_q(x)}{sign}{im})", False


def format_scalar(s):
    if not s.terms:
        return "0"
    parts = []
    for e, (x, y) in s.terms:
        coef, unit = _fmt_coef(x, y)
        mons = []
        for k, p in enumerate(e):
            if p == 1:
                mons.append(s.ctx.names[k])
            elif p:
                mons.append(f"{s.ctx.names[k]}^{p}")
        if not mons:
            if unit:
                coef = coef + "1"
            parts.append(coef)
        elif unit:
            parts.append(coef + "*".join(mons))
        else:
            parts.append(coef + "*" + "*".join(mons))
    out = parts[0]
    for p in parts[1:]:
        out += p if p.startswith("-") else "+" + p
    return out


def scalar_normalize(raw: Iterable, ctx: UnitContext = EMPTY):
    """Canonical scalar from a raw list of (coefficient, exponents) pairs.

    A coefficient is an int, Fraction or a (re, im) pair.
    """
    acc = {}
    for coef, exps in raw:
        if isinstance(coef, tuple):
            x, y = Fraction(coef[0]), Fraction(coef[1])
        else:
            x, y = Fraction(coef), Fraction(0)
        e = tuple(int(i) for i in exps)
        if len(e) != ctx.m:
            raise ValueError(f"exponent vector {e} does not fit context {ctx.names}")
        p, q = acc.get(e, (Fraction(0), Fraction(0)))
        acc[e] = (p + x, q + y)
    return Scalar._make(ctx, {e: c for e, c in acc.items() if c[0] or c[1]})


def conjugate(s: Scalar) -> Scalar:
    return s.conj()


ZERO = Scalar.const(0)
ONE = Scalar.const(1)
I = Scalar.const(0, 1)


# -- parser ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\^)|(\*\*)|([-+*/()]))")


def _tokenize(text):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ScalarParseError("unexpected character", text, pos)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("num", int(m.group(1)), start))
        elif m.group(2):
            toks.append(("name", m.group(2), start))
        elif m.group(3) or m.group(4):
            toks.append(("pow", "^", start))
        else:
            toks.append(("op", m.group(5), start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text, ctx):
        self.text = text
        self.ctx = ctx
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg):
        raise ScalarParseError(msg, self.text, self.peek()[2])

    def expr(self):
        sign = 1
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        val = self.term()
        if sign < 0:
            val = -val
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term()
                val = val + rhs if t[1] == "+" else val - rhs
            else:
                return val

    def term(self):
        val = self.power()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "*/":
                self.take()
                rhs = self.power()
                if t[1] == "*":
                    val = val * rhs
                else:
                    if not rhs.is_unit():
                        self.fail("division by a non-unit")
                    val = val / rhs
            else:
                return val

    def power(self):
        base = self.atom()
        if self.peek()[0] == "pow":
            self.take()
            sign = 1
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                sign = -1 if t[1] == "-" else 1
            t = self.take()
            if t[0] != "num":
                self.i -= 1
                self.fail("integer exponent expected")
            n = sign * t[1]
            if n < 0 and not base.is_unit():
                self.fail("negative power of a non-unit")
            base = base ** n
        return base

    def atom(self):
        t = self.take()
        if t[0] == "num":
            return Scalar.const(t[1], 0, self.ctx)
        if t[0] == "name":
            if t[1] == "I":
                return Scalar.const(0, 1, self.ctx)
            if t[1] in self.ctx.names:
                return self.ctx.unit(t[1])
            self.i -= 1
            self.fail(f"unknown unit {t[1]!r}")
        if t[0] == "op" and t[1] == "(":
            val = self.expr()
            if self.take()[1] != ")":
                self.i -= 1
                self.fail("')' expected")
            return val
        if t[0] == "op" and t[1] == "-":
            return -self.power()
        self.i -= 1
        self.fail("number, unit or '(' expected")


def parse_scalar(text: str, ctx: UnitContext = EMPTY) -> Scalar:
    """Parse the scalar grammar, e.g. ``"(1/2)*I*u1^-1 + 3"``."""
    if isinstance(text, (int, Fraction)):
        return Scalar.const(text, 0, ctx)
    if not isinstance(text, str):
        raise ScalarParseError(f"expected a string, got {type(text).__name__}", str(text), 0)
    p = _Parser(text, ctx)
    if p.peek()[0] == "end":
        p.fail("empty expression")
    val = p.expr()
    if p.peek()[0] != "end":
        p.fail("trailing input")
    return val.with_context(ctx) if val.ctx != ctx else val
