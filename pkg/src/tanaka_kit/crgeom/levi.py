"""Higher-order Levi forms, the Freeman filtration and normalized sections of a tube.

Holomorphic sections are coefficient vectors (length 3) over the base frame
Z_0, Z_1, Z_2 of the model.  Subbundles are lists of such vectors; membership
and quotients are decided by exact row reduction over the function ring.
Nonzero functions that are not invertible in the ring are treated as
nonzero at a generic point and reported in ``locus``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy as sp

from ..linalg import kernel, row_reduce
from .fields import vf_bracket
from .tube import TubeModel

__all__ = [
    "LeviForm",
    "FreemanReport",
    "InclusionReport",
    "NormalizedSections",
    "NotThreeNondegenerate",
    "levi_form",
    "freeman_ranks",
    "check_bracket_inclusions",
    "normalized_sections",
    "gauge_equivalent",
]

COLS = (0, 1, 2)


class NotThreeNondegenerate(ValueError):
    pass


# -- subbundle arithmetic ---------------------------------------------------------

def _as_row(vec):
    return {k: c for k, c in enumerate(vec) if c}


def _as_vec(ring, row):
    return [row.get(k, ring.zero()) for k in COLS]


class Subbundle:
    """Span of coefficient vectors, kept in reduced echelon form."""

    def __init__(self, ring, vectors):
        self.ring = ring
        red = row_reduce([_as_row(v) for v in vectors], list(COLS))
        self.rows = red.rows
        self.pivots = red.pivots
        self.assumptions = list(red.assumptions)
        self.free = [c for c in COLS if c not in self.pivots]

    @property
    def rank(self):
        return len(self.pivots)

    def basis(self):
        return [_as_vec(self.ring, r) for r in self.rows]

    def normal_form(self, vec):
        """A linear representative of ``vec`` modulo the span (fraction-free on non-units)."""
        out = _as_row(vec)
        for r, p in zip(self.rows, self.pivots):
            if p not in out:
                continue
            a, piv = out[p], r[p]
            if piv.is_unit():
                f = a * piv.inverse()
                for c, v in r.items():
                    w = out.get(c, self.ring.zero()) - f * v
                    if w:
                        out[c] = w
                    else:
                        out.pop(c, None)
            else:
                new = {c: piv * v for c, v in out.items()}
                for c, v in r.items():
                    w = new.get(c, self.ring.zero()) - a * v
                    if w:
                        new[c] = w
                    else:
                        new.pop(c, None)
                out = new
        return out

    def quotient_coords(self, vec):
        nf = self.normal_form(vec)
        return [nf.get(c, self.ring.zero()) for c in self.free]

    def contains(self, vec):
        return not self.normal_form(vec)


def _combine(ring, coeffs, vectors):
    out = [ring.zero()] * 3
    for c, v in zip(coeffs, vectors):
        if c:
            out = [o + c * x for o, x in zip(out, v)]
    return out


def _left_kernel(ring, values, nrows, ncols, width):
    """x with sum_j x_j values[j][b][q] = 0 for all b, q; values[j][b] has length ``width``."""
    eqs = []
    for b in range(ncols):
        for q in range(width):
            row = {j: values[j][b][q] for j in range(nrows) if values[j][b][q]}
            if row:
                eqs.append(row)
    basis, red = kernel(eqs, list(range(nrows)), ring.one())
    vecs = [[v.get(j, ring.zero()) for j in range(nrows)] for v in basis]
    return vecs, red.assumptions


# -- Levi forms --------------------------------------------------------------------

@dataclass
class LeviForm:
    order: int
    rows: list          # holomorphic sections (Z-coordinates) indexing the rows
    columns: list       # holomorphic sections whose conjugates index the columns
    values: list        # values[j][b]: list of quotient coordinates (length 1 for order 1)
    kernel: list        # left kernel, as sections in Z-coordinates
    locus: list = field(default_factory=list)

    def matrix(self):
        """Entries as strings (one quotient coordinate per cell when the target is a line)."""
        return [[[str(x) for x in cell] for cell in row] for row in self.values]

    def to_dict(self):
        return {
            "order": self.order,
            "rows": [[str(c) for c in r] for r in self.rows],
            "columns": [[str(c) for c in r] for r in self.columns],
            "matrix": self.matrix(),
            "left_kernel": [[str(c) for c in r] for r in self.kernel],
            "genericity_locus": sorted({str(f) for f in self.locus}),
        }


def _frame(m: TubeModel, frame10):
    ring = m.ring
    if frame10 is None:
        return [[ring.one() if i == k else ring.zero() for i in COLS] for k in COLS]
    frame10 = [[c if not isinstance(c, (int, sp.Basic)) else ring.const(c) for c in v] for v in frame10]
    if Subbundle(ring, frame10).rank != 3:
        raise ValueError("frame10 does not span D10")
    return frame10


class _Analysis:
    """Caches section fields and brackets for one model and one D10 frame."""

    def __init__(self, m: TubeModel, frame10=None):
        self.m = m
        self.ring = m.ring
        self.F = _frame(m, frame10)
        self._fields = {}
        self.locus = list(m.locus)

    def field(self, vec, conj=False):
        key = (tuple(str(c) for c in vec), conj)
        if key not in self._fields:
            coeffs = [c.conj() for c in vec] if conj else vec
            self._fields[key] = self.m.section(coeffs, conj=conj)
        return self._fields[key]

    def bracket(self, a, b, conj_b=True):
        return self.m.decompose(vf_bracket(self.field(a), self.field(b, conj=conj_b)))

    def level1(self):
        i = self.ring.const(sp.I)
        vals = [[[i * self.bracket(a, b).transverse] for b in self.F] for a in self.F]
        ker, assum = _left_kernel(self.ring, vals, 3, 3, 1)
        self.locus.extend(assum)
        K = [_combine(self.ring, x, self.F) for x in ker]
        return LeviForm(1, self.F, self.F, vals, Subbundle(self.ring, K).basis(), assum)

    def higher(self, order, rows, target):
        """Order 2 (rows = K10, target = K10) or 3 (rows = L10, target = L10)."""
        sub = Subbundle(self.ring, target)
        vals = []
        for k in rows:
            line = []
            for b in self.F:
                d = self.bracket(k, b)
                line.append(sub.quotient_coords(d.hol))
            vals.append(line)
        width = len(sub.free)
        ker, assum = _left_kernel(self.ring, vals, len(rows), 3, width)
        assum = assum + sub.assumptions
        self.locus.extend(assum)
        L = [_combine(self.ring, x, rows) for x in ker]
        return LeviForm(order, rows, self.F, vals, Subbundle(self.ring, L).basis(), assum)


def levi_form(m: TubeModel, order=1, frame10=None):
    """Levi form of the given order, with its left kernel as the next filtrand."""
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    an = _Analysis(m, frame10)
    lf = an.level1()
    if order == 1:
        return lf
    lf2 = an.higher(2, lf.kernel, lf.kernel)
    if order == 2:
        return lf2
    return an.higher(3, lf2.kernel, lf2.kernel)


@dataclass
class FreemanReport:
    d10: int | None
    k10: int | None
    l10: int | None
    hol_nondegenerate: bool | None
    bracket_rank: int
    degenerate: bool                      # D fails to be bracket generating
    K10: list = field(default_factory=list)
    L10: list = field(default_factory=list)
    locus: list = field(default_factory=list)

    @property
    def ranks(self):
        return (self.d10, self.k10, self.l10, self.hol_nondegenerate)

    @property
    def three_nondegenerate(self):
        return (not self.degenerate and (self.d10, self.k10, self.l10) == (3, 2, 1)
                and bool(self.hol_nondegenerate))

    def to_dict(self):
        return {
            "degenerate": self.degenerate,
            "bracket_rank": self.bracket_rank,
            "ranks": None if self.degenerate else [self.d10, self.k10, self.l10],
            "hol_nondegenerate": self.hol_nondegenerate,
            "three_nondegenerate": self.three_nondegenerate,
            "K10": [[str(c) for c in v] for v in self.K10],
            "L10": [[str(c) for c in v] for v in self.L10],
            "genericity_locus": sorted({str(f) for f in self.locus}),
        }


def freeman_ranks(m: TubeModel, frame10=None) -> FreemanReport:
    brank = m.bracket_generating()
    if brank < len(m.coords):
        return FreemanReport(None, None, None, None, brank, True, locus=list(m.locus))
    an = _Analysis(m, frame10)
    l1 = an.level1()
    K = l1.kernel
    if not K:
        return FreemanReport(3, 0, 0, True, brank, False, [], [], an.locus)
    l2 = an.higher(2, K, K)
    L = l2.kernel
    if not L:
        return FreemanReport(3, len(K), 0, True, brank, False, K, [], an.locus)
    l3 = an.higher(3, L, L)
    return FreemanReport(3, len(K), len(L), not l3.kernel, brank, False, K, L, an.locus)


# -- bracket table -------------------------------------------------------------------

@dataclass
class InclusionReport:
    ok: bool
    checked: list       # (row, column, target) labels
    violations: list    # (row, column, target, left section, right section, bracket)
    three_nondegenerate: bool = True

    def to_dict(self):
        return {
            "ok": self.ok,
            "three_nondegenerate": self.three_nondegenerate,
            "checked": [f"[{a},{b}] in {t}" for a, b, t in self.checked],
            "violations": [
                {"bracket": f"[{a},{b}]", "target": t, "left": x, "right": y, "value": v}
                for a, b, t, x, y, v in self.violations
            ],
        }


def check_bracket_inclusions(m: TubeModel, frame10=None) -> InclusionReport:
    """Check every inclusion of the Freeman bracket table on frame sections.

    The table is stated for 3-nondegenerate structures; on other inputs (for
    instance a frame whose J is not integrable) it is still evaluated on the
    computed filtration, and the report records the failed precondition.
    """
    rep = freeman_ranks(m, frame10)
    if rep.degenerate:
        raise NotThreeNondegenerate("D is not bracket generating; there is no filtration to test")
    an = _Analysis(m, frame10)
    ring = m.ring
    D = Subbundle(ring, an.F)
    K = Subbundle(ring, rep.K10)
    L = Subbundle(ring, rep.L10)
    spans = {"D10": D.basis(), "K10": K.basis(), "L10": L.basis()}
    subs = {"D10": D, "K10": K, "L10": L, "0": Subbundle(ring, [])}

    def member(d, hol, anti, transverse_ok):
        if d.transverse and not transverse_ok:
            return False
        return subs[hol].contains(d.hol) and subs[anti].contains(d.antihol)

    # target -> (holomorphic part, antiholomorphic part, transverse allowed)
    targets = {
        "D10": ("D10", "0", False),
        "K10": ("K10", "0", False),
        "L10": ("L10", "0", False),
        "TM": ("D10", "D10", True),
        "D": ("D10", "D10", False),
        "D10+K01": ("D10", "K10", False),
        "K": ("K10", "K10", False),
        "K10+L01": ("K10", "L10", False),
        "L": ("L10", "L10", False),
    }
    table = [
        ("D10", "D10", False, "D10"), ("D10", "K10", False, "D10"), ("D10", "L10", False, "D10"),
        ("D10", "D01", True, "TM"), ("D10", "K01", True, "D"), ("D10", "L01", True, "D10+K01"),
        ("K10", "K10", False, "K10"), ("K10", "L10", False, "K10"),
        ("K10", "K01", True, "K"), ("K10", "L01", True, "K10+L01"),
        ("L10", "L10", False, "L10"), ("L10", "L01", True, "L"),
    ]
    checked, violations = [], []
    for left, right, conj, target in table:
        checked.append((left, right, target))
        hol, anti, tr = targets[target]
        rname = right.replace("01", "10")
        for a in spans[left]:
            for b in spans[rname]:
                d = an.bracket(a, b, conj_b=conj)
                if not member(d, hol, anti, tr):
                    violations.append((left, right, target,
                                       [str(c) for c in a], [str(c) for c in b],
                                       {"hol": [str(c) for c in d.hol],
                                        "antihol": [str(c) for c in d.antihol],
                                        "transverse": str(d.transverse)}))
    return InclusionReport(not violations and rep.three_nondegenerate, checked, violations,
                           rep.three_nondegenerate)


# -- normalized sections -------------------------------------------------------------

@dataclass
class NormalizedSections:
    X10: list       # representative of D10/K10
    Y10: list       # representative of K10/L10
    Z10: list       # section of L10
    mu: object      # L2(y, conj x) = mu * x
    nu: object      # L3(z, conj x) = nu * y
    check: dict     # recomputed normalization conditions
    gauge: str = ("X10 -> lambda e^{i phi} X10, Y10 -> e^{2 i phi} Y10, "
                  "Z10 -> lambda^{-1} e^{3 i phi} Z10 with lambda > 0 real")

    def to_dict(self):
        return {
            "X10": [str(c) for c in self.X10],
            "Y10": [str(c) for c in self.Y10],
            "Z10": [str(c) for c in self.Z10],
            "mu": str(self.mu),
            "nu": str(self.nu),
            "check": self.check,
            "gauge": self.gauge,
        }


def normalized_sections(m: TubeModel, frame10=None) -> NormalizedSections:
    """Sections X10, Y10, Z10 with L2(Y10, conj X10) = X10 and L3(Z10, conj X10) = Y10."""
    rep = freeman_ranks(m, frame10)
    if not rep.three_nondegenerate:
        raise NotThreeNondegenerate("normalized sections need a 3-nondegenerate model")
    an = _Analysis(m, frame10)
    ring = m.ring
    K = Subbundle(ring, rep.K10)
    L = Subbundle(ring, rep.L10)
    # x: a frame vector outside K10; y: a K10 vector outside L10; z spans L10
    x = next(v for v in an.F if not K.contains(v))
    y = next(v for v in K.basis() if not L.contains(v))
    z = L.basis()[0]

    mu = _class_ratio(an.bracket(y, x).hol, x, K)
    nu = _class_ratio(an.bracket(z, x).hol, y, L)
    if mu is None or nu is None or not mu.is_unit() or not nu.is_unit():
        raise ZeroDivisionError("normalization factors are not invertible in the function ring")
    Y10 = [c / mu for c in y]
    Z10 = [c / (mu * nu) for c in z]
    X10 = list(x)
    # recompute both conditions from fresh brackets
    l2 = an.bracket(Y10, X10).hol
    l3 = an.bracket(Z10, X10).hol
    ok2 = K.contains([a - b for a, b in zip(l2, X10)])
    ok3 = L.contains([a - b for a, b in zip(l3, Y10)])
    return NormalizedSections(X10, Y10, Z10, mu, nu, {"L2": ok2, "L3": ok3})


def gauge_equivalent(m: TubeModel, a: NormalizedSections, b: NormalizedSections):
    """True if ``b`` arises from ``a`` by the residual gauge (X10, Y10, Z10 compared modulo the filtration)."""
    ring = m.ring
    rep = freeman_ranks(m)
    K, L = Subbundle(ring, rep.K10), Subbundle(ring, rep.L10)
    p = _class_ratio(b.X10, a.X10, K)
    q = _class_ratio(b.Y10, a.Y10, L)
    r = _line_ratio(b.Z10, a.Z10)
    if p is None or q is None or r is None:
        return False
    lam2 = p * p / q
    return bool(p * r == q * q and q * q.conj() == ring.one() and lam2 == lam2.conj())


def _class_ratio(u, v, sub):
    """c with u = c v modulo ``sub`` (u, v in a common line of the quotient), or None."""
    return _line_ratio(_as_vec(sub.ring, sub.normal_form(u)), _as_vec(sub.ring, sub.normal_form(v)))


def _line_ratio(u, v):
    """c with u = c v for vectors on one line, or None."""
    k = next((i for i, c in enumerate(v) if c), None)
    if k is None or not v[k].is_unit():
        return None
    c = u[k] / v[k]
    if any(ui != c * vi for ui, vi in zip(u, v)):
        return None
    return c
