"""Tanaka prolongation of non-positively graded Lie algebras.

A degree-k element of the prolongation is stored as a map ``f`` on the
negative basis with ``f(x)`` of degree ``deg x + k``.  It must satisfy the
derivation rule ``f([x, y]) = [f(x), y] + [x, f(y)]``, which is the same as
being closed under the degree-one Spencer operator (the Chevalley-Eilenberg
differential of the negative part with values in the whole algebra).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .linalg import kernel, rank, solve_in_span
from .liealg import BasisElement, GradedLieAlgebra, LieAlgebraError, _vadd
from .scalars import Scalar

__all__ = [
    "SymbolAlgebra",
    "ProlongationLevel",
    "ProlongationResult",
    "ProlongationError",
    "spencer_delta1",
    "ce_differential",
    "prolong_step",
    "tanaka_prolong",
    "cochain_from_names",
    "format_cochain",
    "level_contains",
]


class ProlongationError(LieAlgebraError):
    pass


class SymbolAlgebra:
    """A graded algebra concentrated in degrees <= 0 with fundamental negative part."""

    def __init__(self, alg: GradedLieAlgebra, check=True):
        if alg.filtered:
            raise ProlongationError("a symbol algebra must be graded, not filtered")
        if any(b.degree > 0 for b in alg.basis):
            raise ProlongationError("symbol algebra has elements of positive degree")
        self.alg = alg
        self.neg = [k for k, b in enumerate(alg.basis) if b.degree < 0]
        self.depth = -min((alg.basis[k].degree for k in self.neg), default=0)
        if check:
            self.check_fundamental()

    def check_fundamental(self):
        g = self.alg
        one = _one(g)
        for d in range(2, self.depth + 1):
            vecs = [g.bracket({a: one}, {b: one}) for a in g.part(-1) for b in g.part(-d + 1)]
            if g.span_rank([v for v in vecs if v]) != len(g.part(-d)):
                raise ProlongationError(f"negative part is not generated by degree -1 (fails in degree {-d})")
        return True


def _one(g):
    return Scalar.const(1, 0, g.ctx)


@dataclass
class ProlongationLevel:
    k: int
    maps: list  # each: dict neg_index -> vector over the extended basis
    names: list
    assumptions: list = field(default_factory=list)

    @property
    def dim(self):
        return len(self.maps)


@dataclass
class ProlongationResult:
    dims: list
    total: int
    algebra: GradedLieAlgebra  # prolonged algebra up to the last computed level
    levels: list
    assumptions: list
    terminated: bool
    truncated: list = field(default_factory=list)  # bracket pairs beyond the last level
    conjugation_closed: bool = True

    def basis_strings(self):
        out = []
        for lev in self.levels:
            for nm, f in zip(lev.names, lev.maps):
                out.append({"name": nm, "degree": lev.k, "cochain": format_cochain(self.algebra, f)})
        return out

    def report(self):
        return {
            "dims": list(self.dims),
            "total": self.total,
            "basis": self.basis_strings(),
            "genericity_assumptions": [str(a) + " != 0" for a in self.assumptions],
        }


# -- cochains ----------------------------------------------------------------

def cochain_from_names(g, data):
    """Cochain dict ``{neg name: {target name: coefficient}}`` to index form."""
    out = {}
    for x, vec in data.items():
        v = g.vec(vec)
        if v:
            out[g.idx(x)] = v
    return out


def format_cochain(g, f):
    """Text like ``X10^* ⊗ B - R^* ⊗ Z01`` for a degree-k map."""
    parts = []
    for x in sorted(f):
        for y in sorted(f[x]):
            c = str(f[x][y])
            term = f"{g.basis[x].name}^* ⊗ {g.basis[y].name}"
            if c == "1":
                parts.append(term)
            elif c == "-1":
                parts.append("-" + term)
            else:
                parts.append(f"({c})*{term}")
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


def level_contains(result, k, expected):
    """Check that cochains given by name (``{neg: {target: coeff}}``) span the degree-k level.

    Returns (in_span, same_span): every expected cochain lies in the computed
    level, and together they have the level's full dimension.
    """
    lev = next((lv for lv in result.levels if lv.k == k), None)
    g = result.algebra
    exp = [cochain_from_names(g, e) for e in expected]
    if lev is None:
        return (not any(exp), not any(exp))
    cols = sorted({(x, t) for f in lev.maps + exp for x, v in f.items() for t in v})
    flat = [{(x, t): c for x, v in f.items() for t, c in v.items()} for f in lev.maps]
    zero = Scalar.const(0, 0, g.ctx)
    in_span = all(solve_in_span(flat, {(x, t): c for x, v in f.items() for t, c in v.items()},
                                cols, zero) is not None for f in exp)
    same = in_span and rank([{(x, t): c for x, v in f.items() for t, c in v.items()} for f in exp],
                            cols) == lev.dim
    return in_span, same


def ce_differential(g, neg, cochain, p):
    """Chevalley-Eilenberg differential of a p-cochain on ``neg`` with values in ``g``.

    A p-cochain maps sorted index tuples of length p (for p = 0 the empty
    tuple) to vectors of ``g``; the negative part acts by the bracket.
    """
    one = _one(g)
    out = {}
    for xs in combinations(sorted(neg), p + 1):
        acc = {}
        for i, x in enumerate(xs):
            rest = xs[:i] + xs[i + 1:]
            val = cochain.get(rest)
            if val:
                _vadd(acc, g.bracket({x: one}, val), one if i % 2 == 0 else -one)
        for i, j in combinations(range(len(xs)), 2):
            br = g.bracket({xs[i]: one}, {xs[j]: one})
            rest = xs[:i] + xs[i + 1:j] + xs[j + 1:]
            sign = one if (i + j) % 2 == 0 else -one
            for z, c in br.items():
                if z not in neg:
                    raise ProlongationError("negative part is not a subalgebra")
                # move z to its sorted slot in the argument list
                args = list(rest)
                pos = 0
                while pos < len(args) and args[pos] < z:
                    pos += 1
                if pos < len(args) and args[pos] == z:
                    continue
                args.insert(pos, z)
                s = one if pos % 2 == 0 else -one
                val = cochain.get(tuple(args))
                if val:
                    _vadd(acc, val, sign * s * c)
        if acc:
            out[xs] = acc
    return out


def spencer_delta1(sym, cochain):
    """Degree-one Spencer operator: (δc)(x, y) = [x, c(y)] - [y, c(x)] - c([x, y]).

    ``cochain`` maps negative indices to vectors whose degree is one more
    than the argument's.  Returns a dict (x, y) -> vector with x < y.
    """
    g = sym.alg
    for x, v in cochain.items():
        if x not in sym.neg:
            raise ProlongationError(f"cochain argument {g.basis[x].name} is not in the negative part")
        for y in v:
            if g.basis[y].degree != g.basis[x].degree + 1:
                raise ProlongationError(
                    f"value {g.basis[y].name} on {g.basis[x].name} is not of degree one higher")
    c1 = {(x,): v for x, v in cochain.items()}
    return ce_differential(g, sym.neg, c1, 1)


# -- prolongation --------------------------------------------------------------

class _Extended:
    """Working copy of the prolonged algebra: basis plus maps for positive levels."""

    def __init__(self, alg):
        self.ctx = alg.ctx
        self.one = Scalar.const(1, 0, alg.ctx)
        self.basis = list(alg.basis)
        self.neg = [k for k, b in enumerate(self.basis) if b.degree < 0]
        self.table = {key: dict(v) for key, v in alg.table.items()}
        self.maps = {}  # index of positive element -> map on negatives

    def deg(self, k):
        return self.basis[k].degree

    def bb(self, i, j):
        if i == j:
            return {}
        if i < j:
            return dict(self.table.get((i, j), {}))
        return {k: -c for k, c in self.table.get((j, i), {}).items()}

    def br(self, x, y):
        out = {}
        for i, a in x.items():
            for j, b in y.items():
                if i != j:
                    _vadd(out, self.bb(i, j), a * b)
        return out


def _level_unknowns(ext, k):
    cols = []
    for x in ext.neg:
        d = ext.deg(x) + k
        for y, b in enumerate(ext.basis):
            if b.degree == d:
                cols.append((x, y))
    return cols


def _derivation_rows(ext, cols):
    """Linear conditions f([x,y]) - [f(x),y] - [x,f(y)] = 0 on the unknown map."""
    one = ext.one
    rows = {}
    for x, y in combinations(ext.neg, 2):
        xy = ext.br({x: one}, {y: one})
        for (a, t) in cols:
            # contribution of the unknown f(a) = e_t to the condition at (x, y)
            contrib = {}
            if a in xy:
                _vadd(contrib, {t: xy[a]}, one)
            if a == x:
                _vadd(contrib, ext.br({t: one}, {y: one}), -one)
            if a == y:
                _vadd(contrib, ext.br({x: one}, {t: one}), -one)
            for z, c in contrib.items():
                rows.setdefault((x, y, z), {})[(a, t)] = c
    return [r for _, r in sorted(rows.items())]


def prolong_step(sym, ext=None, k=1):
    """Basis of the degree-k prolongation given the lower levels inside ``ext``."""
    if ext is None:
        ext = _Extended(sym.alg)
    cols = _level_unknowns(ext, k)
    if not cols:
        return ProlongationLevel(k, [], [], [])
    rows = _derivation_rows(ext, cols)
    basis, red = kernel(rows, cols, ext.one)
    maps = []
    for vec in basis:
        f = {}
        for (a, t), c in vec.items():
            f.setdefault(a, {})[t] = c
        maps.append(f)
    names = [f"P{k}_{m + 1}" for m in range(len(maps))]
    return ProlongationLevel(k, maps, names, list(red.assumptions))


def _apply(ext, a, vec_x):
    """[a, x] for a basis element a (any degree) and a vector x of negatives."""
    return ext.br({a: ext.one}, vec_x)


def _add_level(ext, level):
    start = len(ext.basis)
    for m, (nm, f) in enumerate(zip(level.names, level.maps)):
        idx = start + m
        ext.basis.append(BasisElement(nm, level.k, idx))
        ext.maps[idx] = f
    # brackets of the new elements with negatives: [f, x] = f(x)
    for m in range(level.dim):
        idx = start + m
        for x, v in ext.maps[idx].items():
            # stored as [x, f] = -f(x) with x < f
            ext.table[(x, idx)] = {t: -c for t, c in v.items()}
    return list(range(start, start + level.dim))


def _fill_nonnegative(ext):
    """Brackets among elements of degree >= 0 via their action on negatives.

    Returns the pairs whose bracket would land beyond the computed levels.
    """
    one = ext.one
    truncated = []
    nonneg = [k for k, b in enumerate(ext.basis) if b.degree >= 0]
    pairs = [(a, b) for a, b in combinations(nonneg, 2) if ext.deg(a) > 0 or ext.deg(b) > 0]
    pairs.sort(key=lambda p: (ext.deg(p[0]) + ext.deg(p[1]), p))
    maxdeg = max((b.degree for b in ext.basis), default=0)
    by_deg = {}
    for k, b in enumerate(ext.basis):
        by_deg.setdefault(b.degree, []).append(k)
    for a, b in pairs:
        d = ext.deg(a) + ext.deg(b)
        # the bracket as a map on negatives: x -> [a,[b,x]] - [b,[a,x]]
        f = {}
        for x in ext.neg:
            v = {}
            _vadd(v, ext.br({a: one}, ext.br({b: one}, {x: one})), one)
            _vadd(v, ext.br({b: one}, ext.br({a: one}, {x: one})), -one)
            if v:
                f[x] = v
        if not f:
            continue
        if d > maxdeg:
            truncated.append((a, b))
            continue
        cands = by_deg.get(d, [])
        if d == 0:
            images = {c: {x: ext.br({c: one}, {x: one}) for x in ext.neg} for c in cands}
        else:
            images = {c: ext.maps[c] for c in cands}
        cols = [(x, t) for x in ext.neg for t in range(len(ext.basis))]
        vecs = [{(x, t): cc for x, v in images[c].items() for t, cc in v.items()} for c in cands]
        target = {(x, t): cc for x, v in f.items() for t, cc in v.items()}
        coeffs = solve_in_span(vecs, target, cols, Scalar.const(0, 0, ext.ctx))
        if coeffs is None:
            raise ProlongationError(
                f"[{ext.basis[a].name},{ext.basis[b].name}] is not a derivation of the expected degree")
        vec = {c: co for c, co in zip(cands, coeffs) if co}
        if vec:
            ext.table[(a, b)] = vec
    return truncated


def tanaka_prolong(sym, kmax=3, names=None):
    """Prolong ``sym`` up to degree ``kmax`` (stopping early at a zero level).

    ``names`` optionally maps a level k to a list of basis names.
    """
    if not isinstance(sym, SymbolAlgebra):
        sym = SymbolAlgebra(sym)
    ext = _Extended(sym.alg)
    levels, dims, assumptions = [], [], []
    terminated = False
    for k in range(1, kmax + 1):
        lev = prolong_step(sym, ext, k)
        if names and k in names and len(names[k]) == lev.dim:
            lev.names = list(names[k])
        dims.append(lev.dim)
        assumptions.extend(lev.assumptions)
        if lev.dim == 0:
            terminated = True
            break
        levels.append(lev)
        _add_level(ext, lev)
    truncated = _fill_nonnegative(ext)
    conj = _conjugate_partners(sym.alg, ext, levels)
    table = {key: v for key, v in ext.table.items() if v}
    basis = [BasisElement(b.name, b.degree, conj.get(k, k)) for k, b in enumerate(ext.basis)]
    conj_ok = all(k in conj for k in range(sym.alg.dim, len(ext.basis)))
    alg = GradedLieAlgebra(basis, table, sym.alg.ctx, validate=conj_ok and not truncated)
    total = sym.alg.dim + sum(dims)
    return ProlongationResult(dims, total, alg, levels, assumptions, terminated,
                              [(ext.basis[a].name, ext.basis[b].name) for a, b in truncated], conj_ok)


def _conjugate_partners(g, ext, levels):
    """Conjugation on the extended basis, matching each level map with its conjugate."""
    out = {k: g.basis[k].conj for k in range(g.dim)}
    start = g.dim
    for lev in levels:
        idxs = list(range(start, start + lev.dim))
        start += lev.dim
        for i in idxs:
            f = ext.maps[i]
            try:
                cf = {out[x]: {out[t]: c.conj() for t, c in v.items()} for x, v in f.items()}
            except KeyError:
                continue
            for j in idxs:
                if ext.maps[j] == cf:
                    out[i] = j
    return out
