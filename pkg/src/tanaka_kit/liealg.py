"""Graded and filtered Lie algebras over the scalar ring.

Brackets are stored sparsely for index pairs ``i < j`` only; the other
order follows from antisymmetry.  Vectors are dicts ``index -> Scalar``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .linalg import kernel, row_reduce
from .scalars import EMPTY, Scalar, UnitContext, parse_scalar

__all__ = [
    "BasisElement",
    "GradedLieAlgebra",
    "LieAlgebraError",
    "JacobiReport",
    "check_jacobi",
    "ad_spectrum",
    "bracket",
    "load_algebra",
    "algebra_from_dict",
]


class LieAlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class BasisElement:
    name: str
    degree: int
    conj: int  # index of the conjugate partner


@dataclass
class JacobiReport:
    ok: bool
    failures: list  # (i, j, k, residue vector)

    def describe(self, alg):
        if self.ok:
            return "Jacobi identity holds on all basis triples"
        lines = []
        for i, j, k, res in self.failures:
            names = alg.basis[i].name, alg.basis[j].name, alg.basis[k].name
            lines.append(f"Jac{names} = {alg.format_vector(res)}")
        return "\n".join(lines)


def _vadd(acc, vec, c):
    for k, v in vec.items():
        w = c * v if c != 1 else v
        if k in acc:
            s = acc[k] + w
            if s:
                acc[k] = s
            else:
                del acc[k]
        elif w:
            acc[k] = w
    return acc


class GradedLieAlgebra:
    """Finite-dimensional Lie algebra with integer degrees and a conjugation.

    ``table`` maps ``(i, j)`` with ``i < j`` to a dict ``k -> Scalar``.
    With ``filtered=True`` a component of ``[e_i, e_j]`` may have degree
    at least (rather than exactly) ``deg i + deg j``.
    """

    def __init__(self, basis, table, ctx=EMPTY, filtered=False, validate=True):
        self.basis = tuple(basis)
        self.ctx = ctx
        self.filtered = filtered
        self.index = {b.name: k for k, b in enumerate(self.basis)}
        if len(self.index) != len(self.basis):
            raise LieAlgebraError("duplicate basis names")
        clean = {}
        for (i, j), vec in table.items():
            vec = {k: Scalar.coerce(c, ctx).with_context(ctx) for k, c in vec.items() if c}
            if i == j:
                if vec:
                    raise LieAlgebraError(f"[{self.basis[i].name},{self.basis[i].name}] must vanish")
                continue
            if i > j:
                i, j = j, i
                vec = {k: -c for k, c in vec.items()}
            if (i, j) in clean:
                raise LieAlgebraError(f"bracket ({self.basis[i].name},{self.basis[j].name}) given twice")
            if vec:
                clean[(i, j)] = vec
        self.table = clean
        if validate:
            self._validate()

    # -- construction checks ---------------------------------------------
    def _validate(self):
        n = len(self.basis)
        for k, b in enumerate(self.basis):
            if not 0 <= b.conj < n:
                raise LieAlgebraError(f"conjugate index of {b.name} out of range")
            p = self.basis[b.conj]
            if p.conj != k:
                raise LieAlgebraError(f"conjugation is not an involution at {b.name}")
            if p.degree != b.degree:
                raise LieAlgebraError(f"{b.name} and its conjugate {p.name} have different degrees")
        for (i, j), vec in self.table.items():
            d = self.basis[i].degree + self.basis[j].degree
            for k in vec:
                dk = self.basis[k].degree
                if (dk < d) if self.filtered else (dk != d):
                    rel = "at least" if self.filtered else "exactly"
                    raise LieAlgebraError(
                        f"[{self.basis[i].name},{self.basis[j].name}] has a component along "
                        f"{self.basis[k].name} of degree {dk}, expected {rel} {d}")
        for i in range(n):
            for j in range(i + 1, n):
                lhs = self.conj_vector(self.bracket_basis(i, j))
                rhs = self.bracket_basis(self.basis[i].conj, self.basis[j].conj)
                if lhs != rhs:
                    raise LieAlgebraError(
                        f"conjugation incompatible on [{self.basis[i].name},{self.basis[j].name}]")

    # -- basic access ------------------------------------------------------
    @property
    def dim(self):
        return len(self.basis)

    def names(self):
        return [b.name for b in self.basis]

    def degree(self, k):
        return self.basis[k].degree

    def idx(self, name):
        try:
            return self.index[name]
        except KeyError:
            raise LieAlgebraError(f"unknown basis element {name!r}") from None

    def vec(self, spec):
        """Vector from a name, an index, or a dict name/index -> coefficient."""
        if isinstance(spec, str):
            return {self.idx(spec): Scalar.const(1, 0, self.ctx)}
        if isinstance(spec, int):
            return {spec: Scalar.const(1, 0, self.ctx)}
        out = {}
        for k, c in spec.items():
            k = self.idx(k) if isinstance(k, str) else k
            c = parse_scalar(c, self.ctx) if isinstance(c, str) else Scalar.coerce(c, self.ctx)
            _vadd(out, {k: c}, 1)
        return out

    def bracket_basis(self, i, j):
        if i == j:
            return {}
        if i < j:
            return dict(self.table.get((i, j), {}))
        return {k: -c for k, c in self.table.get((j, i), {}).items()}

    def bracket(self, x, y):
        for v in (x, y):
            for k in v:
                if not isinstance(k, int) or not 0 <= k < self.dim:
                    raise LieAlgebraError(f"index {k!r} outside the basis of dimension {self.dim}")
        out = {}
        for i, a in x.items():
            for j, b in y.items():
                if i != j:
                    _vadd(out, self.bracket_basis(i, j), a * b)
        return out

    def conj_vector(self, x):
        return {self.basis[k].conj: c.conj() for k, c in x.items()}

    def is_real_basis(self):
        return all(b.conj == k for k, b in enumerate(self.basis))

    def degrees(self):
        return sorted({b.degree for b in self.basis})

    def part(self, d):
        return [k for k, b in enumerate(self.basis) if b.degree == d]

    def format_vector(self, x):
        if not x:
            return "0"
        parts = []
        for k in sorted(x):
            c = x[k]
            cs = str(c)
            if cs == "1":
                parts.append(self.basis[k].name)
            elif cs == "-1":
                parts.append("-" + self.basis[k].name)
            else:
                parts.append(f"({cs})*{self.basis[k].name}")
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    # -- structure ----------------------------------------------------------
    def ad_matrix(self, x):
        """Columns: images of basis vectors, as dict (row, col) -> Scalar."""
        if isinstance(x, (str, int)):
            x = self.vec(x)
        m = {}
        for j in range(self.dim):
            for k, c in self.bracket(x, {j: Scalar.const(1, 0, self.ctx)}).items():
                m[(k, j)] = c
        return m

    def span_rank(self, vectors):
        return row_reduce(vectors, list(range(self.dim))).rank

    def derived_subalgebra(self):
        vecs = [v for (i, j), v in sorted(self.table.items())]
        red = row_reduce(vecs, list(range(self.dim)))
        return red.rows

    def center(self):
        """Basis of the center, from the kernel of x -> ([x, e_j])_j."""
        rows = []
        for j in range(self.dim):
            for k in range(self.dim):
                r = {}
                for i in range(self.dim):
                    c = self.bracket_basis(i, j).get(k)
                    if c:
                        r[i] = c
                if r:
                    rows.append(r)
        basis, _ = kernel(rows, list(range(self.dim)), Scalar.const(1, 0, self.ctx))
        return basis

    def subalgebra(self, names):
        """Restriction to a set of basis elements closed under brackets."""
        keep = [self.idx(n) for n in names]
        pos = {k: p for p, k in enumerate(keep)}
        basis = []
        for k in keep:
            b = self.basis[k]
            if b.conj not in pos:
                raise LieAlgebraError(f"conjugate of {b.name} missing from subalgebra")
            basis.append(BasisElement(b.name, b.degree, pos[b.conj]))
        table = {}
        for a in keep:
            for b in keep:
                if a < b:
                    v = self.bracket_basis(a, b)
                    for k in v:
                        if k not in pos:
                            raise LieAlgebraError(
                                f"[{self.basis[a].name},{self.basis[b].name}] leaves the subalgebra")
                    if v:
                        i, j = pos[a], pos[b]
                        vv = {pos[k]: c for k, c in v.items()}
                        table[(i, j) if i < j else (j, i)] = vv if i < j else {k: -c for k, c in vv.items()}
        return GradedLieAlgebra(basis, table, self.ctx, self.filtered)

    def change_basis(self, vectors, names, degrees=None, conj=None):
        """Same algebra in the basis ``vectors`` (dicts over the current indices)."""
        n = self.dim
        if len(vectors) != n:
            raise LieAlgebraError("a basis change needs exactly dim vectors")
        one = Scalar.const(1, 0, self.ctx)
        # invert the change of basis: solve sum_p a_p v_p = e_k for each k
        inv = []
        cols = [("v", p) for p in range(n)]
        for k in range(n):
            rows = []
            for row in range(n):
                r = {("v", p): v[row] for p, v in enumerate(vectors) if v.get(row)}
                if row == k:
                    r[("rhs",)] = one
                if r:
                    rows.append(r)
            red = row_reduce(rows, cols + [("rhs",)])
            if red.rank != n or ("rhs",) in red.pivots:
                raise LieAlgebraError("basis change is singular")
            sol = {}
            for r, p in zip(red.rows, red.pivots):
                if not r[p].is_unit():
                    raise LieAlgebraError("basis change needs a non-unit inverse")
                if ("rhs",) in r:
                    sol[p[1]] = r[("rhs",)] * r[p].inverse()
            inv.append(sol)

        def to_new(x):
            out = {}
            for k, c in x.items():
                _vadd(out, inv[k], c)
            return out

        if degrees is None:
            degrees = []
            for v in vectors:
                ds = {self.basis[k].degree for k in v}
                if len(ds) != 1:
                    raise LieAlgebraError("basis vector mixes degrees; pass degrees explicitly")
                degrees.append(ds.pop())
        if conj is None:
            conj = []
            for v in vectors:
                img = to_new(self.conj_vector(v))
                if len(img) != 1 or list(img.values())[0] != 1:
                    raise LieAlgebraError("conjugate of a new basis vector is not a basis vector")
                conj.append(next(iter(img)))
        basis = [BasisElement(nm, d, c) for nm, d, c in zip(names, degrees, conj)]
        table = {}
        for p in range(n):
            for q in range(p + 1, n):
                v = to_new(self.bracket(vectors[p], vectors[q]))
                if v:
                    table[(p, q)] = v
        return GradedLieAlgebra(basis, table, self.ctx, self.filtered)

    def realify(self):
        """Real basis: a pair (x, conj x) becomes x + conj x and i(x - conj x)."""
        one = Scalar.const(1, 0, self.ctx)
        i_ = Scalar.const(0, 1, self.ctx)
        vectors, names = [], []
        seen = set()
        for k, b in enumerate(self.basis):
            if k in seen:
                continue
            if b.conj == k:
                vectors.append({k: one})
                names.append(b.name)
                seen.add(k)
                continue
            c = b.conj
            seen.update((k, c))
            stem = _pair_stem(b.name, self.basis[c].name)
            vectors.append({k: one, c: one})
            vectors.append({k: i_, c: -i_})
            names.extend([stem, "J" + stem])
        out = self.change_basis(vectors, names, conj=list(range(len(vectors))))
        return out

    def complexify(self, pairs):
        """Inverse of :meth:`realify`: ``pairs`` lists (X, JX) names to merge."""
        half = Scalar.const(Fraction(1, 2), 0, self.ctx)
        ihalf = Scalar.const(0, Fraction(1, 2), self.ctx)
        paired = {}
        for x, jx in pairs:
            paired[self.idx(x)] = self.idx(jx)
        partners = set(paired.values())
        vectors, names, conj = [], [], []
        for k, b in enumerate(self.basis):
            if k in partners:
                continue
            if k in paired:
                j = paired[k]
                p = len(vectors)
                vectors.append({k: half, j: -ihalf})
                vectors.append({k: half, j: ihalf})
                names.extend([b.name + "10", b.name + "01"])
                conj.extend([p + 1, p])
            else:
                vectors.append({k: Scalar.const(1, 0, self.ctx)})
                names.append(b.name)
                conj.append(len(vectors) - 1)
        return self.change_basis(vectors, names, conj=conj)

    def direct_sum(self, other):
        if self.ctx != other.ctx and self.ctx.m and other.ctx.m:
            raise LieAlgebraError("direct sum across different unit contexts")
        ctx = self.ctx if self.ctx.m else other.ctx
        n = self.dim
        basis = list(self.basis) + [BasisElement(b.name, b.degree, b.conj + n) for b in other.basis]
        table = dict(self.table)
        for (i, j), v in other.table.items():
            table[(i + n, j + n)] = {k + n: c for k, c in v.items()}
        return GradedLieAlgebra(basis, table, ctx, self.filtered or other.filtered)

    # -- serialization -------------------------------------------------------
    def to_dict(self):
        out = {
            "schema": "liealg.v1",
            "units": list(self.ctx.names),
            "basis": [{"name": b.name, "degree": b.degree, "conj": self.basis[b.conj].name}
                      for b in self.basis],
            "brackets": [],
        }
        if self.filtered:
            out["filtered"] = True
        for (i, j) in sorted(self.table):
            v = self.table[(i, j)]
            out["brackets"].append({
                "x": self.basis[i].name, "y": self.basis[j].name,
                "terms": [{"z": self.basis[k].name, "c": str(v[k])} for k in sorted(v)],
            })
        return out

    def __eq__(self, other):
        return (isinstance(other, GradedLieAlgebra) and self.basis == other.basis
                and self.table == other.table and self.ctx == other.ctx)

    def __repr__(self):
        return f"GradedLieAlgebra(dim={self.dim}, names={self.names()})"


def _pair_stem(a, b):
    if a.endswith("10") and b.endswith("01") and a[:-2] == b[:-2]:
        return a[:-2]
    return f"Re_{a}"


def bracket(g, x, y):
    if isinstance(x, (str, dict)) and not (x and isinstance(next(iter(x)), int)):
        x = g.vec(x)
    if isinstance(y, (str, dict)) and not (y and isinstance(next(iter(y)), int)):
        y = g.vec(y)
    return g.bracket(x, y)


def check_jacobi(g):
    failures = []
    one = Scalar.const(1, 0, g.ctx)
    for i, j, k in combinations(range(g.dim), 3):
        x, y, z = {i: one}, {j: one}, {k: one}
        res = {}
        _vadd(res, g.bracket(g.bracket(x, y), z), 1)
        _vadd(res, g.bracket(g.bracket(y, z), x), 1)
        _vadd(res, g.bracket(g.bracket(z, x), y), 1)
        if res:
            failures.append((i, j, k, res))
    return JacobiReport(not failures, failures)


class SpectrumError(LieAlgebraError):
    pass


def _triangular_order(n, m):
    """Order of indices making the matrix triangular, or None."""
    succ = {j: set() for j in range(n)}
    indeg = {j: 0 for j in range(n)}
    for (r, c), v in m.items():
        if r != c and v:
            # column c feeds row r
            if r not in succ[c]:
                succ[c].add(r)
                indeg[r] += 1
    order, ready = [], sorted(j for j in range(n) if indeg[j] == 0)
    while ready:
        j = ready.pop(0)
        order.append(j)
        for r in sorted(succ[j]):
            indeg[r] -= 1
            if indeg[r] == 0:
                ready.append(r)
        ready.sort()
    return order if len(order) == n else None


def ad_spectrum(g, x):
    """Eigenvalues of ad(x) with multiplicity, as a sorted list of Scalars."""
    m = g.ad_matrix(x)
    return matrix_spectrum(m, g.dim, g.ctx)


def matrix_spectrum(m, n, ctx=EMPTY):
    zero = Scalar.const(0, 0, ctx)
    diag = [m.get((k, k), zero) for k in range(n)]
    if _triangular_order(n, m) is not None:
        return sorted(diag, key=_eig_key)
    # fall back to a characteristic polynomial over Q(i)
    for v in m.values():
        if not v.is_constant():
            raise SpectrumError("ad(x) is not triangularizable on this basis and has unit-symbol entries")
    import sympy as sp
    lam = sp.Symbol("lam")
    rows = [[_to_sympy(m.get((r, c), zero)) for c in range(n)] for r in range(n)]
    cp = sp.Matrix(rows).charpoly(lam).as_expr()
    _, factors = sp.factor_list(cp, lam, gaussian=True)
    out = []
    for f, mult in factors:
        p = sp.Poly(f, lam)
        if p.degree() != 1:
            raise SpectrumError(f"eigenvalues outside Q(i): factor {f}")
        root = sp.nsimplify(-p.all_coeffs()[1] / p.all_coeffs()[0])
        re_, im_ = sp.re(root), sp.im(root)
        out.extend([Scalar.const(Fraction(str(re_)), Fraction(str(im_)), ctx)] * mult)
    return sorted(out, key=_eig_key)


def _to_sympy(s):
    import sympy as sp
    x, y = s.constant_value()
    return sp.Rational(x.numerator, x.denominator) + sp.I * sp.Rational(y.numerator, y.denominator)


def _eig_key(s):
    if s.is_constant():
        return (0, s.constant_value())
    return (1, s.sort_key())


# -- liealg.v1 --------------------------------------------------------------

def algebra_from_dict(d, filtered=None):
    from .errors import InputError
    try:
        ctx = UnitContext(tuple(d.get("units", [])))
        raw_basis = d["basis"]
        names = [b["name"] for b in raw_basis]
        pos = {n: k for k, n in enumerate(names)}
        basis = []
        for b in raw_basis:
            c = b.get("conj", b["name"])
            if c not in pos:
                raise InputError(f"conjugate {c!r} of {b['name']!r} is not a basis element")
            basis.append(BasisElement(b["name"], int(b["degree"]), pos[c]))
        table = {}
        for br in d.get("brackets", []):
            for key in ("x", "y"):
                if br[key] not in pos:
                    raise InputError(f"unknown basis element {br[key]!r} in bracket")
            i, j = pos[br["x"]], pos[br["y"]]
            vec = {}
            for t in br["terms"]:
                if t["z"] not in pos:
                    raise InputError(f"unknown basis element {t['z']!r} in bracket")
                _vadd(vec, {pos[t["z"]]: parse_scalar(t["c"], ctx)}, 1)
            if i > j:
                i, j = j, i
                vec = {k: -c for k, c in vec.items()}
            if (i, j) in table:
                raise InputError(f"bracket [{br['x']},{br['y']}] listed twice")
            table[(i, j)] = vec
        if filtered is None:
            filtered = bool(d.get("filtered", False))
        return GradedLieAlgebra(basis, table, ctx, filtered)
    except KeyError as e:
        raise InputError(f"missing field {e.args[0]!r}") from None


def load_algebra(path):
    from .errors import load_json
    return algebra_from_dict(load_json(path))
