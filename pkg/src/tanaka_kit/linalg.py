"""Exact sparse elimination over a commutative ring with a zero test.

Rows are dicts ``column -> element``.  Elements must support ``+ - *``,
``bool()`` (nonzero test), ``is_unit()``, ``inverse()`` and
``complexity()``.  Both :class:`~tanaka_kit.scalars.Scalar` and the
coordinate functions of :mod:`tanaka_kit.crgeom` qualify.

Pivots that are units are inverted.  A nonzero non-unit pivot is used
fraction-free and recorded as a genericity assumption ("this element is
assumed nonzero"), which is how parameters like ``1 + u^2`` are handled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["Reduction", "row_reduce", "kernel", "rank", "solve_in_span"]


@dataclass
class Reduction:
    rows: list            # reduced rows, one per pivot, in pivot-column order
    pivots: list          # pivot column of each row
    assumptions: list = field(default_factory=list)  # non-unit pivots assumed nonzero

    @property
    def rank(self):
        return len(self.pivots)


def _clean(row):
    return {c: v for c, v in row.items() if v}


def _axpy(target, a, src, b):
    """Return a*target - b*src (sparse)."""
    out = {c: a * v for c, v in target.items()} if not _is_one(a) else dict(target)
    for c, v in src.items():
        w = b * v
        if c in out:
            s = out[c] - w
            if s:
                out[c] = s
            else:
                del out[c]
        elif w:
            out[c] = -w
    return out


def _is_one(a):
    try:
        return a == 1
    except Exception:  # pragma: no cover - exotic element types
        return False


def row_reduce(rows, columns=None):
    """Reduce ``rows`` to (generalized) reduced row-echelon form.

    ``columns`` fixes the column order; by default sorted column keys.
    Unit pivots are scaled to one; non-unit pivots stay as they are and the
    rows above them are cleared fraction-free.
    """
    work = [_clean(r) for r in rows]
    work = [r for r in work if r]
    if columns is None:
        columns = sorted({c for r in work for c in r})
    order = {c: k for k, c in enumerate(columns)}
    for r in work:
        for c in r:
            if c not in order:
                raise KeyError(f"column {c!r} not in the declared column order")

    done_rows, pivots, assumptions = [], [], []
    for col in columns:
        cands = [k for k, r in enumerate(work) if col in r]
        if not cands:
            continue
        units = [k for k in cands if work[k][col].is_unit()]
        if units:
            k = units[0]
        else:
            k = min(cands, key=lambda j: (work[j][col].complexity(), j))
            assumptions.append(work[k][col])
        prow = work.pop(k)
        p = prow[col]
        if p.is_unit():
            if not _is_one(p):
                inv = p.inverse()
                prow = {c: inv * v for c, v in prow.items()}
                p = prow[col]
        nxt = []
        for r in work:
            if col in r:
                a = r[col]
                if _is_one(p):
                    r = _axpy(r, 1, prow, a)
                else:
                    r = _axpy(r, p, prow, a)
            if r:
                nxt.append(r)
        work = nxt
        done_rows.append(prow)
        pivots.append(col)

    # back substitution
    for i in range(len(done_rows) - 1, -1, -1):
        col = pivots[i]
        p = done_rows[i][col]
        for j in range(i):
            r = done_rows[j]
            if col in r:
                a = r[col]
                done_rows[j] = _axpy(r, 1, done_rows[i], a) if _is_one(p) else _axpy(r, p, done_rows[i], a)
    return Reduction(done_rows, pivots, assumptions)


def rank(rows, columns=None):
    return row_reduce(rows, columns).rank


def kernel(rows, columns, one):
    """Right kernel of the matrix whose rows are ``rows``.

    Returns (basis, reduction).  Each basis vector is a dict over
    ``columns``; the basis itself is returned in reduced echelon form.
    ``one`` is the ring's unit element.
    """
    red = row_reduce(rows, columns)
    pivset = set(red.pivots)
    basis = []
    for f in columns:
        if f in pivset:
            continue
        involved = [i for i, r in enumerate(red.rows) if f in r]
        nonunit = [i for i in involved if not red.rows[i][red.pivots[i]].is_unit()]
        vec = {}
        scale = one
        for i in nonunit:
            scale = scale * red.rows[i][red.pivots[i]]
        vec[f] = scale
        for i in involved:
            r = red.rows[i]
            p = r[red.pivots[i]]
            if p.is_unit():
                val = -(r[f] * p.inverse()) * scale
            else:
                val = -r[f]
                for j in nonunit:
                    if j != i:
                        val = val * red.rows[j][red.pivots[j]]
            if val:
                vec[red.pivots[i]] = val
        basis.append(vec)
    if basis:
        canon = row_reduce(basis, columns)
        basis = canon.rows
        red.assumptions.extend(canon.assumptions)
    return basis, red


def solve_in_span(vectors, target, columns, zero):
    """Coefficients expressing ``target`` in the span of ``vectors``.

    Free coefficients are set to zero.  Returns None when ``target`` is not
    in the span.  Only unit pivots are allowed here.
    """
    n = len(vectors)
    aux = [("c", k) for k in range(n)]
    rhs_key = ("rhs",)
    rows = []
    for col in columns:
        r = {aux[k]: v[col] for k, v in enumerate(vectors) if v.get(col)}
        if target.get(col):
            r[rhs_key] = target[col]
        if r:
            rows.append(r)
    red = row_reduce(rows, aux + [rhs_key])
    if rhs_key in red.pivots:
        return None
    coeffs = [zero] * n
    for r, p in zip(red.rows, red.pivots):
        if not r[p].is_unit():
            raise ZeroDivisionError("non-unit pivot while solving in a span")
        if rhs_key in r:
            coeffs[p[1]] = r[rhs_key] * r[p].inverse()
    return coeffs
