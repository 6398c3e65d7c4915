"""Tube hypersurfaces Sigma x R^4(y) over hypersurfaces Sigma of R^4(x).

All brackets are taken between intrinsic vector fields on the chart
(u1, u2, u3, y0, ..., y3) of the tube.  A tangent field splits as an
x-part along Sigma, expanded in the frame X_0, X_1, X_2, and a y-part,
expanded in JX_0, JX_1, JX_2 and the transverse field N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import sympy as sp

from ..linalg import row_reduce
from .curves import Curve, det
from .fields import VectorField, vf_bracket
from .functions import FunctionRing

__all__ = [
    "Variant",
    "TubeModel",
    "TubeError",
    "build_tube",
    "tube_from_parametrization",
    "hyperquadric_tube",
]

Y_COORDS = ("y0", "y1", "y2", "y3")


class TubeError(ValueError):
    pass


class Variant(str, Enum):
    TANGENT_VARIETY = "tangent"        # psi = r*gamma + s*gamma'
    OSCULATING_RULED = "osculating"    # psi = gamma + r*gamma' + s*gamma''


@dataclass
class Decomposition:
    """Coefficients of a tangent field in the frame (Z_0..Z_2, conj Z_0..conj Z_2, N)."""

    hol: list     # three functions
    antihol: list  # three functions
    transverse: object

    def is_zero(self):
        return not any(self.hol) and not any(self.antihol) and not self.transverse


@dataclass
class TubeModel:
    ring: FunctionRing
    u: tuple                      # the three coordinates of Sigma
    psi: list                     # four functions: the parametrization of Sigma
    frame_x: list                 # three 4-vectors (ambient directions of X_0, X_1, X_2)
    frame: list                   # three intrinsic x-fields X_k
    transverse: list              # 4-vector n completing frame_x to a basis of R^4
    curve: Curve | None = None
    variant: Variant | None = None
    locus: list = field(default_factory=list)   # functions assumed nonzero
    j_signs: tuple = (1, 1, 1)    # +1, or -1 for a deliberately corrupted J

    def __post_init__(self):
        ring = self.ring
        self.JX = [self._y_field(e, s) for e, s in zip(self.frame_x, self.j_signs)]
        self.N = self._y_field(self.transverse, 1)
        half = ring.const(sp.Rational(1, 2))
        mi = ring.const(-sp.I)
        self.Z = [(X + JX.scale(mi)).scale(half) for X, JX in zip(self.frame, self.JX)]
        self.Zbar = [z.conj() for z in self.Z]
        # y-part: columns frame_x + [n]; Cramer with a single-monomial determinant
        cols = [list(e) for e in self.frame_x] + [list(self.transverse)]
        self._ymat = [[cols[j][i] for j in range(4)] for i in range(4)]
        self._ydet = det(self._ymat)
        if not self._ydet:
            raise TubeError("the frame and the transverse vector do not span R^4")
        if not self._ydet.is_unit():
            raise TubeError("the frame determinant is not invertible in the function ring")
        # x-part: X_k = sum_u M[k][u] d_u
        self._xmat = [[X[c] for c in self.u] for X in self.frame]
        self._xdet = det(self._xmat)
        if not self._xdet or not self._xdet.is_unit():
            raise TubeError("the intrinsic frame is not invertible in the function ring")
        self.locus.extend([self._ydet, self._xdet])
        self._xinv = _inverse3(self._xmat, self._xdet)

    # -- frame helpers --------------------------------------------------------------
    def _y_field(self, vec, sign):
        ring = self.ring
        coeffs = {y: (f if sign == 1 else -f) for y, f in zip(Y_COORDS, vec) if f}
        return VectorField(ring, coeffs)

    @property
    def coords(self):
        return self.ring.coords

    def y_translation(self, k):
        return VectorField.partial(self.ring, Y_COORDS[k])

    def solve_x(self, vec):
        """Coefficients of an ambient x-vector in (frame_x, transverse)."""
        out = []
        for j in range(4):
            m = [row[:j] + [vec[i]] + row[j + 1:] for i, row in enumerate(self._ymat)]
            out.append(det(m) / self._ydet)
        return out

    def decompose(self, V: VectorField) -> Decomposition:
        ring = self.ring
        a = [V[c] for c in self.u]
        alpha = [sum((a[u] * self._xinv[u][k] for u in range(3)), ring.zero()) for k in range(3)]
        b = [V[y] for y in Y_COORDS]
        beta = self.solve_x(b)
        sgn = [ring.const(s) for s in self.j_signs]
        beta = [beta[k] * sgn[k] for k in range(3)] + [beta[3]]
        i = ring.const(sp.I)
        hol = [alpha[k] + i * beta[k] for k in range(3)]
        anti = [alpha[k] - i * beta[k] for k in range(3)]
        return Decomposition(hol, anti, beta[3])

    def section(self, coeffs, conj=False):
        """sum_k c_k Z_k (or conj Z_k)."""
        basis = self.Zbar if conj else self.Z
        out = VectorField(self.ring)
        for c, z in zip(coeffs, basis):
            if c:
                out = out + z.scale(c)
        return out

    def intrinsic_field(self, x_vec, y_vec):
        """Field with ambient x-part ``x_vec`` (tangent to Sigma) and y-part ``y_vec``."""
        coeffs = self.solve_x(x_vec)
        if coeffs[3]:
            raise TubeError("x-part is not tangent to Sigma")
        V = VectorField(self.ring)
        for c, X in zip(coeffs[:3], self.frame):
            if c:
                V = V + X.scale(c)
        for y, f in zip(Y_COORDS, y_vec):
            if f:
                V = V + VectorField(self.ring, {y: f})
        return V

    def real_frame(self):
        return list(self.frame) + list(self.JX)

    def bracket_generating(self):
        """Rank of D + [D, D] in coordinates (7 means bracket generating)."""
        fields = self.real_frame()
        vecs = [f for f in fields]
        for i in range(len(fields)):
            for j in range(i + 1, len(fields)):
                vecs.append(vf_bracket(fields[i], fields[j]))
        rows = [{c: v[c] for c in self.coords if v[c]} for v in vecs]
        return row_reduce(rows, list(self.coords)).rank

    def d_rank(self):
        rows = [{c: v[c] for c in self.coords if v[c]} for v in self.real_frame()]
        return row_reduce(rows, list(self.coords)).rank

    def with_corrupted_j(self, k=1):
        """The same frame with the sign of J on X_k flipped (not a CR structure)."""
        signs = list(self.j_signs)
        signs[k] = -signs[k]
        return TubeModel(self.ring, self.u, self.psi, self.frame_x, self.frame, self.transverse,
                         self.curve, self.variant, [], tuple(signs))

    def describe(self):
        return {
            "chart": list(self.coords),
            "variant": self.variant.value if self.variant else "parametrization",
            "curve": self.curve.describe() if self.curve else None,
            "frame_x": [[str(f) for f in e] for e in self.frame_x],
            "transverse": [str(f) for f in self.transverse],
        }


def _inverse3(m, d):
    """Inverse of a 3x3 matrix with unit determinant ``d`` (adjugate / d)."""
    inv_d = d.inverse()
    out = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            minor = [[m[r][c] for c in range(3) if c != i] for r in range(3) if r != j]
            cof = det(minor)
            if (i + j) % 2:
                cof = -cof
            out[i][j] = cof * inv_d
    return out


def _pick_transverse(ring, frame_x, preferred):
    cands = ([preferred] if preferred is not None else []) + [
        [ring.one() if i == k else ring.zero() for i in range(4)] for k in range(4)]
    for n in cands:
        cols = [list(e) for e in frame_x] + [list(n)]
        d = det([[cols[j][i] for j in range(4)] for i in range(4)])
        if d and d.is_unit():
            return n
    raise TubeError("no transverse direction with an invertible determinant")


def build_tube(c: Curve, variant=Variant.TANGENT_VARIETY, names=("r", "s")):
    """Tube over the tangent variety (or the osculating ruled variety) of ``c``."""
    variant = Variant(variant)
    p = c.variable
    r, s = names
    if p in names:
        raise TubeError("curve variable clashes with chart names")
    coords = (r, s, p) + Y_COORDS if variant is Variant.TANGENT_VARIETY else (p, r, s) + Y_COORDS
    ring = FunctionRing(coords, p, c.ring.parameters)
    g = [[ring.transfer(f) for f in jet] for jet in c.jets(4)]
    R, S = ring.coord(r), ring.coord(s)
    dr, ds, dp = (VectorField.partial(ring, x) for x in (r, s, p))
    inv_s = S.inverse()
    if variant is Variant.TANGENT_VARIETY:
        psi = [R * g[0][i] + S * g[1][i] for i in range(4)]
        frame_x = [g[0], g[1], g[2]]
        # psi_t = r gamma' + s gamma''  =>  gamma'' = (d_t - r d_s)/s
        frame = [dr, ds, (dp - ds.scale(R)).scale(inv_s)]
        preferred = g[3]
    else:
        psi = [g[0][i] + R * g[1][i] + S * g[2][i] for i in range(4)]
        frame_x = [g[1], g[2], g[3]]
        # psi_t = gamma' + r gamma'' + s gamma'''  =>  gamma''' = (d_t - d_r - r d_s)/s
        frame = [dr, ds, (dp - dr - ds.scale(R)).scale(inv_s)]
        preferred = g[0]
    n = _pick_transverse(ring, frame_x, preferred)
    m = TubeModel(ring, (r, s, p) if variant is Variant.TANGENT_VARIETY else (p, r, s),
                  psi, frame_x, frame, n, c, variant, [S])
    return m


def tube_from_parametrization(psi_texts, coords=("u1", "u2", "u3"), parameters=()):
    """Tube over Sigma = psi(U) with frame X_k = d/du_k; ``psi_texts`` are four expressions."""
    ring = FunctionRing(tuple(coords) + Y_COORDS, None, parameters)
    local = dict(ring.symbols)
    psi = [ring.from_sympy(sp.sympify(t.replace("^", "**"), locals=local)) for t in psi_texts]
    frame_x = [[f.diff(u) for f in psi] for u in coords]
    frame = [VectorField.partial(ring, u) for u in coords]
    n = _pick_transverse(ring, frame_x, None)
    return TubeModel(ring, tuple(coords), psi, frame_x, frame, n)


def hyperquadric_tube():
    """Tube over the graph x0 = x1^2 + x2^2 + x3^2 (Levi-nondegenerate)."""
    return tube_from_parametrization(["x1^2 + x2^2 + x3^2", "x1", "x2", "x3"], ("x1", "x2", "x3"))
