"""Vector fields with coefficients in a :class:`FunctionRing`."""

from __future__ import annotations

from .functions import CoordFunction, FunctionError

__all__ = ["VectorField", "vf_bracket", "ChartError"]


class ChartError(FunctionError):
    pass


class VectorField:
    """sum_x V^x d/dx over the coordinates of a ring (complex coefficients allowed)."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring, coeffs=None):
        self.ring = ring
        out = {}
        for x, f in (coeffs or {}).items():
            if x not in ring.coords:
                raise ChartError(f"{x!r} is not a coordinate of the chart")
            if not isinstance(f, CoordFunction):
                f = ring.const(f)
            elif f.ring is not ring:
                raise ChartError("coefficient from a different chart")
            if f:
                out[x] = f
        self.coeffs = out

    @classmethod
    def partial(cls, ring, x):
        return cls(ring, {x: ring.one()})

    @property
    def chart(self):
        return self.ring.coords

    def __getitem__(self, x):
        return self.coeffs.get(x, self.ring.zero())

    def __bool__(self):
        return bool(self.coeffs)

    def _check(self, other):
        if not isinstance(other, VectorField):
            raise TypeError("expected a VectorField")
        if other.ring is not self.ring:
            raise ChartError("vector fields live on different charts")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for x, f in other.coeffs.items():
            out[x] = out[x] + f if x in out else f
        return VectorField(self.ring, out)

    def __neg__(self):
        return VectorField(self.ring, {x: -f for x, f in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f):
        """Multiply by a function or constant."""
        if not isinstance(f, CoordFunction):
            f = self.ring.const(f)
        return VectorField(self.ring, {x: f * g for x, g in self.coeffs.items()})

    def __rmul__(self, f):
        return self.scale(f)

    def apply(self, f):
        """Directional derivative V(f)."""
        out = self.ring.zero()
        for x, g in self.coeffs.items():
            d = f.diff(x)
            if d:
                out = out + g * d
        return out

    def conj(self):
        return VectorField(self.ring, {x: f.conj() for x, f in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return not (self - other)

    __hash__ = None

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({f})*d_{x}" for x, f in self.coeffs.items())

    __repr__ = __str__


def vf_bracket(X, Y):
    """[X, Y]^k = X(Y^k) - Y(X^k)."""
    X._check(Y)
    out = {}
    for k in X.ring.coords:
        v = X.apply(Y[k]) - Y.apply(X[k])
        if v:
            out[k] = v
    return VectorField(X.ring, out)
