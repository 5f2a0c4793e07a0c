"""Reduced rational functions in x, y and C."""

from __future__ import annotations

from fractions import Fraction

import flint

from ..weights import RatC
from .poly import (
    QCTX,
    Poly,
    const,
    cpoly,
    graded_parts,
    poly_from_json,
    poly_to_json,
    render_poly,
    to_fmpq,
    to_fraction,
    uses,
    var_index,
)


class RationalGF:
    """``num / den`` with ``gcd(num, den) = 1``.

    The scale is fixed by making the constant term of ``den`` equal to 1 when
    it has one, and its leading coefficient 1 otherwise, so equal functions
    have equal representations.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _lift(num)
        den = const(1) if den is None else _lift(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = num, const(1)
            return
        g = num.gcd(den)
        if not g.is_constant():
            num, den = num / g, den / g
        k = den.to_dict().get((0, 0, 0))
        if k is None:
            k = den.leading_coefficient()
        self.num = num / k
        self.den = den / k

    # arithmetic -------------------------------------------------------------

    @staticmethod
    def coerce(v) -> RationalGF:
        return v if isinstance(v, RationalGF) else RationalGF(v)

    def __add__(self, o):
        o = RationalGF.coerce(o)
        if self.den == o.den:
            return RationalGF(self.num + o.num, self.den)
        return RationalGF(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalGF(-self.num, self.den)

    def __sub__(self, o):
        return self + (-RationalGF.coerce(o))

    def __rsub__(self, o):
        return RationalGF.coerce(o) - self

    def __mul__(self, o):
        o = RationalGF.coerce(o)
        return RationalGF(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = RationalGF.coerce(o)
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalGF(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, o):
        return RationalGF.coerce(o) / self

    def __pow__(self, n: int):
        if n < 0:
            return RationalGF(self.den ** -n, self.num ** -n)
        return RationalGF(self.num**n, self.den**n)

    def __eq__(self, o):
        if not isinstance(o, RationalGF):
            try:
                o = RationalGF(o)
            except TypeError:
                return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def cross_equal(self, other: RationalGF) -> bool:
        """Equality by cross-multiplication; independent of normalization."""
        return self.num * other.den == other.num * self.den

    # calculus and specialization -------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def variables(self) -> tuple[str, ...]:
        return tuple(v for v in ("x", "y", "c") if uses(self.num, v) or uses(self.den, v))

    def subs(self, **values) -> RationalGF:
        """Substitute rational values for some of ``x``, ``y``, ``c``."""
        vals = {}
        for k, v in values.items():
            var_index(k)
            vals[k] = to_fmpq(Fraction(v))
        den = self.den.subs(vals)
        if den.is_zero():
            raise ZeroDivisionError(f"denominator vanishes at {values}")
        return RationalGF(self.num.subs(vals), den)

    def __call__(self, x=None, y=None, c=None) -> Fraction:
        vals = {k: v for k, v in (("x", x), ("y", y), ("c", c)) if v is not None}
        r = self.subs(**vals)
        if not r.num.is_constant() or not r.den.is_constant():
            raise ValueError(f"not all variables fixed; free: {r.variables()}")
        return to_fraction(r.num.leading_coefficient() if not r.num.is_zero() else 0) / to_fraction(
            r.den.leading_coefficient()
        )

    def derivative(self, var: str) -> RationalGF:
        var_index(var)
        n, d = self.num, self.den
        return RationalGF(n.derivative(var) * d - n * d.derivative(var), d * d)

    def to_ratc(self) -> RatC:
        """View a function of C alone as an element of Q(C)."""
        if uses(self.num, "x") or uses(self.num, "y") or uses(self.den, "x") or uses(self.den, "y"):
            raise ValueError("function still depends on x or y")
        return RatC(_cpoly_univariate(self.num), _cpoly_univariate(self.den))

    @classmethod
    def from_scalar(cls, s) -> RationalGF:
        if isinstance(s, RatC):
            return cls(cpoly(s.num), cpoly(s.den))
        return cls(const(Fraction(s)))

    def graded(self, var: str) -> tuple[dict[int, Poly], dict[int, Poly]]:
        return graded_parts(self.num, var), graded_parts(self.den, var)

    # I/O --------------------------------------------------------------------

    def to_json(self) -> dict:
        return {"num": poly_to_json(self.num), "den": poly_to_json(self.den)}

    @classmethod
    def from_json(cls, doc: dict) -> RationalGF:
        try:
            return cls(poly_from_json(doc["num"]), poly_from_json(doc["den"]))
        except (KeyError, TypeError, ValueError) as e:
            raise ValueError(f"malformed generating function JSON: {e}") from None

    def __str__(self):
        n, d = render_poly(self.num), render_poly(self.den)
        if d == "1":
            return n
        return f"({n}) / ({d})"

    def __repr__(self):
        return f"RationalGF({self})"


def _lift(v) -> Poly:
    if isinstance(v, flint.fmpq_mpoly):
        return v
    if isinstance(v, flint.fmpz_mpoly):
        return QCTX.from_dict(v.to_dict())
    if isinstance(v, (int, Fraction, flint.fmpq, flint.fmpz)):
        return const(Fraction(v) if not isinstance(v, (flint.fmpq, flint.fmpz)) else v)
    raise TypeError(f"cannot build a polynomial from {type(v).__name__}")


def _cpoly_univariate(p: Poly) -> flint.fmpq_poly:
    d = {m[2]: q for m, q in p.to_dict().items()}
    if not d:
        return flint.fmpq_poly(0)
    return flint.fmpq_poly([d.get(i, 0) for i in range(max(d) + 1)])
