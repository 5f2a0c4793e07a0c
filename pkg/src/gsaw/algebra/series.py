"""Truncated power series, from an automaton or from a rational function.

A :class:`Series` is graded by one of ``x`` or ``y``.  The coefficient of
``grade^t`` is a sparse map from the exponent of the other variable to a
scalar (a Fraction, or an element of Q(C) for the energetic model).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import flint

from ..automaton import WeightedAutomaton
from ..weights import RatC, Scalar, scalar_from_json, scalar_to_json
from .poly import QCTX, to_fraction, uses
from .ratfunc import RationalGF, _cpoly_univariate

GRADES = ("x", "y")


def _other(grade: str) -> str:
    if grade not in GRADES:
        raise ValueError(f"series must be graded by x or y, not {grade!r}")
    return "x" if grade == "y" else "y"


def _clean(d: dict) -> dict:
    return {k: v for k, v in sorted(d.items()) if v != 0}


@dataclass
class Series:
    grade: str
    order: int
    coeffs: list[dict[int, Scalar]] = field(default_factory=list)

    def __post_init__(self):
        _other(self.grade)
        if self.order < 0:
            raise ValueError("series order must be nonnegative")
        self.coeffs = [_clean(d) for d in self.coeffs] + [{} for _ in range(self.order + 1 - len(self.coeffs))]
        if len(self.coeffs) != self.order + 1:
            raise ValueError("more coefficients than the truncation order allows")

    @property
    def other(self) -> str:
        return _other(self.grade)

    def __getitem__(self, t: int) -> dict[int, Scalar]:
        return self.coeffs[t]

    def coefficient(self, t: int, e: int | None = None) -> Scalar:
        """Coefficient of ``grade^t`` (summed over the other variable, i.e. it set to 1, when ``e`` is None)."""
        d = self.coeffs[t]
        if e is not None:
            return d.get(e, 0)
        vals = list(d.values())
        return sum(vals[1:], vals[0]) if vals else 0

    def collapsed(self) -> list[Scalar]:
        return [self.coefficient(t) for t in range(self.order + 1)]

    def joint(self) -> dict[tuple[int, int], Scalar]:
        """``{(x_exp, y_exp): coeff}``."""
        out = {}
        for t, d in enumerate(self.coeffs):
            for e, v in d.items():
                out[(e, t) if self.grade == "y" else (t, e)] = v
        return dict(sorted(out.items()))

    def truncate(self, order: int) -> Series:
        return Series(self.grade, order, self.coeffs[: order + 1])

    def __eq__(self, o):
        if not isinstance(o, Series):
            return NotImplemented
        return self.grade == o.grade and self.order == o.order and self.coeffs == o.coeffs

    def to_json(self) -> list[dict]:
        other = self.other
        return [
            {self.grade: t, "terms": [{other: e, "coeff": scalar_to_json(_scalar(v))} for e, v in d.items()]}
            for t, d in enumerate(self.coeffs)
        ]

    @classmethod
    def from_json(cls, doc: list[dict]) -> Series:
        if not doc:
            raise ValueError("empty series")
        grade = "y" if "y" in doc[0] else "x"
        other = _other(grade)
        coeffs = []
        for t, row in enumerate(doc):
            if row.get(grade) != t:
                raise ValueError(f"series rows must be dense and ordered; row {t} is {row.get(grade)}")
            coeffs.append({int(term[other]): scalar_from_json(term["coeff"]) for term in row["terms"]})
        return cls(grade, len(coeffs) - 1, coeffs)

    def __str__(self):
        parts = []
        for t, d in enumerate(self.coeffs):
            for e, v in d.items():
                xe, ye = (e, t) if self.grade == "y" else (t, e)
                mono = "*".join(s for s in (_pow("x", xe), _pow("y", ye)) if s)
                parts.append(f"{v}*{mono}" if mono else str(v))
        return " + ".join(parts) if parts else "0"


def _pow(v: str, e: int) -> str:
    return "" if e == 0 else (v if e == 1 else f"{v}^{e}")


def _scalar(v) -> Scalar:
    return v if isinstance(v, RatC) else Fraction(v)


def series_transfer(a: WeightedAutomaton, order: int, grade: str = "y") -> Series:
    """Sum of accepted walk weights, truncated at ``grade^order``.

    Forward dynamic programming over the grading exponent: the weight of all
    partial walks from the start reaching each state with grade exponent t.
    Every edge must carry a positive exponent of the grading variable.
    """
    other = _other(grade)
    if order < 0:
        raise ValueError("series order must be nonnegative")
    energetic = any(isinstance(w.coeff, RatC) for _, _, w in a.edges)
    one: Scalar = RatC(1) if energetic else Fraction(1)
    out_edges = a.out_edges()
    for s, d, w in a.edges:
        if getattr(w, grade) <= 0:
            raise ValueError(f"edge {s}->{d} has no positive power of {grade}")
    layers: list[dict[int, dict[int, Scalar]]] = [dict() for _ in range(order + 1)]
    layers[0][0] = {0: one}
    result: list[dict[int, Scalar]] = []
    for t in range(order + 1):
        acc: dict[int, Scalar] = {}
        for i, poly in layers[t].items():
            f = a.final.get(i)
            if f is not None:
                for e, v in poly.items():
                    acc[e] = acc.get(e, 0) + v * f
            for j, w in out_edges[i]:
                g = getattr(w, grade)
                if t + g > order:
                    continue
                o = getattr(w, other)
                tgt = layers[t + g].setdefault(j, {})
                for e, v in poly.items():
                    k = e + o
                    prev = tgt.get(k)
                    tgt[k] = v * w.coeff if prev is None else prev + v * w.coeff
        layers[t] = {}
        result.append(acc)
    return Series(grade, order, result)


def series_of(gf: RationalGF, order: int, grade: str = "y") -> Series:
    """Expand ``gf`` in powers of ``grade`` up to ``grade^order``.

    The constant term (in ``grade``) of the denominator must be invertible,
    and each coefficient must be a polynomial in the other variable with
    coefficients in Q(C).
    """
    other = _other(grade)
    if order < 0:
        raise ValueError("series order must be nonnegative")
    nparts, dparts = gf.graded(grade)
    d0 = dparts.get(0)
    if d0 is None or d0.is_zero():
        raise ZeroDivisionError(f"denominator has no {grade}^0 term; not a power series in {grade}")
    coeffs: list[RationalGF] = []
    for t in range(order + 1):
        acc = RationalGF(nparts.get(t, QCTX.constant(0)))
        for k in range(1, t + 1):
            dk = dparts.get(k)
            if dk is not None:
                acc = acc - coeffs[t - k] * RationalGF(dk)
        coeffs.append(acc / RationalGF(d0))
    return Series(grade, order, [_flatten(c, other) for c in coeffs])


def _flatten(r: RationalGF, other: str) -> dict[int, Scalar]:
    if uses(r.den, other):
        raise ValueError(f"series coefficient {r} is not a polynomial in {other}")
    i = 0 if other == "x" else 1
    cden = _cpoly_univariate(r.den)
    parts: dict[int, dict] = {}
    for m, q in r.num.to_dict().items():
        parts.setdefault(m[i], {})[m[2]] = q
    out: dict[int, Scalar] = {}
    has_c = uses(r.num, "c") or uses(r.den, "c")
    for e, cd in parts.items():
        if has_c:
            num = flint.fmpq_poly([cd.get(k, 0) for k in range(max(cd) + 1)])
            out[e] = RatC(num, cden)
        else:
            out[e] = to_fraction(cd[0]) / to_fraction(cden.coeffs()[0])
    return out
