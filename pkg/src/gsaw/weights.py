"""Edge weights for the four models: plain, uniform, energetic, Greek key.

Probabilities are computed by replaying the walk inside a window in traversal
order: segments in order, paths in order, points in order.  A vertex counts as
visited once the replay has passed it.  Each strip column pays for the steps
that leave it exactly once: the start edge pays for the left half of the first
frame, each transition pays for the middle column of its extended frame, and
an edge into an accepting frame pays for the right half of that frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Union

import flint

from .extension import Raw, Transition

Model = Literal["plain", "uniform", "energetic", "greek_key"]
MODELS: tuple[str, ...] = ("plain", "uniform", "energetic", "greek_key")


class RatC:
    """Element of Q(C): ``num/den`` with coprime parts and a monic denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None):
        num = flint.fmpq_poly(num) if not isinstance(num, flint.fmpq_poly) else num
        den = flint.fmpq_poly(1) if den is None else (den if isinstance(den, flint.fmpq_poly) else flint.fmpq_poly(den))
        if den.is_zero():
            raise ZeroDivisionError("zero denominator in Q(C)")
        if num.is_zero():
            den = flint.fmpq_poly(1)
        else:
            g = num.gcd(den)
            if g.degree() > 0:
                num, den = num / g, den / g
        lead = den.coeffs()[-1]
        if lead != 1:
            num, den = num / lead, den / lead
        self.num = num
        self.den = den
        self._hash = None

    @staticmethod
    def gen() -> RatC:
        return RatC(flint.fmpq_poly([0, 1]))

    @classmethod
    def coerce(cls, v) -> RatC:
        if isinstance(v, RatC):
            return v
        if isinstance(v, Fraction):
            return cls(flint.fmpq_poly([flint.fmpq(v.numerator, v.denominator)]))
        return cls(flint.fmpq_poly([v]))

    def __add__(self, o):
        o = RatC.coerce(o)
        return RatC(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatC(-self.num, self.den)

    def __sub__(self, o):
        return self + (-RatC.coerce(o))

    def __rsub__(self, o):
        return RatC.coerce(o) - self

    def __mul__(self, o):
        o = RatC.coerce(o)
        return RatC(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = RatC.coerce(o)
        return RatC(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, o):
        return RatC.coerce(o) / self

    def __pow__(self, n: int):
        if n < 0:
            return RatC(self.den ** -n, self.num ** -n)
        return RatC(self.num**n, self.den**n)

    def __eq__(self, o):
        try:
            o = RatC.coerce(o)
        except TypeError:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            if self.den == 1 and self.num.degree() <= 0:
                c = self.num.coeffs()
                q = c[0] if c else 0
                self._hash = hash(Fraction(int(q.p), int(q.q)) if c else 0)
            else:
                self._hash = hash((str(self.num), str(self.den)))
        return self._hash

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __call__(self, c):
        """Evaluate at a rational point."""
        c = Fraction(c)
        q = flint.fmpq(c.numerator, c.denominator)
        d = self.den(q)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at C={c}")
        v = self.num(q) / d
        return Fraction(int(v.p), int(v.q))

    def to_json(self) -> dict:
        return {"num": [_qstr(v) for v in self.num.coeffs()], "den": [_qstr(v) for v in self.den.coeffs()]}

    @classmethod
    def from_json(cls, d: dict) -> RatC:
        return cls(
            flint.fmpq_poly([_qparse(s) for s in d["num"]]),
            flint.fmpq_poly([_qparse(s) for s in d["den"]]),
        )

    def __repr__(self):
        return f"RatC(({self.num}) / ({self.den}))".replace("x", "C")


Scalar = Union[Fraction, RatC]


def _qstr(q) -> str:
    q = flint.fmpq(q)
    return f"{q.p}/{q.q}"


def _qparse(s: str) -> flint.fmpq:
    p, _, q = s.partition("/")
    return flint.fmpq(int(p), int(q or 1))


def scalar_to_json(s: Scalar):
    if isinstance(s, RatC):
        return s.to_json()
    return f"{s.numerator}/{s.denominator}"


def scalar_from_json(v) -> Scalar:
    if isinstance(v, dict):
        return RatC.from_json(v)
    if not isinstance(v, str):
        raise ValueError(f"bad coefficient {v!r}")
    return Fraction(v)


@dataclass(frozen=True, slots=True)
class EdgeWeight:
    coeff: Scalar
    x: int
    y: int


# ---------------------------------------------------------------- replay


def _neighbours(p, height):
    c, r = p
    out = [(c - 1, r), (c + 1, r)]
    if r > 0:
        out.append((c, r - 1))
    if r < height - 1:
        out.append((c, r + 1))
    return out


def replay(
    segs: Raw,
    width: int,
    height: int,
    cols: range | tuple[int, ...],
    *,
    left_wall: bool = False,
    right_open: bool = False,
    energies: bool = True,
) -> list[tuple[int, tuple[int, ...]]]:
    """Decision records for every step leaving a column in ``cols``.

    Each record is ``(chosen, levels)``: ``levels`` lists, for every free
    neighbour of the current vertex, how many visited neighbours it has
    besides the current vertex; ``chosen`` indexes the neighbour taken.
    With ``energies`` off the levels are left at zero, since the uniform
    model only needs their count.
    """
    occ: set = set()
    out = []

    def visited(q) -> bool:
        qc = q[0]
        if qc < 0:
            if not left_wall:
                raise ValueError(f"replay needs {q}, left of the window")
            return False
        if qc >= width:
            if not right_open:
                raise ValueError(f"replay needs {q}, right of the window")
            return False
        return q in occ

    for seg in segs:
        for path in seg:
            for k, u in enumerate(path):
                occ.add(u)
                if k + 1 == len(path) or u[0] not in cols:
                    continue
                v = path[k + 1]
                cands = [q for q in _neighbours(u, height) if (q[0] >= 0 or not left_wall) and not visited(q)]
                if not cands:
                    raise ValueError(f"step {u}->{v} leaves a vertex with no free neighbour")
                if not energies:
                    out.append((cands.index(v), (0,) * len(cands)))
                    continue
                levels = []
                for q in cands:
                    levels.append(sum(1 for z in _neighbours(q, height) if z != u and (z[0] >= 0 or not left_wall) and visited(z)))
                out.append((cands.index(v), tuple(levels)))
    return out


def uniform_factor(records) -> Fraction:
    d = 1
    for _, levels in records:
        d *= len(levels)
    return Fraction(1, d)


@lru_cache(maxsize=None)
def _energetic_step(chosen: int, levels: tuple[int, ...]) -> RatC:
    den = flint.fmpq_poly(0)
    for lv in levels:
        den += flint.fmpq_poly([0] * lv + [1])
    return RatC(flint.fmpq_poly([0] * levels[chosen] + [1]), den)


def energetic_factor(records) -> RatC:
    out = RatC(1)
    for chosen, levels in records:
        out = out * _energetic_step(chosen, levels)
    return out


# ---------------------------------------------------------------- raw-level weights used by the builder


def transition_coeff(model: str, ext: Raw, width: int, height: int) -> Scalar:
    """Coefficient contributed by the middle column of an extension of width ``width + 1``."""
    if model in ("plain", "greek_key"):
        return Fraction(1)
    recs = replay(ext, width + 1, height, ((width + 1) // 2,), energies=model == "energetic")
    return uniform_factor(recs) if model == "uniform" else energetic_factor(recs)


def start_coeff(model: str, start: Raw, width: int, height: int) -> Scalar:
    if model in ("plain", "greek_key"):
        return Fraction(1)
    recs = replay(start, width, height, range(width // 2), left_wall=True, energies=model == "energetic")
    return uniform_factor(recs) if model == "uniform" else energetic_factor(recs)


def accept_coeff(model: str, target: Raw, width: int, height: int) -> Scalar:
    """Factor for the right half of an accepting frame, whose right side is unvisited."""
    if model in ("plain", "greek_key"):
        return Fraction(1)
    recs = replay(target, width, height, range(width // 2, width), right_open=True, energies=model == "energetic")
    return uniform_factor(recs) if model == "uniform" else energetic_factor(recs)


# ---------------------------------------------------------------- frame-level API


def plain_weight(t: Transition) -> EdgeWeight:
    return EdgeWeight(Fraction(1), t.new_edge_count, 1)


def greek_key_weight(t: Transition) -> EdgeWeight:
    return EdgeWeight(Fraction(1), 0, 1)


def uniform_weight(t: Transition, is_accepting_target: bool = False) -> EdgeWeight:
    return _prob_weight("uniform", t, is_accepting_target)


def energetic_weight(t: Transition, is_accepting_target: bool = False) -> EdgeWeight:
    if t.extended.frame.width != 5:
        raise ValueError("energetic weights need width-4 frames")
    return _prob_weight("energetic", t, is_accepting_target)


def _prob_weight(model: str, t: Transition, acc: bool) -> EdgeWeight:
    ext = t.extended.frame
    w = ext.width - 1
    coeff = transition_coeff(model, ext.segments, w, ext.height)
    if acc:
        coeff = coeff * accept_coeff(model, t.target.segments, w, ext.height)
    return EdgeWeight(coeff, t.new_edge_count, 1)
