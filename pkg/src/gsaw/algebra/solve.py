"""Exact transfer-matrix solve.

The generating function of an automaton is ``v[start]`` where
``(I - M) v = b`` and ``b`` holds the final weights.  Each row is scaled to
integer polynomials in x, y, C and eliminated without ever forming a
quotient: pivot rows are combined by cross-multiplication and the result is
divided by the gcd of its entries.  Only ``v[start]`` is needed, so no back
substitution is done.
"""

from __future__ import annotations

import logging
import math
import time
from fractions import Fraction

import flint

from ..automaton import WeightedAutomaton
from ..weights import RatC
from .poly import ZCTX, to_fraction
from .ratfunc import RationalGF

log = logging.getLogger(__name__)

RHS = -1


class SingularSystemError(ArithmeticError):
    """``I - M`` is singular: some edge weight is missing its grading variable."""


class BudgetExceeded(TimeoutError):
    pass


def _useful(a: WeightedAutomaton) -> list[bool]:
    n = a.num_states
    fwd = [[] for _ in range(n)]
    bwd = [[] for _ in range(n)]
    for s, d, _ in a.edges:
        fwd[s].append(d)
        bwd[d].append(s)

    def reach(seeds, adj):
        seen = [False] * n
        stack = list(seeds)
        for s in stack:
            seen[s] = True
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        return seen

    f = reach([0], fwd)
    b = reach(list(a.final), bwd)
    return [p and q for p, q in zip(f, b)]


def _row_scale(terms: dict) -> tuple[dict, object]:
    """Turn {col: {(x, y): scalar}} into integer polynomials {col: fmpz_mpoly}."""
    ratc = any(isinstance(s, RatC) for t in terms.values() for s in t.values())
    if ratc:
        den = flint.fmpq_poly(1)
        for t in terms.values():
            for s in t.values():
                d = RatC.coerce(s).den
                den = den * d / den.gcd(d)
        out: dict = {}
        zden = 1
        polys = {}
        for col, t in terms.items():
            acc = {}
            for (ex, ey), s in t.items():
                s = RatC.coerce(s)
                p = s.num * den / s.den
                for k, q in enumerate(p.coeffs()):
                    if q != 0:
                        acc[(ex, ey, k)] = acc.get((ex, ey, k), 0) + q
                        zden = math.lcm(zden, int(flint.fmpq(q).q))
            polys[col] = acc
        for col, acc in polys.items():
            d = {m: int(to_fraction(q) * zden) for m, q in acc.items() if q != 0}
            if d:
                out[col] = ZCTX.from_dict(d)
        return out, None
    zden = 1
    for t in terms.values():
        for s in t.values():
            zden = math.lcm(zden, Fraction(s).denominator)
    out = {}
    for col, t in terms.items():
        d = {}
        for (ex, ey), s in t.items():
            v = Fraction(s) * zden
            if v:
                d[(ex, ey, 0)] = d.get((ex, ey, 0), 0) + int(v)
        d = {m: v for m, v in d.items() if v}
        if d:
            out[col] = ZCTX.from_dict(d)
    return out, None


def _assemble(a: WeightedAutomaton) -> tuple[dict[int, dict], list[int]]:
    keep = _useful(a)
    terms: dict[int, dict] = {i: {} for i in range(a.num_states) if keep[i]}
    for i in terms:
        terms[i][i] = {(0, 0): Fraction(1)}
    for s, d, w in a.edges:
        if not (keep[s] and keep[d]):
            continue
        if w.y == 0 and w.x == 0:
            raise SingularSystemError(f"edge {s}->{d} has no x or y factor")
        row = terms[s].setdefault(d, {})
        k = (w.x, w.y)
        row[k] = row.get(k, 0) - w.coeff
    for i, f in a.final.items():
        if keep[i]:
            terms[i][RHS] = {(0, 0): f}
    rows = {}
    for i, t in terms.items():
        for col in list(t):
            t[col] = {k: v for k, v in t[col].items() if v != 0}
            if not t[col]:
                del t[col]
        rows[i], _ = _row_scale(t)
    return rows, [i for i in terms]


def _row_gcd(row: dict) -> flint.fmpz_mpoly:
    g = None
    for p in row.values():
        g = p if g is None else g.gcd(p)
        if g.is_one():
            break
    return g


def solve_transfer(a: WeightedAutomaton, *, budget: float | None = None) -> RationalGF:
    """Generating function of ``a`` as a reduced rational function.

    ``budget`` is a wall-clock limit in seconds; exceeding it raises
    :class:`BudgetExceeded`.
    """
    t0 = time.monotonic()
    if not a.final:
        return RationalGF(0)
    rows, live = _assemble(a)
    if 0 not in rows:
        return RationalGF(0)
    cols: dict[int, set[int]] = {i: set() for i in live}
    for i, row in rows.items():
        for j in row:
            if j != RHS:
                cols[j].add(i)
    pending = set(live) - {0}

    def cost(k: int) -> tuple:
        r = len(rows[k]) - (RHS in rows[k])
        return ((r - 1) * (len(cols[k]) - 1), len(rows[k][k]), k)

    while pending:
        if budget is not None and time.monotonic() - t0 > budget:
            raise BudgetExceeded(f"exact solve exceeded {budget:g}s with {len(pending)} unknowns left")
        k = min(pending, key=cost)
        pending.discard(k)
        prow = rows.pop(k)
        piv = prow.get(k)
        if piv is None or piv.is_zero():
            raise SingularSystemError(f"zero pivot at state {k}")
        for j in prow:
            if j != RHS:
                cols[j].discard(k)
        for i in list(cols[k]):
            row = rows[i]
            f = row.pop(k)
            new = {}
            for j, p in row.items():
                new[j] = piv * p
            for j, p in prow.items():
                if j == k:
                    continue
                v = new.get(j)
                v = -f * p if v is None else v - f * p
                if v.is_zero():
                    new.pop(j, None)
                    if j != RHS:
                        cols[j].discard(i)
                else:
                    new[j] = v
                    if j != RHS:
                        cols[j].add(i)
            g = _row_gcd(new) if new else None
            if g is not None and not g.is_one():
                new = {j: p / g for j, p in new.items()}
            rows[i] = new
        del cols[k]
    last = rows[0]
    num = last.get(RHS)
    den = last.get(0)
    if den is None or den.is_zero():
        raise SingularSystemError("zero pivot at the start state")
    log.debug("exact solve of %d unknowns took %.2fs", len(live), time.monotonic() - t0)
    return RationalGF(num if num is not None else 0, den)
