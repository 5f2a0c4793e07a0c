"""Polynomials in x, y and C, and the rational functions built from them.

All arithmetic is delegated to FLINT multivariate polynomials over Q with a
fixed three-variable context, so every polynomial in the package lives in the
same ring and can be combined freely.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

import flint

VARS = ("x", "y", "c")
QCTX = flint.fmpq_mpoly_ctx.get(VARS, "lex")
ZCTX = flint.fmpz_mpoly_ctx.get(VARS, "lex")

Poly = flint.fmpq_mpoly


def gens() -> tuple[Poly, Poly, Poly]:
    return QCTX.gens()


def const(v) -> Poly:
    return QCTX.constant(to_fmpq(v))


def to_fmpq(v) -> flint.fmpq:
    if isinstance(v, Fraction):
        return flint.fmpq(v.numerator, v.denominator)
    return flint.fmpq(v)


def to_fraction(q) -> Fraction:
    q = flint.fmpq(q)
    return Fraction(int(q.p), int(q.q))


def monomial(coeff, x: int = 0, y: int = 0, c: int = 0) -> Poly:
    return QCTX.from_dict({(x, y, c): to_fmpq(coeff)})


def cpoly(p: flint.fmpq_poly) -> Poly:
    """Lift a univariate polynomial in C into the shared ring."""
    return QCTX.from_dict({(0, 0, i): q for i, q in enumerate(p.coeffs()) if q != 0})


def to_zpoly(p: Poly) -> flint.fmpz_mpoly:
    """Integer polynomial; the caller guarantees integral coefficients."""
    return ZCTX.from_dict({m: int(to_fraction(q)) for m, q in p.to_dict().items()})


def from_zpoly(p: flint.fmpz_mpoly) -> Poly:
    return QCTX.from_dict(p.to_dict())


def var_index(name: str) -> int:
    try:
        return VARS.index(name)
    except ValueError:
        raise ValueError(f"unknown variable {name!r}") from None


def uses(p: Poly, name: str) -> bool:
    i = var_index(name)
    return any(m[i] for m in p.monoms())


def graded_parts(p: Poly, name: str) -> dict[int, Poly]:
    """Split ``p`` by the exponent of one variable; that variable is removed."""
    i = var_index(name)
    parts: dict[int, dict] = {}
    for m, q in p.to_dict().items():
        rest = tuple(0 if k == i else e for k, e in enumerate(m))
        parts.setdefault(m[i], {})[rest] = q
    return {k: QCTX.from_dict(d) for k, d in parts.items()}


def _term_key(m: tuple[int, ...]) -> tuple:
    return (sum(m), tuple(-e for e in m))


def render_poly(p: Poly) -> str:
    """Human-readable form sorted by total degree, then by exponent."""
    if p.is_zero():
        return "0"
    out = []
    for m, q in sorted(p.to_dict().items(), key=lambda t: _term_key(t[0])):
        q = to_fraction(q)
        mono = "*".join(
            (n if e == 1 else f"{n}^{e}") for n, e in zip(("x", "y", "C"), m) if e
        )
        sign = "-" if q < 0 else "+"
        a = abs(q)
        if mono and a == 1:
            body = mono
        elif mono:
            body = f"{a}*{mono}"
        else:
            body = str(a)
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


def poly_to_json(p: Poly) -> list[dict]:
    rows = []
    for m, q in sorted(p.to_dict().items(), key=lambda t: _term_key(t[0])):
        q = to_fraction(q)
        row = {"x": int(m[0]), "y": int(m[1])}
        if m[2]:
            row["c"] = int(m[2])
        row["coeff"] = f"{q.numerator}/{q.denominator}"
        rows.append(row)
    return rows


def poly_from_json(rows: Iterable[dict]) -> Poly:
    d: dict = {}
    for row in rows:
        m = (int(row["x"]), int(row["y"]), int(row.get("c", 0)))
        d[m] = d.get(m, 0) + to_fmpq(Fraction(row["coeff"]))
    return QCTX.from_dict({m: q for m, q in d.items() if q != 0})


def rename(p: Poly, src: str, dst: str) -> Poly:
    """Move every power of ``src`` onto ``dst``; ``dst`` must be absent."""
    i, j = var_index(src), var_index(dst)
    if uses(p, dst):
        raise ValueError(f"{dst} already occurs in the polynomial")
    out = {}
    for m, q in p.to_dict().items():
        m = list(m)
        m[j], m[i] = m[i], 0
        out[tuple(m)] = q
    return QCTX.from_dict(out)
