"""Moments, growth rates and coefficient dumps derived from generating functions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import flint
import mpmath

from .algebra.poly import to_fraction
from .algebra.ratfunc import RationalGF
from .algebra.series import Series
from .weights import RatC

PREC_BITS = 128


class NotAProbabilityGF(ValueError):
    """Moments were requested for a function whose total mass is not 1."""


class GrowthIndeterminate(ValueError):
    """The dominant singularity is missing, repeated, or shares its modulus."""


@dataclass(frozen=True)
class MomentReport:
    expected_length: Fraction | RatC | None
    variance_length: Fraction | RatC | None
    expected_displacement: Fraction | RatC | None
    variance_displacement: Fraction | RatC | None

    def to_json(self) -> dict:
        out = {}
        for name in ("expected_length", "variance_length", "expected_displacement", "variance_displacement"):
            v = getattr(self, name)
            if v is None:
                out[name] = None
            elif isinstance(v, RatC):
                out[name] = {"exact": v.to_json(), "text": repr(v)}
            else:
                out[name] = {"exact": f"{v.numerator}/{v.denominator}", "decimal": f"{float(v):.15g}"}
        return out


@dataclass(frozen=True)
class GrowthReport:
    alpha: mpmath.mpf
    mu: mpmath.mpf
    residue_constant: mpmath.mpf
    variable: str

    def to_json(self) -> dict:
        return {
            "variable": self.variable,
            "alpha": mpmath.nstr(self.alpha, 30),
            "mu": mpmath.nstr(self.mu, 30),
            "residue_constant": mpmath.nstr(self.residue_constant, 30),
        }


# ---------------------------------------------------------------- moments


def _at_one(r: RationalGF):
    r = r.subs(**{v: 1 for v in ("x", "y") if v in r.variables()})
    if "c" in r.variables():
        return r.to_ratc()
    return r()


def _factorial_moments(gf: RationalGF, var: str):
    """First and second derivative at 1 of the marginal in ``var``."""
    other = "y" if var == "x" else "x"
    f = gf.subs(**{other: 1}) if other in gf.variables() else gf
    d1 = f.derivative(var)
    d2 = d1.derivative(var)
    return _at_one(d1), _at_one(d2)


def _mass(gf: RationalGF):
    try:
        return _at_one(gf)
    except ZeroDivisionError:
        raise NotAProbabilityGF("the function has a pole at x = y = 1") from None


def moments(gf: RationalGF, variables: tuple[str, ...] = ("x", "y")) -> MomentReport:
    """Mean and variance of length (``x``) and displacement (``y``).

    Only the variables listed are analysed; the others are reported as None.
    The function must have total mass exactly 1.
    """
    mass = _mass(gf)
    if mass != 1:
        raise NotAProbabilityGF(f"total mass is {mass}, not 1")
    vals: dict[str, tuple] = {}
    for v in ("x", "y"):
        if v not in variables:
            vals[v] = (None, None)
            continue
        d1, d2 = _factorial_moments(gf, v)
        vals[v] = (d1, d2 + d1 - d1 * d1)
    return MomentReport(vals["x"][0], vals["x"][1], vals["y"][0], vals["y"][1])


def energetic_moments(gf: RationalGF) -> MomentReport:
    """As :func:`moments`, with results in Q(C)."""
    if "c" not in gf.variables():
        raise ValueError("energetic generating function must depend on C")
    return moments(gf)


# ---------------------------------------------------------------- growth


def _univariate(p, var: str) -> flint.fmpq_poly:
    i = 0 if var == "x" else 1
    d = {m[i]: q for m, q in p.to_dict().items()}
    return flint.fmpq_poly([d.get(k, 0) for k in range(max(d) + 1)]) if d else flint.fmpq_poly(0)


def _sturm(p: flint.fmpq_poly) -> list[flint.fmpq_poly]:
    seq = [p, p.derivative()]
    while seq[-1].degree() > 0:
        r = -(seq[-2] % seq[-1])
        if r.is_zero():
            break
        seq.append(r)
    return seq


def _sign_changes(seq, t: flint.fmpq) -> int:
    signs = [s for s in (q(t) for q in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def real_roots_in(p: flint.fmpq_poly, lo: Fraction, hi: Fraction, *, width: Fraction = Fraction(1, 2**140)) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals, each holding one root of the square-free ``p`` in ``(lo, hi]``."""
    seq = _sturm(p)

    def count(a, b):
        return _sign_changes(seq, _q(a)) - _sign_changes(seq, _q(b))

    out = []
    stack = [(Fraction(lo), Fraction(hi))]
    while stack:
        a, b = stack.pop()
        n = count(a, b)
        if n == 0:
            continue
        if n == 1:
            out.append(_refine(p, a, b, width))
            continue
        m = (a + b) / 2
        stack.append((m, b))
        stack.append((a, m))
    return sorted(out)


def _q(v: Fraction) -> flint.fmpq:
    return flint.fmpq(v.numerator, v.denominator)


def _refine(p, a: Fraction, b: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    if p(_q(b)) == 0:
        return b, b
    sb = p(_q(b)) > 0
    while b - a > width:
        m = (a + b) / 2
        v = p(_q(m))
        if v == 0:
            return m, m
        if (v > 0) == sb:
            b = m
        else:
            a = m
    return a, b


def growth(gf: RationalGF) -> GrowthReport:
    """Exponential growth of the coefficients of a one-variable function.

    The smallest positive denominator root ``alpha`` in (0, 1) is isolated
    with exact Sturm counts, then ``mu = 1/alpha`` and the constant of the
    simple pole, ``a(n) ~ C mu^n``, are evaluated at 128-bit precision.
    """
    free = [v for v in gf.variables()]
    if len(free) != 1 or free[0] == "c":
        raise ValueError(f"growth needs a function of x or y alone, got variables {free}")
    var = free[0]
    num = _univariate(gf.num, var)
    den = _univariate(gf.den, var)
    sqf = den / den.gcd(den.derivative())
    roots = real_roots_in(sqf, Fraction(0), Fraction(1))
    roots = [r for r in roots if r[0] > 0 or r[1] > 0]
    if not roots:
        raise GrowthIndeterminate("denominator has no root in (0, 1)")
    a, b = roots[0]
    if den.gcd(den.derivative()).degree() > 0:
        g = den.gcd(den.derivative())
        if real_roots_in(g / g.gcd(g.derivative()), a - Fraction(1, 2**140), b):
            raise GrowthIndeterminate("dominant pole is not simple")
    with mpmath.workprec(PREC_BITS + 32):
        alpha = (mpmath.mpf(a.numerator) / a.denominator + mpmath.mpf(b.numerator) / b.denominator) / 2
        _check_modulus(den, alpha)
        dcoef = [mpmath.mpf(to_fraction(q).numerator) / to_fraction(q).denominator for q in den.coeffs()]
        ncoef = [mpmath.mpf(to_fraction(q).numerator) / to_fraction(q).denominator for q in num.coeffs()]
        q_prime = sum(k * c * alpha ** (k - 1) for k, c in enumerate(dcoef) if k)
        p_val = sum(c * alpha**k for k, c in enumerate(ncoef))
        resid = -p_val / (alpha * q_prime)
    return GrowthReport(alpha, 1 / alpha, resid, var)


def _check_modulus(den: flint.fmpq_poly, alpha) -> None:
    """No other root may lie on or inside the circle ``|z| = alpha``."""
    a = float(alpha)
    for r, _ in den.numer().complex_roots():
        z = complex(float(r.real.mid()), float(r.imag.mid()))
        if abs(z - a) < 1e-9 * a:
            continue
        if abs(z) <= a * (1 + 1e-9):
            raise GrowthIndeterminate(f"root {z:.10g} shares the dominant modulus")


# ---------------------------------------------------------------- coefficient dumps


def bfile(series: Series, offset: int = 0) -> str:
    """``n a(n)`` lines with the non-graded variable set to 1."""
    lines = []
    for t, v in enumerate(series.collapsed()):
        if isinstance(v, RatC):
            raise ValueError("coefficient dumps need rational coefficients")
        v = Fraction(v)
        lines.append(f"{t + offset} {v.numerator if v.denominator == 1 else v}")
    return "\n".join(lines) + "\n"
