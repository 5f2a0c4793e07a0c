from __future__ import annotations

from fractions import Fraction

import pytest

from gsaw.algebra import (
    BudgetExceeded,
    RationalGF,
    SingularSystemError,
    gens,
    render_poly,
    series_of,
    series_transfer,
    solve_transfer,
    tour_generating_function,
)
from gsaw.algebra.series import Series
from gsaw.automaton import WeightedAutomaton
from gsaw.weights import EdgeWeight, RatC

from .conftest import built, gf, minimal

x, y, c = gens()


def _toy(edges, final):
    states = [None] + [bytes([i]) for i in range(1, 1 + max(max(s, d) for s, d, _ in edges))]
    return WeightedAutomaton(2, "plain", 2, states, [(s, d, EdgeWeight(Fraction(k), a, b)) for s, d, (k, a, b) in edges], final)


def test_reduced_form_is_canonical():
    a = RationalGF((1 - x * y) * (1 - x**2 * y), (1 - x**2 * y) * (1 + x))
    assert a.den == 1 + x
    assert a.num == 1 - x * y
    assert a == RationalGF(2 - 2 * x * y, 2 + 2 * x)


def test_gcd_of_shared_factor():
    g = ((1 - x * y) * (1 - x**2 * y)).gcd((1 - x**2 * y) * (1 + x))
    assert (1 - x**2 * y) % g == 0 and g % (1 - x**2 * y) == 0


def test_field_operations():
    a = RationalGF(x, 1 - x)
    b = RationalGF(y, 1 + y)
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert a**2 == a * a
    assert a ** -1 == RationalGF(1 - x, x)
    assert a(x=Fraction(1, 2)) == 1


def test_substitution_and_derivative():
    f = RationalGF(x * y, 1 - x * y)
    assert f.subs(y=1) == RationalGF(x, 1 - x)
    assert f.derivative("x") == RationalGF(y, (1 - x * y) ** 2)
    assert f.variables() == ("x", "y")


def test_json_round_trip():
    f = RationalGF(c * x**3 * y, 2 * (c + 1) * (2 - x**2 * y))
    assert RationalGF.from_json(f.to_json()) == f


def test_render_orders_by_degree():
    assert render_poly(1 - x**2 * y + 3 * x) == "1 + 3*x - x^2*y"
    assert render_poly(x - x + 0) == "0"


def test_toy_loop():
    a = _toy([(0, 1, (1, 1, 1)), (1, 1, (1, 1, 1))], {1: Fraction(1)})
    assert solve_transfer(a) == RationalGF(x * y, 1 - x * y)


def test_singular_system():
    a = _toy([(0, 1, (1, 1, 1)), (1, 1, (1, 0, 0))], {1: Fraction(1)})
    with pytest.raises(SingularSystemError):
        solve_transfer(a)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        solve_transfer(minimal(4), budget=1e-9)


def test_height_two_plain():
    want = RationalGF(x**3 * y * (1 - x * y), (1 - x**2 * y) * (1 - x * y - x**2 * y))
    got = gf(2)
    assert got.num * want.den == want.num * got.den
    assert got.subs(y=1) == RationalGF(x**3, (1 + x) * (1 - x - x**2))


def test_height_two_uniform():
    want = RationalGF(x**3 * y * (2 - x * y), (2 - x**2 * y) * (8 - 4 * x * y - 4 * x**2 * y + x**3 * y**2))
    assert gf(2, "uniform") == want


def test_greek_key_three_rows():
    g = tour_generating_function(gf(3, "greek_key"))
    assert g == RationalGF(1 - x - x**2 + 4 * x**3 - x**4, (1 - 2 * x) * (1 - 2 * x**2))


def test_series_of_closed_form():
    s = series_of(gf(2).subs(x=1), 5)
    assert s.collapsed() == [0, 1, 2, 4, 8, 16]
    s = series_of(gf(5, x=1), 4)
    assert s.collapsed() == [0, 11, 172, 2329, 28130]


def test_series_transfer_prefixes():
    s = series_transfer(built(3).specialize(y=1), 8, "x")
    assert s.collapsed()[4:] == [1, 2, 2, 6, 10]
    s = series_transfer(built(4).specialize(x=1), 4, "y")
    assert s.collapsed() == [0, 5, 44, 330, 2231]


@pytest.mark.parametrize("h, model", [(2, "plain"), (3, "plain"), (2, "uniform"), (2, "energetic"), (4, "greek_key")])
def test_closed_form_and_transfer_series_agree(h, model):
    s = series_transfer(minimal(h, model), 6)
    assert series_of(gf(h, model), 6) == s


def test_series_json_and_truncate():
    s = series_transfer(built(2, "energetic"), 4)
    assert Series.from_json(s.to_json()) == s
    assert s.truncate(2).coeffs == s.coeffs[:3]
    assert s.coefficient(1, 3) == RatC.gen() / (4 * (RatC.gen() + 1))


def test_series_of_needs_invertible_constant():
    with pytest.raises(ZeroDivisionError):
        series_of(RationalGF(1, y), 3)
