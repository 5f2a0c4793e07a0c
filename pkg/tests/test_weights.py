from __future__ import annotations

from fractions import Fraction

import flint
import pytest

from gsaw.algebra import series_transfer
from gsaw.extension import neighbors, start_frames
from gsaw.frames import Frame
from gsaw.weights import (
    EdgeWeight,
    RatC,
    energetic_factor,
    energetic_weight,
    greek_key_weight,
    plain_weight,
    scalar_from_json,
    scalar_to_json,
    uniform_factor,
    uniform_weight,
)

from .conftest import built

C = RatC.gen()
TWO_EDGES = Frame(2, 5, ((((0, 4), (1, 4)),), (((1, 0), (1, 1)),)))


def test_ratc_field_operations():
    a = C / (2 * C + 1)
    assert a * (2 * C + 1) == C
    assert a - a == 0
    assert (C**2 + C) / C == C + 1
    assert (C ** -2) * C**2 == 1
    assert a(1) == Fraction(1, 3)
    with pytest.raises(ZeroDivisionError):
        (1 / (C - 1))(1)


def test_ratc_denominator_is_monic():
    r = RatC(flint.fmpq_poly([1]), flint.fmpq_poly([2, 4]))
    assert r.den.coeffs()[-1] == 1


def test_scalar_json_round_trip():
    for v in (Fraction(-3, 7), C / (4 * (C + 1)), RatC(5)):
        assert scalar_from_json(scalar_to_json(v)) == v


def test_energy_ratio_of_a_two_neighbour_candidate():
    # candidate levels 2, 2, 1; the first is chosen
    assert energetic_factor([(0, (2, 2, 1))]) == C / (2 * C + 1)


def test_uniform_factor_is_product_of_reciprocals():
    recs = [(0, (0, 0)), (1, (0, 0)), (0, (0, 0, 0)), (0, (0,))]
    assert uniform_factor(recs) == Fraction(1, 12)


def test_plain_and_greek_key_weights():
    for t in neighbors(TWO_EDGES):
        w = plain_weight(t)
        assert w == EdgeWeight(Fraction(1), t.new_edge_count, 1)
        assert greek_key_weight(t) == EdgeWeight(Fraction(1), 0, 1)


def test_probability_weights_are_proper():
    for t in neighbors(TWO_EDGES):
        assert 0 < uniform_weight(t).coeff <= 1
        with pytest.raises(ValueError, match="width-4"):
            energetic_weight(t)
    for f in start_frames(3, width=4):
        for t in neighbors(f):
            c = energetic_weight(t).coeff
            assert 0 < c(1) <= 1 and 0 < c(3) <= 1


def test_uniform_first_series_term():
    s = series_transfer(built(2, "uniform"), 1)
    assert s.joint() == {(3, 1): Fraction(1, 8)}


def test_energetic_first_series_term():
    s = series_transfer(built(2, "energetic"), 1)
    assert s.joint() == {(3, 1): C / (4 * (C + 1))}


def test_uniform_edge_coefficients_bounded():
    for _, _, w in built(3, "uniform").edges:
        assert 0 < w.coeff <= 1


def test_energetic_reduces_to_uniform_on_series():
    e = series_transfer(built(3, "energetic"), 5)
    u = series_transfer(built(3, "uniform"), 5)
    assert {k: v(1) for k, v in e.joint().items()} == u.joint()
