from __future__ import annotations

import flint
from hypothesis import given, settings
from hypothesis import strategies as st

from gsaw.algebra import RationalGF, gens, series_of
from gsaw.algebra.poly import QCTX, poly_from_json, poly_to_json
from gsaw.frames import Frame, canonical_decode, canonical_encode
from gsaw.sampler import _Sums, stats_from_sums
from gsaw.weights import RatC

x, y, c = gens()

small = st.integers(-4, 4)
monos = st.tuples(st.integers(0, 3), st.integers(0, 2), st.integers(0, 1))


@st.composite
def polys(draw, constant_one=False):
    terms = draw(st.dictionaries(monos, small, max_size=5))
    terms = {m: k for m, k in terms.items() if k}
    if constant_one:
        terms[(0, 0, 0)] = 1
    return QCTX.from_dict(terms) if terms else QCTX.constant(0)


@st.composite
def walks_in_window(draw):
    """A self-avoiding path inside a small window, split into segments."""
    w, h = draw(st.integers(2, 4)), draw(st.integers(2, 4))
    p = (draw(st.integers(0, w - 1)), draw(st.integers(0, h - 1)))
    path, seen = [p], {p}
    for _ in range(draw(st.integers(0, 10))):
        c0, r0 = path[-1]
        nxt = [q for q in ((c0 + 1, r0), (c0 - 1, r0), (c0, r0 + 1), (c0, r0 - 1)) if 0 <= q[0] < w and 0 <= q[1] < h and q not in seen]
        if not nxt:
            break
        q = draw(st.sampled_from(nxt))
        path.append(q)
        seen.add(q)
    cuts = sorted(draw(st.sets(st.integers(1, max(1, len(path) - 1)), max_size=3)))
    pieces, last = [], 0
    for k in cuts + [len(path)]:
        if k > last:
            pieces.append(tuple(path[last:k]))
            last = k
    return Frame(w, h, tuple((p,) for p in pieces))


@given(walks_in_window())
def test_frame_encoding_round_trip(f):
    assert canonical_decode(canonical_encode(f)) == f
    assert canonical_encode(canonical_decode(canonical_encode(f))) == canonical_encode(f)


@given(polys())
def test_poly_json_round_trip(p):
    assert poly_from_json(poly_to_json(p)) == p


@settings(max_examples=60, deadline=None)
@given(polys(), polys(constant_one=True), polys(), polys(constant_one=True))
def test_rational_field_laws(a, b, p, q):
    f, g = RationalGF(a, b), RationalGF(p, q)
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) - g == f
    assert f * (g + 1) == f * g + f
    if not g.is_zero():
        assert (f * g) / g == f


@settings(max_examples=60, deadline=None)
@given(st.lists(small, min_size=1, max_size=5), st.lists(small, min_size=0, max_size=4))
def test_series_times_denominator_gives_numerator(num, tail):
    order = 6
    den = [1] + tail
    f = RationalGF(sum((k * y**i for i, k in enumerate(num)), QCTX.constant(0)), sum((k * y**i for i, k in enumerate(den)), QCTX.constant(0)))
    s = series_of(f, order, "y").collapsed()
    for t in range(order + 1):
        conv = sum(s[t - k] * den[k] for k in range(min(t, len(den) - 1) + 1))
        assert conv == (num[t] if t < len(num) else 0)


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4), st.lists(st.integers(-3, 3), min_size=1, max_size=4))
def test_ratc_inverse(n, d):
    a = RatC(flint.fmpq_poly(n) if any(n) else flint.fmpq_poly([1]), flint.fmpq_poly(d) if any(d) else flint.fmpq_poly([1]))
    if not a.is_zero():
        assert a * (1 / a) == 1
    assert a - a == 0


@given(st.lists(st.tuples(st.integers(1, 500), st.integers(1, 50)), min_size=4, max_size=40), st.integers(1, 3))
def test_sum_merging_is_order_free(samples, split):
    def sums(rows):
        return _Sums(len(rows), sum(a for a, _ in rows), sum(a * a for a, _ in rows), sum(b for _, b in rows), sum(b * b for _, b in rows))

    whole = sums(samples)
    parts = sums(samples[split:]).merge(sums(samples[:split]))
    assert parts == whole
    st1 = stats_from_sums(whole, (0.9,))
    assert st1.var_length >= 0
