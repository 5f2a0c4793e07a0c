from __future__ import annotations

import itertools

import pytest

from gsaw.extension import start_frames
from gsaw.frames import (
    Frame,
    FrameError,
    canonical_decode,
    canonical_encode,
    is_trapped,
    neighbors_in_strip,
    occupied_set,
    render,
)

TWO_EDGES = Frame(2, 5, ((((0, 4), (1, 4)),), (((1, 0), (1, 1)),)))


def test_encoding_round_trip():
    for f in start_frames(3):
        assert canonical_decode(canonical_encode(f)) == f


def test_height_two_start_encodings_distinct():
    keys = {canonical_encode(f) for f in start_frames(2)}
    assert len(keys) == 7


def test_occupied_points_of_two_single_edge_segments():
    assert occupied_set(TWO_EDGES) == {(0, 4), (1, 4), (1, 0), (1, 1)}
    assert TWO_EDGES.edge_count() == 2


@pytest.mark.parametrize(
    "segments, message",
    [
        (((((0, 0), (1, 1)),),), "non-adjacent"),
        (((((0, 0), (2, 0)),),), "outside"),
        (((((0, 0), (1, 0)),), (((1, 0),),)), "disjoint"),
        ((((),),), "empty path"),
        (((),), "empty segment"),
    ],
)
def test_invalid_frames_rejected(segments, message):
    with pytest.raises(FrameError, match=message):
        Frame(2, 2, segments)


def test_equal_frames_share_hash():
    a = Frame(2, 2, ((((0, 1), (1, 1)),),))
    b = Frame(2, 2, ((((0, 1), (1, 1)),),))
    assert a == b and hash(a) == hash(b)
    assert a != Frame(2, 2, ((((1, 1), (0, 1)),),))


def test_trapped_needs_visible_neighbours():
    f = Frame(2, 2, ((((0, 1), (0, 0), (1, 0)),),))
    with pytest.raises(FrameError):
        is_trapped(f, (1, 0))
    with pytest.raises(FrameError):
        is_trapped(f, (1, 1))


def _brute_trapped(occ, p, h, width):
    c, r = p
    for q in ((c - 1, r), (c + 1, r), (c, r - 1), (c, r + 1)):
        if 0 <= q[1] < h and 0 <= q[0] < width and q not in occ:
            return False
    return True


def test_trapped_matches_neighbour_scan_on_all_patterns():
    # every occupancy pattern of a 3-column, 2-row window; the middle column
    # has all neighbours inside the window
    cells = [(c, r) for c in range(3) for r in range(2)]
    for bits in itertools.product((0, 1), repeat=len(cells)):
        occ = {p for p, b in zip(cells, bits) if b}
        for p in ((1, 0), (1, 1)):
            if p not in occ:
                continue
            f = Frame(3, 2, tuple(((q,),) for q in sorted(occ)))
            assert is_trapped(f, p) == _brute_trapped(occ, p, 2, 3)


def test_strip_neighbours():
    assert sorted(neighbors_in_strip((0, 0), 2)) == [(0, 1), (1, 0)]
    assert sorted(neighbors_in_strip((3, 1), 3)) == [(2, 1), (3, 0), (3, 2), (4, 1)]


def test_render_shows_segment_indices():
    text = render(TWO_EDGES)
    rows = text.splitlines()
    assert rows[0] == "00"
    assert rows[4] == ".1"
