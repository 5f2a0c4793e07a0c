from __future__ import annotations

import pytest

from gsaw.extension import (
    accepting,
    extend,
    greek_key_extend,
    neighbors,
    start_frames,
    trapped_filter,
    trim,
)
from gsaw.frames import Frame

from .conftest import built

TWO_EDGES = Frame(2, 5, ((((0, 4), (1, 4)),), (((1, 0), (1, 1)),)))


def _walks(h, max_disp):
    """Every GSAW on the height-h strip with displacement <= max_disp, as vertex lists."""
    start = (0, h - 1)
    path, seen, out = [start], {start}, []

    def free(v):
        c, r = v
        return [q for q in ((c - 1, r), (c + 1, r), (c, r - 1), (c, r + 1)) if q[0] >= 0 and 0 <= q[1] < h and q not in seen]

    def rec():
        nxt = free(path[-1])
        if not nxt:
            out.append(list(path))
        for q in nxt:
            if q[0] > max_disp:
                continue
            seen.add(q)
            path.append(q)
            rec()
            path.pop()
            seen.discard(q)

    rec()
    return out


def _first_frame(walk, h):
    runs, cur = [], []
    for p in walk:
        if p[0] < 2:
            cur.append(p)
        elif cur:
            runs.append(tuple(cur))
            cur = []
    if cur:
        runs.append(tuple(cur))
    # nothing lies left of column 0, so every run is its own segment
    return Frame(2, h, tuple((r,) for r in runs))


@pytest.mark.parametrize("h", [2, 3])
def test_start_frames_match_cut_walks(h):
    cut = {_first_frame(w, h) for w in _walks(h, 5)}
    assert set(start_frames(h)) == cut


def test_cut_walks_are_start_frames_h4():
    # some height-4 first frames only occur in walks wider than this bound
    cut = {_first_frame(w, 4) for w in _walks(4, 4)}
    assert cut <= set(start_frames(4))


def test_start_frame_counts():
    assert len(start_frames(2)) == 7
    assert start_frames(1) == []


def test_extensions_of_two_single_edge_segments():
    exts = extend(TWO_EDGES)
    assert len(exts) == 35
    kept = trapped_filter(exts)
    assert len(kept) == 10
    assert len(neighbors(TWO_EDGES)) == 10


def test_filtered_extensions_end_trapped_or_open_right():
    for e in trapped_filter(extend(TWO_EDGES)):
        f = e.frame
        end = f.segments[-1][-1][-1]
        assert end[0] == 2 or end[0] == 1


def test_trim_drops_left_column_edges():
    for e in trapped_filter(extend(TWO_EDGES)):
        t = trim(e)
        left = sum(1 for a, b in e.frame.edges() if a[0] == 0 or b[0] == 0)
        assert t.target.edge_count() == e.frame.edge_count() - left
        assert t.new_edge_count == e.frame.edge_count() - TWO_EDGES.edge_count()
        assert t.target.width == 2


def test_trimming_never_drops_a_segment():
    for f in start_frames(3):
        for t in neighbors(f):
            assert len(t.target.segments) <= len(t.extended.frame.segments)


def test_height_two_accepting_frames():
    a = built(2)
    assert len(a.final) == 2
    for i in a.final:
        assert accepting(a.frame(i))


def test_accepting_requires_single_segment():
    assert not accepting(TWO_EDGES)
    assert accepting(TWO_EDGES, "greek_key") is False


def test_greek_key_extensions_fill_the_new_column():
    f = start_frames(3, mode="greek_key")[0]
    for e in greek_key_extend(f):
        cols = {p for p in e.frame.points() if p[0] == 2}
        assert len(cols) == 3


def test_greek_key_start_frames_are_full():
    for f in start_frames(4, mode="greek_key"):
        assert len(set(f.points())) == 8
