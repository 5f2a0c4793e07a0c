"""Frame extension: start frames, extensions, the trapped filter and trimming.

The hot loops work on raw nested tuples ``segments -> paths -> (col, row)``
rather than :class:`Frame` objects, so the automaton builder can run them on
millions of frames without paying for validation.  The public functions wrap
and unwrap frames.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Literal

from .frames import Frame, Path, Point, Segment

Raw = tuple[Segment, ...]
Mode = Literal["strip", "greek_key"]


@dataclass(frozen=True, slots=True)
class ExtendedFrame:
    frame: Frame
    added_edges: tuple[tuple[Point, Point], ...]
    merges: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class Transition:
    target: Frame
    new_edge_count: int
    ordered_mid_edges: tuple[tuple[Point, Point], ...]
    ordered_right_edges: tuple[tuple[Point, Point], ...]
    extended: ExtendedFrame


# ---------------------------------------------------------------- helpers


def _column_run(c: int, a: int, b: int) -> Path:
    step = 1 if b >= a else -1
    return tuple((c, r) for r in range(a, b + step, step))


def _reach(used: int, r: int, h: int) -> list[tuple[int, int]]:
    """Other endpoints ``b`` of free vertical runs through free row ``r``, with their masks."""
    m = 1 << r
    out = [(r, m)]
    b = r + 1
    while b < h and not (used >> b) & 1:
        m |= 1 << b
        out.append((b, m))
        b += 1
    m = 1 << r
    b = r - 1
    while b >= 0 and not (used >> b) & 1:
        m |= 1 << b
        out.append((b, m))
        b -= 1
    return out


def _span_mask(a: int, b: int) -> int:
    lo, hi = (a, b) if a <= b else (b, a)
    return ((1 << (hi - lo + 1)) - 1) << lo


def edge_count_raw(segs: Raw) -> int:
    return sum(len(p) - 1 for seg in segs for p in seg)


def _is_single(seg: Segment) -> bool:
    return len(seg) == 1 and len(seg[0]) == 1


def trapped_raw(
    segs: Raw, width: int, height: int, p: Point, *, left_wall: bool = False, right_occupied: bool = False
) -> bool:
    """Trapped test on raw segments; neighbours left of column 0 count as
    occupied when ``left_wall`` and are never consulted otherwise."""
    c, r = p
    occ = {q for seg in segs for path in seg for q in path}
    for q in ((c - 1, r), (c + 1, r), (c, r - 1), (c, r + 1)):
        qc, qr = q
        if qr < 0 or qr >= height:
            continue
        if qc < 0:
            if left_wall:
                continue
            raise ValueError(f"left neighbour of {p} is outside the window")
        if qc >= width:
            if right_occupied:
                continue
            raise ValueError(f"right neighbour of {p} is outside the window")
        if q not in occ:
            return False
    return True


# ---------------------------------------------------------------- extension


def extend_raw(segs: Raw, width: int, height: int, *, full_column: bool = False) -> Iterator[tuple[Raw, tuple[int, ...]]]:
    """All extensions of a width-``width`` frame into a new column ``width``.

    Yields ``(extended_segments, merged_indices)``.  ``full_column`` keeps
    only extensions that use every vertex of the new column.
    """
    c = width
    m = len(segs)
    if m == 0:
        return
    for i, seg in enumerate(segs):
        if i > 0 and seg[0][0][0] != c - 1:
            return
        if i < m - 1 and seg[-1][-1][0] != c - 1:
            return
    last_single = m > 1 and _is_single(segs[-1])
    full = (1 << height) - 1

    def finish(out: list, used: int, last_adv: bool, merges: tuple) -> Iterator:
        n = len(out)

        def slot(k: int, used: int, acc: list) -> Iterator:
            if k + 1 < n:
                yield from slot(k + 1, used, acc + [out[k + 1]])
            else:
                yield acc, used
            if k == n - 1 and not last_adv:
                return
            for a in range(height):
                if (used >> a) & 1:
                    continue
                for b, mask in _reach(used, a, height):
                    if a == b:
                        if k == n - 1:
                            yield acc + [(((c, a),),)], used | mask
                    else:
                        yield from slot(k, used | mask, acc + [(_column_run(c, a, b),)])

        for res, u in slot(0, used, [out[0]]):
            if u == 0:
                continue
            if full_column and u != full:
                continue
            yield tuple(res), merges

    def rec(i: int, used: int, done: list, prefix: list, head: Path, merges: tuple) -> Iterator:
        seg = segs[i]
        paths = prefix + [head + seg[0]] + list(seg[1:])
        e = paths[-1][-1]
        re = e[1]
        if i < m - 1:
            if (used >> re) & 1:
                return
            rs = segs[i + 1][0][0][1]
            span = _span_mask(re, rs)
            if not used & span:
                yield from rec(i + 1, used | span, done, paths[:-1], paths[-1] + _column_run(c, re, rs), merges + (i,))
            for b, mask in _reach(used, re, height):
                u1 = used | mask
                closed = tuple(paths[:-1]) + (paths[-1] + _column_run(c, re, b),)
                if (u1 >> rs) & 1:
                    continue
                for a, mask2 in _reach(u1, rs, height):
                    yield from rec(i + 1, u1 | mask2, done + [closed], [], _column_run(c, a, rs), merges)
            return
        yield from finish(done + [tuple(paths)], used, False, merges)
        if not last_single and e[0] == c - 1 and not (used >> re) & 1:
            for b, mask in _reach(used, re, height):
                adv = tuple(paths[:-1]) + (paths[-1] + _column_run(c, re, b),)
                yield from finish(done + [adv], used | mask, True, merges)

    yield from rec(0, 0, [], [], (), ())


def trapped_filter_raw(segs: Raw, width: int, height: int) -> bool:
    """Keep-test for an extended frame of the given width."""
    last = segs[-1]
    p = last[-1][-1]
    single = _is_single(last)
    if p[0] == width - 1 and not single:
        return True
    if p[0] == 0:
        # already verified when it was interior, or an artefact of trimming
        return True
    return trapped_raw(segs, width, height, p, right_occupied=single and p[0] == width - 1)


def trim_raw(segs: Raw) -> Raw:
    out = []
    for seg in segs:
        paths = []
        for path in seg:
            run: list[Point] = []
            for col, row in path:
                if col == 0:
                    if run:
                        paths.append(tuple(run))
                        run = []
                else:
                    run.append((col - 1, row))
            if run:
                paths.append(tuple(run))
        assert paths, "trimming removed an entire segment"
        out.append(tuple(paths))
    return tuple(out)


def neighbors_raw(
    segs: Raw, width: int, height: int, *, full_column: bool = False
) -> Iterator[tuple[Raw, int, Raw]]:
    """Yield ``(target, new_edge_count, extended)`` for every surviving extension."""
    base = edge_count_raw(segs)
    for ext, _ in extend_raw(segs, width, height, full_column=full_column):
        if trapped_filter_raw(ext, width + 1, height):
            yield trim_raw(ext), edge_count_raw(ext) - base, ext


def accepting_raw(segs: Raw, width: int, mode: Mode = "strip") -> bool:
    if len(segs) != 1:
        return False
    if mode == "greek_key":
        return True
    return segs[0][-1][-1][0] != width - 1


# ---------------------------------------------------------------- start frames


def _start_frames_w2(h: int) -> list[Raw]:
    top = (0, h - 1)
    out: list[Raw] = []

    def in_window(p: Point) -> bool:
        return 0 <= p[0] < 2 and 0 <= p[1] < h

    def grow(path: list[Point], used: set, done: list[Raw], first: bool) -> None:
        end = path[-1]
        if len(path) >= 2 or not first:
            close(tuple(path), used, done, first)
        c, r = end
        for q in ((c - 1, r), (c + 1, r), (c, r - 1), (c, r + 1)):
            if in_window(q) and q not in used:
                used.add(q)
                path.append(q)
                grow(path, used, done, first)
                path.pop()
                used.discard(q)

    def close(path: Path, used: set, done: list, first: bool) -> None:
        segs = tuple(done) + ((path,),)
        end = path[-1]
        if len(path) == 1:
            if trapped_raw(segs, 2, h, end, right_occupied=True):
                out.append(segs)
            return
        if end[0] == 0:
            if trapped_raw(segs, 2, h, end, left_wall=True):
                out.append(segs)
            return
        out.append(segs)
        for r in range(h):
            s = (1, r)
            if s not in used:
                used.add(s)
                grow([s], used, list(segs), False)
                used.discard(s)

    if h >= 1:
        grow([top], {top}, [], True)
    return out


def start_frames_raw(h: int, width: int = 2, mode: Mode = "strip") -> list[tuple[Raw, int]]:
    """Start frames with their displacement (the rightmost column reached).

    Width 4 frames come from two extension rounds applied to width-2 start
    frames.  Walks that finish before reaching column 3 are padded with empty
    columns and carry their true displacement.
    """
    if h < 2:
        # a walk on a single row never traps its end
        return []
    if width == 2:
        frames = _start_frames_w2(h)
        if mode == "greek_key":
            frames = [s for s in frames if sum(len(p) for seg in s for p in seg) == 2 * h]
        return sorted(((s, 1) for s in frames), key=lambda t: _sort_key(t[0]))
    if width != 4 or mode != "strip":
        raise ValueError("start frames exist for width 2, or width 4 in strip mode")
    result: dict[Raw, int] = {}
    layer = _start_frames_w2(h)
    for s in layer:
        if accepting_raw(s, 2):
            result[s] = 1
    for w in (2, 3):
        nxt = []
        for s in layer:
            for ext, _ in extend_raw(s, w, h):
                if trapped_filter_raw(ext, w + 1, h):
                    nxt.append(ext)
        layer = list(dict.fromkeys(nxt))
        if w == 2:
            for s in layer:
                if accepting_raw(s, 3):
                    result[s] = 2
    for s in layer:
        result[s] = 3
    return sorted(result.items(), key=lambda t: _sort_key(t[0]))


def _sort_key(segs: Raw) -> tuple:
    return (len(segs), segs)


# ---------------------------------------------------------------- frame-level API


def _raw(f: Frame) -> Raw:
    return f.segments


def start_frames(h: int, width: int = 2, mode: Mode = "strip") -> list[Frame]:
    return [Frame(width, h, s) for s, _ in start_frames_raw(h, width, mode)]


def extend(f: Frame) -> list[ExtendedFrame]:
    return _wrap_extensions(f, full_column=False)


def greek_key_extend(f: Frame) -> list[ExtendedFrame]:
    return _wrap_extensions(f, full_column=True)


def _wrap_extensions(f: Frame, full_column: bool) -> list[ExtendedFrame]:
    old = set(f.edges())
    out = []
    for ext, merges in extend_raw(f.segments, f.width, f.height, full_column=full_column):
        fr = Frame(f.width + 1, f.height, ext)
        added = tuple(e for e in fr.edges() if e not in old)
        out.append(ExtendedFrame(fr, added, merges))
    return out


def trapped_filter(exts: list[ExtendedFrame]) -> list[ExtendedFrame]:
    return [e for e in exts if trapped_filter_raw(e.frame.segments, e.frame.width, e.frame.height)]


def trim(e: ExtendedFrame) -> Transition:
    fr = e.frame
    target = Frame(fr.width - 1, fr.height, trim_raw(fr.segments))
    mid = fr.width // 2
    edges = tuple(fr.edges())
    return Transition(
        target=target,
        new_edge_count=len(e.added_edges),
        ordered_mid_edges=tuple(x for x in edges if x[0][0] == mid),
        ordered_right_edges=tuple(x for x in edges if x[0][0] == fr.width - 1),
        extended=e,
    )


def neighbors(f: Frame, mode: Mode = "strip") -> list[Transition]:
    exts = greek_key_extend(f) if mode == "greek_key" else extend(f)
    seen = {}
    for e in trapped_filter(exts):
        t = trim(e)
        seen.setdefault((t.target.key, t.new_edge_count, t.ordered_mid_edges, e.frame.key), t)
    return [seen[k] for k in sorted(seen)]


def accepting(f: Frame, mode: Mode = "strip") -> bool:
    return accepting_raw(f.segments, f.width, mode)
