"""Frames: width-w windows onto a growing self-avoiding walk on a strip.

A frame is an ordered list of segments; a segment is an ordered list of
directed paths; a path is a sequence of ``(col, row)`` points.  Row 0 is the
bottom of the strip and row ``h - 1`` the top, so walks start at
``(0, h - 1)``.  Segment order and path order follow the order in which the
full walk traverses the pieces visible in the window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

Point = tuple[int, int]
Path = tuple[Point, ...]
Segment = tuple[Path, ...]


class FrameError(ValueError):
    """A frame or a query on a frame violates its contract."""


@dataclass(frozen=True, slots=True)
class Frame:
    width: int
    height: int
    segments: tuple[Segment, ...]
    _key: bytes | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        seen: set[Point] = set()
        count = 0
        for seg in self.segments:
            if not seg:
                raise FrameError("empty segment")
            for path in seg:
                if not path:
                    raise FrameError("empty path")
                prev = None
                for p in path:
                    if not (0 <= p[0] < self.width and 0 <= p[1] < self.height):
                        raise FrameError(f"point {p} outside {self.width}x{self.height} window")
                    if prev is not None and abs(p[0] - prev[0]) + abs(p[1] - prev[1]) != 1:
                        raise FrameError(f"non-adjacent step {prev} -> {p}")
                    prev = p
                seen.update(path)
                count += len(path)
        if len(seen) != count:
            raise FrameError("segments are not vertex-disjoint")

    # equality and hashing go through the canonical key so that frames can be
    # used directly as dictionary keys during automaton construction
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: Frame) -> bool:
        return self.key < other.key

    @property
    def key(self) -> bytes:
        k = self._key
        if k is None:
            k = canonical_encode(self)
            object.__setattr__(self, "_key", k)
        return k

    def start(self, i: int) -> Point:
        return self.segments[i][0][0]

    def end(self, i: int) -> Point:
        return self.segments[i][-1][-1]

    def points(self) -> Iterator[Point]:
        for seg in self.segments:
            for path in seg:
                yield from path

    def edges(self) -> Iterator[tuple[Point, Point]]:
        """Directed edges in traversal order."""
        for seg in self.segments:
            for path in seg:
                for a, b in zip(path, path[1:]):
                    yield a, b

    def edge_count(self) -> int:
        return sum(len(path) - 1 for seg in self.segments for path in seg)

    def __str__(self) -> str:
        return render(self)


def canonical_encode(f: Frame) -> bytes:
    """Length-prefixed byte encoding: width, height, then nested segments/paths/points."""
    return encode_segments(f.width, f.height, f.segments)


def encode_segments(width: int, height: int, segments: tuple[Segment, ...]) -> bytes:
    out = [width, height, len(segments)]
    for seg in segments:
        out.append(len(seg))
        for path in seg:
            out.append(len(path))
            for c, r in path:
                out.append(c)
                out.append(r)
    try:
        return bytes(out)
    except ValueError:
        raise FrameError("frame too large for byte encoding") from None


def canonical_decode(data: bytes) -> Frame:
    width, height, segments = decode_segments(data)
    return Frame(width, height, segments)


def decode_segments(data: bytes) -> tuple[int, int, tuple[Segment, ...]]:
    it = iter(data)
    try:
        width, height, nseg = next(it), next(it), next(it)
        segments = []
        for _ in range(nseg):
            paths = []
            for _ in range(next(it)):
                n = next(it)
                paths.append(tuple((next(it), next(it)) for _ in range(n)))
            segments.append(tuple(paths))
    except StopIteration:
        raise FrameError("truncated frame encoding") from None
    if next(it, None) is not None:
        raise FrameError("trailing bytes in frame encoding")
    return width, height, tuple(segments)


def occupied_set(f: Frame) -> set[Point]:
    return set(f.points())


def neighbors_in_strip(p: Point, height: int) -> Iterator[Point]:
    c, r = p
    if c > 0:
        yield (c - 1, r)
    yield (c + 1, r)
    if r > 0:
        yield (c, r - 1)
    if r < height - 1:
        yield (c, r + 1)


def is_trapped(
    f: Frame,
    p: Point,
    *,
    at_left_wall: bool = False,
    right_occupied: bool = False,
    occupied: set[Point] | None = None,
) -> bool:
    """True iff every strip neighbour of ``p`` is occupied.

    ``at_left_wall`` declares that column 0 of the window is column 0 of the
    strip.  ``right_occupied`` declares that the neighbour to the right of a
    point in the last column is known to be occupied (a single-point segment
    entered from the right).  Any other neighbour outside the window is a
    contract violation.
    """
    occ = occupied if occupied is not None else occupied_set(f)
    if p not in occ:
        raise FrameError(f"{p} is not occupied")
    c, r = p
    if c == 0 and not at_left_wall:
        raise FrameError(f"left neighbour of {p} is outside the window")
    if c == f.width - 1 and not right_occupied:
        raise FrameError(f"right neighbour of {p} is outside the window")
    for q in neighbors_in_strip(p, f.height):
        if q[0] >= f.width:
            continue  # covered by right_occupied
        if q not in occ:
            return False
    return True


def render(f: Frame) -> str:
    """ASCII picture, top row first.  Digits are segment indices, '.' is empty."""
    grid = [["." for _ in range(f.width)] for _ in range(f.height)]
    for i, seg in enumerate(f.segments):
        mark = str(i) if i < 10 else "#"
        for path in seg:
            for c, r in path:
                grid[r][c] = mark
    lines = ["".join(row) for row in reversed(grid)]
    lines.append(
        " | ".join(
            " ; ".join("->".join(f"{c}{r}" for c, r in path) for path in seg) for seg in f.segments
        )
    )
    return "\n".join(lines)
