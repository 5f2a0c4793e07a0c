"""Brute-force ground truth by depth-first search.

Deliberately simple: walks are grown one step at a time from ``(0, h - 1)``
and recorded when trapped.  Bounding the displacement makes the search finite
and makes every recorded (length, displacement) cell complete.
"""

from __future__ import annotations

import sys
from collections import defaultdict
from fractions import Fraction

from .weights import RatC

MAX_HEIGHT = 6
MAX_DISPLACEMENT = 8
MAX_TOUR_CELLS = 42


class OracleGuardError(ValueError):
    pass


def _neighbours(p, h):
    c, r = p
    if c > 0:
        yield (c - 1, r)
    yield (c + 1, r)
    if r > 0:
        yield (c, r - 1)
    if r < h - 1:
        yield (c, r + 1)


def enumerate_gsaws(h: int, max_displacement: int, model: str = "plain") -> dict[tuple[int, int], object]:
    """Map (length, displacement) to a count (plain) or a probability mass.

    Masses are Fractions for the uniform model and elements of Q(C) for the
    energetic model.  Only walks with displacement <= ``max_displacement`` are
    recorded, and every such walk is recorded.
    """
    if not (1 <= h <= MAX_HEIGHT) or not (0 <= max_displacement <= MAX_DISPLACEMENT):
        raise OracleGuardError(f"oracle limited to h <= {MAX_HEIGHT}, displacement <= {MAX_DISPLACEMENT}")
    if model not in ("plain", "uniform", "energetic"):
        raise OracleGuardError(f"oracle does not support model {model!r}")
    table: dict = defaultdict(lambda: 0 if model == "plain" else (Fraction(0) if model == "uniform" else RatC(0)))
    one = 1 if model == "plain" else (Fraction(1) if model == "uniform" else RatC(1))
    cgen = RatC.gen() if model == "energetic" else None
    start = (0, h - 1)
    visited = {start}
    sys.setrecursionlimit(max(10000, sys.getrecursionlimit()))

    def step_factors(v):
        free = [q for q in _neighbours(v, h) if q not in visited]
        if model == "plain" or not free:
            return free, [one] * len(free)
        if model == "uniform":
            return free, [Fraction(1, len(free))] * len(free)
        energies = []
        for q in free:
            ell = sum(1 for z in _neighbours(q, h) if z != v and z in visited)
            energies.append(cgen**ell)
        total = sum(energies[1:], energies[0]) if energies else None
        return free, [e / total for e in energies]

    def dfs(v, length, disp, weight):
        free, probs = step_factors(v)
        if not free:
            table[(length, disp)] += weight
            return
        for q, p in zip(free, probs):
            if q[0] > max_displacement:
                continue
            visited.add(q)
            dfs(q, length + 1, max(disp, q[0]), weight * p if model != "plain" else weight)
            visited.discard(q)

    dfs(start, 0, 0, one)
    return dict(sorted(table.items()))


def walk_probability(walk: list[tuple[int, int]], h: int | None = None, model: str = "uniform", c=None):
    """Probability of one walk on a strip (``h`` given) or on the plane (``h`` None)."""
    seen = {walk[0]}
    prob = Fraction(1) if model == "uniform" else RatC(1)
    cgen = RatC.gen() if c is None else c

    def nbrs(p):
        if h is None:
            x, y = p
            return [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)]
        return list(_neighbours(p, h))

    for v, w in zip(walk, walk[1:]):
        free = [q for q in nbrs(v) if q not in seen]
        if w not in free:
            raise ValueError(f"step {v}->{w} is not to a free neighbour")
        if model == "uniform":
            prob *= Fraction(1, len(free))
        else:
            e = {q: cgen ** sum(1 for z in nbrs(q) if z != v and z in seen) for q in free}
            prob = prob * (e[w] / sum(list(e.values())[1:], list(e.values())[0]))
        seen.add(w)
    return prob


def enumerate_tours(k: int, n: int) -> int:
    """Hamiltonian paths of the k-row, n-column grid starting at the upper-left corner."""
    if k < 1 or n < 0 or k * n > MAX_TOUR_CELLS:
        raise OracleGuardError(f"tour oracle limited to k*n <= {MAX_TOUR_CELLS}")
    if n == 0:
        return 1
    total = k * n
    start = (0, k - 1)
    seen = {start}
    count = 0

    def dfs(v, placed):
        nonlocal count
        if placed == total:
            count += 1
            return
        c, r = v
        for q in ((c - 1, r), (c + 1, r), (c, r - 1), (c, r + 1)):
            if 0 <= q[0] < n and 0 <= q[1] < k and q not in seen:
                seen.add(q)
                dfs(q, placed + 1)
                seen.discard(q)

    dfs(start, 1)
    return count
