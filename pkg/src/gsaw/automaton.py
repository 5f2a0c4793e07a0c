"""Weighted automata whose accepted walks are GSAWs, with minimization and JSON I/O."""

from __future__ import annotations

import heapq
import json
import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

from .extension import accepting_raw, edge_count_raw, neighbors_raw, start_frames_raw
from .frames import Frame, canonical_decode, decode_segments, encode_segments
from .weights import (
    MODELS,
    EdgeWeight,
    RatC,
    Scalar,
    accept_coeff,
    scalar_from_json,
    scalar_to_json,
    start_coeff,
    transition_coeff,
)

log = logging.getLogger(__name__)

DEFAULT_CAP = 5_000_000
FORMAT_VERSION = 1


class BuildLimitError(RuntimeError):
    """The frontier grew past the configured state cap."""

    def __init__(self, message: str, states: int, edges: int):
        super().__init__(message)
        self.states = states
        self.edges = edges


class AutomatonFormatError(ValueError):
    pass


@dataclass
class WeightedAutomaton:
    """State 0 is the synthetic start.  Other states carry a frame encoding.

    ``final`` maps accepting states to their final weight, which is 1 for
    freshly built automata and may become any scalar after minimization.
    """

    height: int
    model: str
    width: int
    states: list[bytes | None]
    edges: list[tuple[int, int, EdgeWeight]]
    final: dict[int, Scalar]
    minimized: bool = False
    stats: dict = field(default_factory=dict)

    @property
    def accepting(self) -> list[int]:
        return sorted(self.final)

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def frame(self, i: int) -> Frame | None:
        enc = self.states[i]
        return None if enc is None else canonical_decode(enc)

    def out_edges(self) -> list[list[tuple[int, EdgeWeight]]]:
        out: list[list[tuple[int, EdgeWeight]]] = [[] for _ in self.states]
        for s, d, w in self.edges:
            out[s].append((d, w))
        return out

    def specialize(self, x: int | None = None, y: int | None = None) -> WeightedAutomaton:
        """Drop the x or y exponent (substituting 1 for that variable)."""
        edges = [(s, d, EdgeWeight(w.coeff, 0 if x == 1 else w.x, 0 if y == 1 else w.y)) for s, d, w in self.edges]
        return WeightedAutomaton(self.height, self.model, self.width, self.states, edges, dict(self.final), self.minimized, dict(self.stats))


def _mode(model: str) -> str:
    return "greek_key" if model == "greek_key" else "strip"


def build(
    h: int,
    model: str = "plain",
    *,
    cap: int = DEFAULT_CAP,
    max_depth: int | None = None,
    max_x: int | None = None,
    count_only: bool = False,
    progress: Callable[[int, int], None] | None = None,
) -> WeightedAutomaton:
    """Breadth-first closure of the start frames under the neighbour relation.

    ``max_depth`` stops expanding states whose displacement distance from the
    start reaches it; ``max_x`` does the same for the least length, found by
    a shortest-path search.  Either truncation keeps every walk whose
    displacement (respectively length) is within the bound, so the series of
    the truncated automaton agrees with the full one up to that order.

    ``count_only`` keeps state encodings but only counts edges; this is what
    the largest state-count checks use.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    if h < 1:
        raise ValueError("height must be at least 1")
    width = 4 if model == "energetic" else 2
    mode = _mode(model)
    full_column = model == "greek_key"
    greek = model == "greek_key"

    index: dict[bytes, int] = {}
    states: list[bytes | None] = [None]
    edges: list[tuple[int, int, EdgeWeight]] = []
    final: dict[int, Scalar] = {}
    edge_total = 0
    accept_cache: dict[int, Scalar] = {}

    def intern(segs) -> tuple[int, bool]:
        key = encode_segments(width, h, segs)
        i = index.get(key)
        if i is not None:
            return i, False
        i = len(states)
        if i > cap:
            raise BuildLimitError(f"state cap {cap} exceeded", len(states), edge_total)
        index[key] = i
        states.append(key)
        if accepting_raw(segs, width, mode):
            final[i] = Fraction(1)
        return i, True

    def acc_factor(i: int, segs) -> Scalar:
        f = accept_cache.get(i)
        if f is None:
            f = accept_coeff(model, segs, width, h)
            accept_cache[i] = f
        return f

    # An untruncated build only needs reachability, so a FIFO suffices.
    # Truncation needs true shortest distances (start frames begin at
    # different displacements), kept in a heap.  Both hold state numbers only.
    use_heap = max_x is not None or max_depth is not None
    bound = max_x if max_x is not None else max_depth
    heap: list = []
    fifo: deque = deque()
    best: dict[int, int] = {}

    starts = start_frames_raw(h, width, mode)
    for segs, disp in starts:
        i, fresh = intern(segs)
        n = edge_count_raw(segs)
        prio = n if max_x is not None else disp
        if use_heap and prio > bound:
            continue
        coeff = start_coeff(model, segs, width, h)
        if i in final:
            coeff = coeff * acc_factor(i, segs)
        # Greek key walks are graded by columns covered rather than displacement
        w = EdgeWeight(coeff, 0 if greek else n, disp + 1 if greek else disp)
        edge_total += 1
        if not count_only:
            edges.append((0, i, w))
        if use_heap:
            if prio < best.get(i, 1 << 60):
                best[i] = prio
                heapq.heappush(heap, (prio, i))
        elif fresh:
            fifo.append((prio, i))

    done: set[int] = set()
    expanded = 0
    while fifo or heap:
        if use_heap:
            prio, src = heapq.heappop(heap)
            if src in done or best.get(src) != prio:
                continue
            done.add(src)
            if prio >= bound:
                continue
            segs = decode_segments(states[src])[2]
        else:
            prio, src = fifo.popleft()
            segs = decode_segments(states[src])[2]
        expanded += 1
        for tgt, n, ext in neighbors_raw(segs, width, h, full_column=full_column):
            step = n if max_x is not None else 1
            if use_heap and prio + step > bound:
                continue
            j, fresh = intern(tgt)
            edge_total += 1
            if not count_only:
                coeff = transition_coeff(model, ext, width, h)
                if j in final:
                    coeff = coeff * acc_factor(j, tgt)
                edges.append((src, j, EdgeWeight(coeff, 0 if greek else n, 1)))
            if use_heap:
                if prio + step < best.get(j, 1 << 60):
                    best[j] = prio + step
                    heapq.heappush(heap, (prio + step, j))
            elif fresh:
                fifo.append((prio + 1, j))
        if progress is not None and expanded % 10000 == 0:
            progress(len(states), edge_total)

    a = WeightedAutomaton(h, model, width, states, edges, final)
    a.stats = {
        "states": len(states),
        "edges": edge_total,
        "truncated": max_depth is not None or max_x is not None,
        "max_depth": max_depth,
        "max_x": max_x,
    }
    if not final:
        log.warning("automaton for height %d has no accepting states", h)
    return a


# ---------------------------------------------------------------- minimization


def stream_series(h: int, model: str, order: int, grade: str = "y") -> list[dict[int, Scalar]]:
    """Truncated series computed while exploring, without storing the automaton.

    Returns ``coeffs[t][e]``: the weight of accepted walks with grade exponent
    ``t`` and exponent ``e`` of the other variable.  Each (frame, exponent)
    pair is expanded once, and only frames within the bound are ever visited,
    so memory is bounded by the frames on the live layers.  The weights are
    those of :func:`build`; this is the route for heights whose truncated
    automaton is too large to hold.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    if grade not in ("x", "y"):
        raise ValueError("grade must be x or y")
    if order < 0:
        raise ValueError("series order must be nonnegative")
    if grade == "x" and model == "greek_key":
        raise ValueError("Greek key weights carry no power of x")
    width = 4 if model == "energetic" else 2
    mode = _mode(model)
    greek = model == "greek_key"
    unit = model in ("plain", "greek_key")  # every coefficient is 1; use ints
    one: Scalar = 1 if unit else RatC(1) if model == "energetic" else Fraction(1)
    # layers[t]: frame encoding -> [accepting, {other exponent: weight}]
    layers: list[dict[bytes, list]] = [dict() for _ in range(order + 1)]
    out: list[dict[int, Scalar]] = [dict() for _ in range(order + 1)]

    def target(segs) -> tuple[bytes, bool, Scalar]:
        acc = accepting_raw(segs, width, mode)
        coeff = accept_coeff(model, segs, width, h) if acc and not unit else one
        return encode_segments(width, h, segs), acc, coeff

    def push(t: int, key: bytes, acc: bool, e: int, coeff: Scalar) -> None:
        slot = layers[t].get(key)
        if slot is None:
            layers[t][key] = [acc, {e: coeff}]
        else:
            slot[1][e] = slot[1].get(e, 0) + coeff

    for segs, disp in start_frames_raw(h, width, mode):
        n = edge_count_raw(segs)
        yexp = disp + 1 if greek else disp
        xexp = 0 if greek else n
        t, e = (yexp, xexp) if grade == "y" else (xexp, yexp)
        if t <= order:
            key, acc, coeff = target(segs)
            push(t, key, acc, e, coeff if unit else coeff * start_coeff(model, segs, width, h))

    # neighbour lists of the previous layer; a frame often recurs one layer on
    prev: dict[bytes, list] = {}
    for t in range(order + 1):
        layer, layers[t] = layers[t], {}
        cur: dict[bytes, list] = {}
        for key, (acc, poly) in layer.items():
            if acc:
                for e, v in poly.items():
                    out[t][e] = out[t].get(e, 0) + v
            if t == order:
                continue  # every step raises the grade by at least one
            nbrs = prev.get(key)
            if nbrs is None:
                nbrs = []
                for tgt, n, ext in neighbors_raw(decode_segments(key)[2], width, h, full_column=greek):
                    step, other = (1, 0 if greek else n) if grade == "y" else (n, 1)
                    if t + step > order:
                        continue
                    if t + step == order and not accepting_raw(tgt, width, mode):
                        continue  # would land on the last layer without contributing
                    tkey, tacc, coeff = target(tgt)
                    if not unit:
                        coeff = coeff * transition_coeff(model, ext, width, h)
                    nbrs.append((tkey, tacc, step, other, coeff))
            cur[key] = nbrs
            for tkey, tacc, step, other, coeff in nbrs:
                if t + step > order or (t + step == order and not tacc):
                    continue
                for e, v in poly.items():
                    push(t + step, tkey, tacc, e + other, v if unit else v * coeff)
        prev = cur
    if unit:
        return [{e: Fraction(v) for e, v in d.items()} for d in out]
    return out


def _sig_add(acc: dict, key, coeff) -> None:
    v = acc.get(key)
    acc[key] = coeff if v is None else v + coeff


def _signature(acc: dict) -> tuple:
    return tuple(sorted(((k, c) for k, c in acc.items() if c != 0), key=lambda kc: kc[0]))


def _refine(n: int, seed: list, adj: list[list[tuple[int, EdgeWeight]]]) -> list[int]:
    """Coarsest partition refining ``seed`` in which states of a block carry equal
    summed weights, per (target block, x, y), along ``adj``."""
    block = list(seed)
    count = len(set(block))
    while True:
        keys: dict = {}
        new = [0] * n
        for s in range(n):
            acc: dict = {}
            for d, w in adj[s]:
                _sig_add(acc, (block[d], w.x, w.y), w.coeff)
            new[s] = keys.setdefault((block[s], _signature(acc)), len(keys))
        block = new
        if len(keys) == count:
            return block
        count = len(keys)


def _quotient_forward(a: WeightedAutomaton, block: list[int]) -> WeightedAutomaton:
    nb = max(block) + 1
    rep = [-1] * nb
    for s, b in enumerate(block):
        if rep[b] < 0:
            rep[b] = s
    order = sorted(range(nb), key=lambda b: rep[b])
    renum = {b: k for k, b in enumerate(order)}
    out = a.out_edges()
    edges = []
    for b in order:
        acc: dict = {}
        for d, w in out[rep[b]]:
            _sig_add(acc, (renum[block[d]], w.x, w.y), w.coeff)
        for (d, x, y), c in sorted(acc.items(), key=lambda kc: kc[0]):
            if c != 0:
                edges.append((renum[b], d, EdgeWeight(c, x, y)))
    final = {renum[block[s]]: f for s, f in a.final.items()}
    states = [a.states[rep[b]] for b in order]
    return WeightedAutomaton(a.height, a.model, a.width, states, edges, final, True, dict(a.stats))


def _quotient_backward(a: WeightedAutomaton, block: list[int]) -> WeightedAutomaton:
    nb = max(block) + 1
    rep = [-1] * nb
    for s, b in enumerate(block):
        if rep[b] < 0:
            rep[b] = s
    order = sorted(range(nb), key=lambda b: rep[b])
    renum = {b: k for k, b in enumerate(order)}
    inc: list[list] = [[] for _ in a.states]
    for s, d, w in a.edges:
        inc[d].append((s, w))
    acc: dict = {}
    for b in order:
        for s, w in inc[rep[b]]:
            _sig_add(acc, (renum[block[s]], renum[b], w.x, w.y), w.coeff)
    edges = [(s, d, EdgeWeight(c, x, y)) for (s, d, x, y), c in sorted(acc.items(), key=lambda kc: kc[0]) if c != 0]
    final: dict = {}
    for s, f in a.final.items():
        _sig_add(final, renum[block[s]], f)
    final = {k: v for k, v in final.items() if v != 0}
    states = [a.states[rep[b]] for b in order]
    return WeightedAutomaton(a.height, a.model, a.width, states, edges, final, True, dict(a.stats))


def trim_useless(a: WeightedAutomaton) -> WeightedAutomaton:
    """Keep states on some path from the start to an accepting state."""
    n = a.num_states
    fwd: list[list[int]] = [[] for _ in range(n)]
    bwd: list[list[int]] = [[] for _ in range(n)]
    for s, d, _ in a.edges:
        fwd[s].append(d)
        bwd[d].append(s)

    def reach(seeds, adj):
        seen = set(seeds)
        stack = list(seeds)
        while stack:
            for t in adj[stack.pop()]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen

    keep = reach([0], fwd) & reach(list(a.final), bwd)
    keep.add(0)
    order = sorted(keep)
    renum = {s: k for k, s in enumerate(order)}
    edges = [(renum[s], renum[d], w) for s, d, w in a.edges if s in keep and d in keep]
    final = {renum[s]: f for s, f in a.final.items() if s in keep}
    return WeightedAutomaton(a.height, a.model, a.width, [a.states[s] for s in order], edges, final, a.minimized, dict(a.stats))


def minimize(a: WeightedAutomaton) -> WeightedAutomaton:
    """Alternate forward and backward weighted bisimulation quotients until stable.

    The start state is kept alone in its block throughout, so it never gains
    incoming edges.  The generating function is preserved exactly.
    """
    cur = trim_useless(a)
    while True:
        n0, e0 = cur.num_states, cur.num_edges
        out = cur.out_edges()
        seed = [0 if s == 0 else (1, cur.final.get(s, 0)) for s in range(cur.num_states)]
        seed = _renumber(seed)
        cur = _quotient_forward(cur, _refine(cur.num_states, seed, out))
        inc: list[list] = [[] for _ in cur.states]
        for s, d, w in cur.edges:
            inc[d].append((s, w))
        seed = [0 if s == 0 else 1 for s in range(cur.num_states)]
        cur = _quotient_backward(cur, _refine(cur.num_states, seed, inc))
        cur = trim_useless(cur)
        if (cur.num_states, cur.num_edges) == (n0, e0):
            break
    cur.minimized = True
    cur.stats = dict(a.stats, minimized_states=cur.num_states, minimized_edges=cur.num_edges)
    return cur


def _renumber(keys: list) -> list[int]:
    ids: dict = {}
    return [ids.setdefault(k, len(ids)) for k in keys]


# ---------------------------------------------------------------- persistence


def to_json(a: WeightedAutomaton) -> dict:
    states = []
    for i, enc in enumerate(a.states):
        if enc is None:
            states.append({"id": i, "kind": "start"})
        else:
            states.append({"id": i, "kind": "frame", "frame": enc.hex()})
    return {
        "meta": {
            "height": a.height,
            "model": a.model,
            "width": a.width,
            "minimized": a.minimized,
            "format": FORMAT_VERSION,
            "stats": a.stats,
        },
        "states": states,
        "edges": [{"src": s, "dst": d, "coeff": scalar_to_json(w.coeff), "x": w.x, "y": w.y} for s, d, w in a.edges],
        "accepting": a.accepting,
        "final": [{"id": i, "coeff": scalar_to_json(a.final[i])} for i in a.accepting],
    }


def from_json(doc: dict) -> WeightedAutomaton:
    try:
        meta = doc["meta"]
        states: list[bytes | None] = []
        for k, st in enumerate(doc["states"]):
            if st["id"] != k:
                raise AutomatonFormatError(f"state ids must be 0..n-1 in order (got {st['id']} at {k})")
            if st["kind"] == "start":
                states.append(None)
            else:
                enc = bytes.fromhex(st["frame"])
                decode_segments(enc)
                states.append(enc)
        n = len(states)
        edges = []
        for e in doc["edges"]:
            s, d = int(e["src"]), int(e["dst"])
            if not (0 <= s < n and 0 <= d < n):
                raise AutomatonFormatError(f"edge endpoint out of range: {s}->{d}")
            edges.append((s, d, EdgeWeight(scalar_from_json(e["coeff"]), int(e["x"]), int(e["y"]))))
        if "final" in doc:
            final = {int(f["id"]): scalar_from_json(f["coeff"]) for f in doc["final"]}
        else:
            final = {int(i): Fraction(1) for i in doc["accepting"]}
        if sorted(final) != sorted(int(i) for i in doc["accepting"]):
            raise AutomatonFormatError("accepting list disagrees with final weights")
        return WeightedAutomaton(
            int(meta["height"]),
            str(meta["model"]),
            int(meta["width"]),
            states,
            edges,
            final,
            bool(meta["minimized"]),
            dict(meta.get("stats", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, AutomatonFormatError):
            raise
        raise AutomatonFormatError(f"malformed automaton document: {exc!r}") from exc


def save(a: WeightedAutomaton, path: str | Path) -> None:
    Path(path).write_text(json.dumps(to_json(a), separators=(",", ":")))


def load(path: str | Path) -> WeightedAutomaton:
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise AutomatonFormatError(f"{path}: invalid UTF-8 at byte offset {exc.start}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise AutomatonFormatError(f"{path}: JSON parse error at byte offset {offset}: {exc.msg}") from exc
    return from_json(doc)
