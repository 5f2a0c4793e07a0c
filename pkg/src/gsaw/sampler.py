"""Monte Carlo simulation of growing self-avoiding walks.

Walks are grown until trapped on a strip, the quarter plane, the half plane
or the full plane.  The inner loop is compiled with numba; visited vertices
are stamped into a square array around the origin with a hash-map fallback
for the rare walk that leaves it.  Each shard draws from its own jumped PCG64
substream, and shards report exact integer power sums, so results do not
depend on how shards are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np
from numba import njit, types
from numba.typed import Dict

KINDS = {"strip": 0, "quarter": 1, "half": 2, "full": 3}
DEFAULT_LEVELS = (0.5, 0.8, 0.9, 0.95, 0.99, 0.9999)
STEP_CAP = 10_000_000
GRID = 1024  # stamped window is (2*GRID)^2 cells


@dataclass(frozen=True)
class LatticeSpec:
    kind: str
    height: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown lattice {self.kind!r}; expected one of {sorted(KINDS)}")
        if self.kind == "strip":
            if self.height is None or self.height < 1:
                raise ValueError("a strip needs height >= 1")
        elif self.height is not None:
            raise ValueError(f"{self.kind} lattice takes no height")

    @property
    def start(self) -> tuple[int, int]:
        return (0, self.height - 1) if self.kind == "strip" else (0, 0)

    def label(self) -> str:
        return f"strip({self.height})" if self.kind == "strip" else self.kind

    @classmethod
    def parse(cls, text: str) -> LatticeSpec:
        text = text.strip()
        if text.startswith("strip"):
            inner = text[5:].strip("():= ")
            if not inner.isdigit():
                raise ValueError(f"bad strip spec {text!r}; use strip:<h>")
            return cls("strip", int(inner))
        return cls(text)


@dataclass
class TrialStats:
    trials: int
    mean_length: float
    mean_displacement: float
    var_length: float
    var_displacement: float
    ci_length: dict[float, tuple[float, float]] = field(default_factory=dict)
    ci_displacement: dict[float, tuple[float, float]] = field(default_factory=dict)
    aborted: int = 0

    def to_rows(self, lattice: str, model: str) -> list[dict]:
        rows = []
        for lv in sorted(self.ci_length):
            rows.append(
                {
                    "lattice": lattice,
                    "model": model,
                    "level": lv,
                    "trials": self.trials,
                    "mean_length": self.mean_length,
                    "ci_length_low": self.ci_length[lv][0],
                    "ci_length_high": self.ci_length[lv][1],
                    "mean_displacement": self.mean_displacement,
                    "ci_displacement_low": self.ci_displacement[lv][0],
                    "ci_displacement_high": self.ci_displacement[lv][1],
                    "aborted": self.aborted,
                }
            )
        return rows


# ---------------------------------------------------------------- kernel


@njit(cache=True)
def _inside(kind, h, x, y):
    if kind == 0:
        return x >= 0 and 0 <= y < h
    if kind == 1:
        return x >= 0 and y >= 0
    if kind == 2:
        return x >= 0
    return True


@njit(cache=True)
def _key(x, y):
    return (np.int64(x) << 32) ^ (np.int64(y) & 0xFFFFFFFF)


@njit(cache=True)
def _seen(grid, extra, stamp, x, y):
    gx = x + GRID
    gy = y + GRID
    if 0 <= gx < 2 * GRID and 0 <= gy < 2 * GRID:
        return grid[gx, gy] == stamp
    return _key(x, y) in extra


@njit(cache=True)
def _mark(grid, extra, stamp, x, y):
    gx = x + GRID
    gy = y + GRID
    if 0 <= gx < 2 * GRID and 0 <= gy < 2 * GRID:
        grid[gx, gy] = stamp
    else:
        extra[_key(x, y)] = True


@njit(cache=True)
def _simulate(rng, kind, h, energetic, c, n, grid, stamp0, step_cap, lengths, disps):
    dx = np.array([-1, 1, 0, 0])
    dy = np.array([0, 0, -1, 1])
    cx = np.zeros(4, np.int64)
    cy = np.zeros(4, np.int64)
    wt = np.zeros(4)
    aborted = 0
    extra = Dict.empty(key_type=types.int64, value_type=types.boolean)
    for t in range(n):
        stamp = stamp0 + t
        if len(extra) > 0:
            extra.clear()
        x = 0
        y = h - 1 if kind == 0 else 0
        _mark(grid, extra, stamp, x, y)
        lo = 0
        hi = 0
        steps = 0
        while True:
            k = 0
            for d in range(4):
                qx = x + dx[d]
                qy = y + dy[d]
                if _inside(kind, h, qx, qy) and not _seen(grid, extra, stamp, qx, qy):
                    cx[k] = qx
                    cy[k] = qy
                    k += 1
            if k == 0:
                break
            if steps >= step_cap:
                aborted += 1
                break
            if energetic:
                total = 0.0
                for j in range(k):
                    ell = 0
                    for d in range(4):
                        zx = cx[j] + dx[d]
                        zy = cy[j] + dy[d]
                        if (zx != x or zy != y) and _inside(kind, h, zx, zy) and _seen(grid, extra, stamp, zx, zy):
                            ell += 1
                    wt[j] = c**ell
                    total += wt[j]
                u = rng.random() * total
                j = 0
                acc = wt[0]
                while u >= acc and j < k - 1:
                    j += 1
                    acc += wt[j]
            else:
                j = int(rng.random() * k)
                if j >= k:
                    j = k - 1
            x = cx[j]
            y = cy[j]
            _mark(grid, extra, stamp, x, y)
            steps += 1
            if x < lo:
                lo = x
            if x > hi:
                hi = x
        lengths[t] = steps
        disps[t] = hi - lo
    return aborted


# ---------------------------------------------------------------- drivers


def _stream(seed: int, shard: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed).jumped(shard))


def sample_walks(
    spec: LatticeSpec,
    n: int,
    seed: int = 0,
    *,
    model: str = "uniform",
    c: float = 1.0,
    shard: int = 0,
    step_cap: int = STEP_CAP,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Lengths and displacements of ``n`` walks from one substream."""
    if model not in ("uniform", "energetic"):
        raise ValueError(f"sampler supports uniform and energetic models, not {model!r}")
    if model == "energetic" and not c > 0:
        raise ValueError("energetic sampling needs C > 0")
    lengths = np.zeros(n, np.int64)
    disps = np.zeros(n, np.int64)
    grid = np.zeros((2 * GRID, 2 * GRID), np.int64)
    aborted = _simulate(
        _stream(seed, shard), KINDS[spec.kind], spec.height or 0, model == "energetic", float(c), n, grid, 1, step_cap, lengths, disps
    )
    return lengths, disps, int(aborted)


def sample_walk(spec: LatticeSpec, seed: int = 0, *, model: str = "uniform", c: float = 1.0) -> tuple[int, int]:
    lengths, disps, _ = sample_walks(spec, 1, seed, model=model, c=c)
    return int(lengths[0]), int(disps[0])


@dataclass
class _Sums:
    n: int = 0
    s1: int = 0
    s2: int = 0
    d1: int = 0
    d2: int = 0
    aborted: int = 0

    def merge(self, o: _Sums) -> _Sums:
        return _Sums(self.n + o.n, self.s1 + o.s1, self.s2 + o.s2, self.d1 + o.d1, self.d2 + o.d2, self.aborted + o.aborted)


def _shard(args) -> _Sums:
    spec, model, c, n, seed, shard, step_cap = args
    chunk = 1_000_000
    out = _Sums()
    done = 0
    grid = np.zeros((2 * GRID, 2 * GRID), np.int64)
    rng = _stream(seed, shard)
    lengths = np.zeros(min(chunk, n), np.int64)
    disps = np.zeros(min(chunk, n), np.int64)
    while done < n:
        m = min(chunk, n - done)
        ab = _simulate(rng, KINDS[spec.kind], spec.height or 0, model == "energetic", float(c), m, grid, done + 1, step_cap, lengths, disps)
        out = out.merge(_Sums(m, *_power_sums(lengths[:m]), *_power_sums(disps[:m]), int(ab)))
        done += m
    return out


def _power_sums(v: np.ndarray) -> tuple[int, int]:
    if len(v) and int(v.max()) >= 1 << 20:
        # squares could overflow int64 when summed; fall back to Python ints
        return int(v.sum()), sum(int(a) * int(a) for a in v)
    return int(v.sum()), int((v * v).sum())


def _interval(mean: float, var: float, n: int, level: float) -> tuple[float, float]:
    z = NormalDist().inv_cdf(0.5 + level / 2)
    half = z * math.sqrt(var / n)
    return mean - half, mean + half


def stats_from_sums(s: _Sums, levels=DEFAULT_LEVELS) -> TrialStats:
    n = s.n
    if n < 2:
        raise ValueError("need at least two trials")
    ml = s.s1 / n
    md = s.d1 / n
    # exact integer arithmetic before the final division
    vl = (n * s.s2 - s.s1 * s.s1) / (n * (n - 1))
    vd = (n * s.d2 - s.d1 * s.d1) / (n * (n - 1))
    return TrialStats(
        trials=n,
        mean_length=ml,
        mean_displacement=md,
        var_length=vl,
        var_displacement=vd,
        ci_length={lv: _interval(ml, vl, n, lv) for lv in levels},
        ci_displacement={lv: _interval(md, vd, n, lv) for lv in levels},
        aborted=s.aborted,
    )


def run_trials(
    spec: LatticeSpec,
    n: int,
    seed: int = 0,
    *,
    model: str = "uniform",
    c: float = 1.0,
    levels=DEFAULT_LEVELS,
    shards: int = 1,
    workers: int = 1,
    step_cap: int = STEP_CAP,
) -> TrialStats:
    """Simulate ``n`` walks split over ``shards`` independent substreams."""
    if n < 2:
        raise ValueError("need at least two trials")
    if shards < 1 or workers < 1:
        raise ValueError("shards and workers must be positive")
    if model not in ("uniform", "energetic"):
        raise ValueError(f"sampler supports uniform and energetic models, not {model!r}")
    for lv in levels:
        if not 0 < lv < 1:
            raise ValueError(f"confidence level {lv} outside (0, 1)")
    sizes = [n // shards + (1 if i < n % shards else 0) for i in range(shards)]
    jobs = [(spec, model, c, m, seed, i, step_cap) for i, m in enumerate(sizes) if m]
    if workers == 1:
        parts = [_shard(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_shard, jobs))
    total = _Sums()
    for p in parts:
        total = total.merge(p)
    return stats_from_sums(total, levels)
