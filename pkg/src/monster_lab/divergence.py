"""Divergence of graphs: div(a, b, c), the profile Div(n), and comparison of
functions up to the usual linear equivalence."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .graph import Graph, distances
from .seeding import rng

INF = math.inf
EXHAUSTIVE_CAP = 400


def forbidden_radius(r: int) -> int:
    """floor(r/2) - 2; negative means nothing is deleted."""
    return r // 2 - 2


def div_triple(g: Graph, a: int, b: int, c: int) -> float:
    """Length of a shortest a-b path missing B(c, floor(r/2) - 2), r = d(c, {a, b}).

    Infinity when no such path exists.
    """
    dc = distances(g, c)
    if dc[a] < 0 and dc[b] < 0:
        rho = -1  # c sees neither endpoint: r is infinite, nothing reachable to delete
    else:
        r = min(int(x) for x in (dc[a], dc[b]) if x >= 0)
        rho = forbidden_radius(r)
    blocked = ((dc >= 0) & (dc <= rho)).astype(np.uint8) if rho >= 0 else None
    assert blocked is None or not (blocked[a] or blocked[b])
    d = kernels.bfs(g.indptr, g.indices, a, blocked, -1, b)[0][b]
    return INF if d < 0 else int(d)


@dataclass
class DivSample:
    n: int
    value: float
    exact: bool
    boundary_safe: bool


@dataclass
class DivergenceProfile:
    samples: list[DivSample]
    graph_id: str
    policy: dict = field(default_factory=dict)

    def value(self, n: int) -> DivSample | None:
        for s in self.samples:
            if s.n == n:
                return s
        return None

    def to_dict(self) -> dict:
        samples = [{**asdict(s), "value": None if s.value == INF else s.value} for s in self.samples]
        return {"graph_id": self.graph_id, "policy": self.policy, "samples": samples}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "value", "exact", "boundary_safe"])
        for s in self.samples:
            writer.writerow([s.n, "inf" if s.value == INF else s.value,
                             int(s.exact), int(s.boundary_safe)])
        return buf.getvalue()


def _pair_values(g, a, c, da, dc, bs, region):
    """div(a, b, c) for every b in ``bs``, one BFS per distinct forbidden radius.

    Also reports whether each value is reproduced inside ``region``.
    """
    if dc[a] < 0:
        return np.full(len(bs), INF), np.ones(len(bs), dtype=bool)
    r = np.minimum(dc[a], dc[bs])
    rho = r // 2 - 2
    out = np.empty(len(bs))
    safe = np.ones(len(bs), dtype=bool)
    for value in np.unique(rho):
        sel = rho == value
        if value < 0:
            d = da
            blocked = None
        else:
            blocked = ((dc >= 0) & (dc <= value)).astype(np.uint8)
            d = kernels.bfs(g.indptr, g.indices, a, blocked)[0]
        vals = d[bs[sel]]
        out[sel] = np.where(vals < 0, INF, vals)
        if region is not None:
            outside = ~region if blocked is None else (~region | blocked.astype(bool))
            if blocked is not None and not region[blocked.astype(bool)].all():
                safe[sel] = False
                continue
            dr = kernels.bfs(g.indptr, g.indices, a, outside.astype(np.uint8))[0]
            safe[sel] = dr[bs[sel]] == vals
    return out, safe


def divergence_profile(g: Graph, n_max: int, policy: str = "exhaustive",
                       count: int = 1000, seed: int = 0,
                       base_points: Sequence[int] | None = None, transitive: bool = False,
                       trusted: tuple[int, int] | None = None,
                       cap: int = EXHAUSTIVE_CAP, graph_id: str = "") -> DivergenceProfile:
    """Div(n) for n = 0..n_max, the max of div(a, b, c) over d(a, b) <= n.

    ``exhaustive`` ranges over all a (or ``base_points``), all b within n_max
    and all c.  Base points give exact values only when the caller declares
    the graph vertex-transitive.  ``sample`` draws ``count`` random triples
    and yields lower estimates.  ``trusted`` = (center, radius) marks entries
    whose witnesses or forbidden balls leave that ball as unsafe.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    region = None
    if trusted is not None:
        td = distances(g, trusted[0])
        region = (td >= 0) & (td <= trusted[1])
    best = np.full(n_max + 1, -1.0)
    safe = np.ones(n_max + 1, dtype=bool)
    record = {"kind": policy, "n_max": n_max, "trusted": list(trusted) if trusted else None}

    def fold(da, values, ok, bs):
        idx = da[bs]
        np.maximum.at(best, idx, values)
        np.logical_and.at(safe, idx, ok)

    if policy == "exhaustive":
        if base_points is None and g.n > cap:
            raise ValueError(f"exhaustive profile refused for {g.n} > {cap} vertices; "
                             "use sampling or base points on a transitive graph")
        starts = range(g.n) if base_points is None else list(base_points)
        record.update(base_points=None if base_points is None else list(starts),
                      transitive=transitive)
        exact = base_points is None or transitive
        dist_from = {}
        for a in starts:
            da = distances(g, a)
            bs = np.flatnonzero((da >= 0) & (da <= n_max))
            for c in range(g.n):
                if c not in dist_from:
                    dist_from[c] = distances(g, c)
                values, ok = _pair_values(g, a, c, da, dist_from[c], bs, region)
                fold(da, values, ok, bs)
            if base_points is None:
                dist_from.pop(a, None)
    elif policy == "sample":
        record.update(count=count, seed=seed)
        exact = False
        gen = rng(seed, "divergence-sample")
        for _ in range(count):
            a, c = (int(x) for x in gen.integers(0, g.n, size=2))
            da = distances(g, a)
            near = np.flatnonzero((da >= 0) & (da <= n_max))
            b = np.array([near[gen.integers(0, len(near))]])
            values, ok = _pair_values(g, a, c, da, distances(g, c), b, region)
            fold(da, values, ok, b)
    else:
        raise ValueError(f"unknown policy {policy!r}")

    samples = []
    running, running_safe = -1.0, True
    for n in range(n_max + 1):
        if best[n] >= 0:
            running = max(running, best[n])
        running_safe = running_safe and bool(safe[n])
        samples.append(DivSample(n, running if running >= 0 else 0.0,
                                 exact and running_safe, running_safe))
    return DivergenceProfile(samples, graph_id, record)


@dataclass
class DivVerdict:
    verdict: str  # "pass", "fail", "inconclusive", "not-applicable"
    n: int
    value: float | None
    bound: float


def check_div_upper(profile: DivergenceProfile, eps: float, R: int, L: float,
                    hypothesis_verified: bool = True) -> DivVerdict:
    """Compare the exact entry Div(floor(eps R)) with (L + 4) R + 1."""
    if eps * R < 1:
        raise ValueError("need eps * R >= 1")
    n = math.floor(eps * R)
    bound = (L + 4) * R + 1
    if not hypothesis_verified:
        return DivVerdict("not-applicable", n, None, bound)
    s = profile.value(n)
    if s is None or not s.exact:
        return DivVerdict("inconclusive", n, None if s is None else s.value, bound)
    return DivVerdict("pass" if s.value <= bound else "fail", n, s.value, bound)


@dataclass
class EquivalenceVerdict:
    consistent: bool
    L: int | None
    tested: int
    witness: tuple[float, str] | None = None  # failing point for L_max and which side


def _dominated(t, f, g, L, index, lo, hi):
    """Points t with Lt on the grid where f(t) <= L g(Lt) + Lt + L fails."""
    for i, x in enumerate(t):
        if not lo <= x <= hi:
            continue
        j = index.get(L * x)
        if j is None or not lo <= t[j] <= hi:
            continue
        yield i, f[i] <= L * g[j] + L * x + L


def equivalence_check(grid: Sequence[float], f1: Sequence[float], f2: Sequence[float],
                      L_max: int = 10, interval: tuple[float, float] | None = None
                      ) -> EquivalenceVerdict:
    """Smallest integer L <= L_max with f_i(t) <= L f_j(Lt) + Lt + L both ways.

    Only grid points t whose multiple Lt is also a grid point are tested, so
    the answer concerns the samples, not the underlying functions.
    """
    t = np.asarray(grid, dtype=float)
    if t.size == 0:
        raise ValueError("empty grid")
    a, b = np.asarray(f1, dtype=float), np.asarray(f2, dtype=float)
    if a.shape != t.shape or b.shape != t.shape:
        raise ValueError("function samples must match the grid")
    lo, hi = interval if interval is not None else (-INF, INF)
    index = {float(x): i for i, x in enumerate(t)}
    witness = None
    for L in range(1, L_max + 1):
        tested, failed = 0, None
        for name, (f, g) in (("f1<=f2", (a, b)), ("f2<=f1", (b, a))):
            for i, ok in _dominated(t, f, g, L, index, lo, hi):
                tested += 1
                if not ok and failed is None:
                    failed = (float(t[i]), name)
        if failed is None:
            return EquivalenceVerdict(True, L, tested)
        witness = failed
    return EquivalenceVerdict(False, None, tested, witness)


def transitivity_bound(L1: int, L2: int) -> int:
    """Comparison constant for f1 ~ f3 obtained by chaining f1 ~ f2 (L1) and
    f2 ~ f3 (L2), valid for non-decreasing functions."""
    return max(L1 * L1 * L2 + L1, L2 * L2 * L1 + L2)
