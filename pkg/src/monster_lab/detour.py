"""Detours around balls: expander detours, the divergence path assembly, and
escaping extensions of geodesics in labelled subdivided graphs."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .freegroup import is_reduced
from .graph import Graph, ball_mask, distances, girth as graph_girth, shortest_path
from .labelling import Labelling, read_vertex_path
from .seeding import rng


@dataclass
class DetourCertificate:
    path: list[int]
    center: int
    avoided_radius: int
    length: int
    bound: float | None = None
    bound_kind: str = "expander_log"  # or "div_paths_linear"
    notes: list[str] = field(default_factory=list)

    def validate(self, g: Graph) -> bool:
        """Independent re-check: a real path, of the stated length, outside the ball."""
        if len(self.path) != self.length + 1 or not g.is_path(self.path):
            return False
        dist = distances(g, self.center)
        if any(0 <= dist[v] <= self.avoided_radius for v in self.path):
            return False
        return self.bound is None or self.length <= self.bound

    def to_dict(self) -> dict:
        return asdict(self)


def find_detour(g: Graph, m: int, v: int, w: int, lambda1: float | None = None,
                girth: int | None = None, radius: int | None = None) -> DetourCertificate | None:
    """Shortest v-w path in ``g`` with the ball around ``m`` deleted.

    The deleted ball has ``radius`` if given, else the closed ball of radius
    floor(lambda1 * girth).  Hypothesis violations are recorded in ``notes``.
    Returns None when v and w are disconnected after deletion.
    """
    if m in (v, w):
        raise ValueError("the avoided center must differ from both endpoints")
    notes = []
    if radius is None:
        if lambda1 is None or not 0 < lambda1 <= 0.25:
            raise ValueError("lambda1 must lie in (0, 1/4]")
        girth = graph_girth(g) if girth is None else girth
        if girth == math.inf:
            raise ValueError("forest: give the forbidden radius explicitly")
        radius = math.floor(lambda1 * girth)
        dm = distances(g, m)
        for x in (v, w):
            if not lambda1 * girth <= dm[x] <= girth / 4:
                notes.append(f"d(m,{x})={dm[x]} outside [{lambda1 * girth:g}, {girth / 4:g}]")
    blocked = ball_mask(g, m, radius)
    if blocked[v] or blocked[w]:
        return None
    path = shortest_path(g, v, w, blocked)
    if path is None:
        return None
    return DetourCertificate(path=path, center=m, avoided_radius=radius,
                             length=len(path) - 1, notes=notes)


def detour_constant(h: float, c_h: float) -> float:
    """L = 2 (1/ln(1 + h/2) + 2 C_h)."""
    if not h > 0 or not c_h > 0:
        raise ValueError("h and C_h must be positive")
    return 2 * (1 / math.log1p(h / 2) + 2 * c_h)


def detour_length_bound(h: float, c_h: float, size: int) -> float:
    """L ln|size|, the detour length allowed in an expander with Cheeger floor h."""
    return detour_constant(h, c_h) * math.log(size)


def diameter_log_ratio(diam: float, size: int) -> float:
    """diam / ln|size|; the family maximum is the constant C_h."""
    return diam / math.log(size)


@dataclass
class AvoidantPath:
    status: str  # "geodesic", "constructed", "boundary-failure", "detour-failure"
    path: list[int] | None
    r: int
    forbidden_radius: int  # floor(r/2) - 2 from the divergence definition
    length: int | None
    bound: float | None
    pieces: tuple[int, int, int] | None = None  # lengths of escape_a, detour, escape_b


DetourOracle = Callable[[Graph, int, int, int, int], "list[int] | None"]


def ball_detour_oracle(g: Graph, x1: int, x2: int, m: int, radius: int) -> list[int] | None:
    """Shortest x1-x2 path missing the closed ball B(m, radius)."""
    blocked = ball_mask(g, m, radius)
    if blocked[x1] or blocked[x2]:
        return None
    return shortest_path(g, x1, x2, blocked)


def _escape(g: Graph, x: int, dist_c: np.ndarray, avoid: np.ndarray, R: int) -> list[int] | None:
    """Geodesic from x to the sphere S_R(c) whose vertices avoid ``avoid``."""
    full, _ = kernels.bfs(g.indptr, g.indices, x)
    dist, parent = kernels.bfs(g.indptr, g.indices, x, avoid)
    ok = np.flatnonzero((dist_c == R) & (dist >= 0) & (dist == full))
    if not len(ok):
        return None
    y = int(ok[np.argmin(dist[ok])])
    path = [y]
    while path[-1] != x:
        path.append(int(parent[path[-1]]))
    return path[::-1]


def build_avoidant_path(g: Graph, a: int, b: int, c: int, R: int, eps: float,
                        L: float | None = None, detour: DetourOracle = ball_detour_oracle,
                        trusted: tuple[int, int] | None = None) -> AvoidantPath:
    """Path from a to b avoiding B(c, r/2 - 2), r = d(c, {a, b}), assembled as
    escape geodesic + sphere detour + escape geodesic.

    ``trusted`` = (center, radius) confines all constructed objects; leaving
    it yields status "boundary-failure" rather than an unreliable path.
    """
    if eps * R < 1:
        raise ValueError("need eps * R >= 1")
    dist_c = distances(g, c)
    if dist_c[a] < 0 or dist_c[b] < 0:
        raise ValueError("a, b and c must lie in one component")
    r = int(min(dist_c[a], dist_c[b]))
    forbidden = r // 2 - 2
    bound = None if L is None else (L + 4) * R + 1
    region = None
    if trusted is not None:
        tdist = distances(g, trusted[0])
        region = (tdist >= 0) & (tdist <= trusted[1])

    def finish(status, path, pieces=None):
        if path is not None and region is not None and not region[path].all():
            return AvoidantPath("boundary-failure", None, r, forbidden, None, bound)
        length = None if path is None else len(path) - 1
        return AvoidantPath(status, path, r, forbidden, length, bound, pieces)

    if a == b:
        return finish("geodesic", [a])
    if r >= 2 * eps * R:
        return finish("geodesic", shortest_path(g, a, b))
    if max(dist_c[a], dist_c[b]) > R:
        return AvoidantPath("boundary-failure", None, r, forbidden, None, bound)
    # escape segments avoid the open ball d(c, .) < r/2
    half = ((dist_c >= 0) & (2 * dist_c < r)).astype(np.uint8)
    if region is not None:
        if not region[ball_mask(g, c, math.floor(eps * R)).astype(bool)].all():
            return AvoidantPath("boundary-failure", None, r, forbidden, None, bound)
    ga = _escape(g, a, dist_c, half, R)
    gb = _escape(g, b, dist_c, half, R)
    if ga is None or gb is None:
        return AvoidantPath("boundary-failure", None, r, forbidden, None, bound)
    mid = detour(g, ga[-1], gb[-1], c, math.floor(eps * R))
    if mid is None:
        return AvoidantPath("detour-failure", None, r, forbidden, None, bound)
    path = ga + mid[1:] + gb[::-1][1:]
    return finish("constructed", path, (len(ga) - 1, len(mid) - 1, len(gb) - 1))


@dataclass
class EscapeResult:
    status: str  # "nongeodesic-label", "escaped", "none-found"
    forbidden_radius: int
    target_depth: int
    extensions: tuple[list[int], list[int]] | None = None
    min_trace: tuple[int, int] | None = None
    nongeodesic_index: int | None = None
    nongeodesic_label: tuple[int, ...] | None = None
    expansions: int = 0


def _geodesic_from(parent: np.ndarray, m: int, v: int) -> list[int]:
    path = [v]
    while path[-1] != m:
        path.append(int(parent[path[-1]]))
    return path[::-1]


def find_escaping_extensions(g: Graph, lab: Labelling, m: int, v1: int, v2: int,
                             eps: float, phi: int, girth: int | None = None,
                             budget: int = 200_000) -> EscapeResult:
    """Outward geodesic extensions of m->v_i whose free-group trace stays far from m.

    With both m->v_i labels freely reduced, search (depth first, edge-id
    order) for geodesics q_i from v_i to the sphere of radius floor(girth/2)
    around m such that every prefix of label(m->v_i) label(q_i) has reduced
    length above ceil(eps girth / (2 + 2 phi)).
    """
    gg = graph_girth(g) if girth is None else girth
    if gg == math.inf:
        raise ValueError("graph has no cycles; the tree-ball hypothesis is vacuous")
    if not 0 < eps <= 0.125:
        raise ValueError("eps must lie in (0, 1/8]")
    dist, parent = kernels.bfs(g.indptr, g.indices, m)
    for x in (v1, v2):
        if not eps * gg <= dist[x] <= gg / 4:
            raise ValueError(f"need eps*girth <= d(m,{x}) <= girth/4; got d={dist[x]}, girth={gg}")
    if dist[v1] > dist[v2]:
        raise ValueError("need d(m, v1) <= d(m, v2)")
    rho = math.ceil(eps * gg / (2 + 2 * phi))
    depth = gg // 2
    result = EscapeResult("none-found", rho, depth)
    words = []
    for i, v in enumerate((v1, v2)):
        word = read_vertex_path(lab, _geodesic_from(parent, m, v))
        if not is_reduced(word):
            result.status = "nongeodesic-label"
            result.nongeodesic_index = i
            result.nongeodesic_label = word
            return result
        words.append(word)

    labels = lab.labels
    found = []
    for v, word in zip((v1, v2), words):
        stack = list(word)
        path = [v]
        low = [len(stack)]
        frames = [iter(g.out_edges(v).tolist())]
        hit = None
        while frames and result.expansions < budget:
            if dist[path[-1]] == depth:
                hit = (list(path), min(low))
                break
            e = next(frames[-1], None)
            if e is None:
                frames.pop()
                u = path.pop()
                low.pop()
                if path:
                    letter = int(labels[g.edge_between(path[-1], u)])
                    if stack and stack[-1] == letter:
                        stack.pop()
                    else:
                        stack.append(-letter)
                continue
            w = int(g.dst[e])
            if dist[w] != dist[path[-1]] + 1:
                continue
            letter = int(labels[e])
            if stack and stack[-1] == -letter:
                new_len = len(stack) - 1
            else:
                new_len = len(stack) + 1
            if new_len <= rho:
                continue
            result.expansions += 1
            if new_len < len(stack):
                stack.pop()
            else:
                stack.append(letter)
            path.append(w)
            low.append(new_len)
            frames.append(iter(g.out_edges(w).tolist()))
        if hit is None:
            return result
        found.append(hit)
    result.status = "escaped"
    result.extensions = (found[0][0], found[1][0])
    result.min_trace = (found[0][1], found[1][1])
    return result


@dataclass
class SphereDetourCheck:
    """Outcome of testing the sphere-detour hypothesis for given (eps, R)."""
    verified: bool
    eps: float
    R: int
    L: float | None  # smallest L >= 1 that works, when verified
    worst_length: int | None
    witness: tuple[int, int, int] | None = None  # (m, x1, x2) with no detour


def verify_sphere_detours(g: Graph, eps: float, R: int,
                          centers: list[int] | None = None) -> SphereDetourCheck:
    """For every m in ``centers`` and x1, x2 on the sphere S_R(m), find the
    shortest x1-x2 path avoiding B(m, floor(eps R)).

    On a vertex-transitive graph one center suffices.
    """
    if not 0 < eps <= 0.25 or eps * R < 1:
        raise ValueError("need 0 < eps <= 1/4 and eps * R >= 1")
    worst = 0
    for m in range(g.n) if centers is None else centers:
        dm = distances(g, m)
        sphere = np.flatnonzero(dm == R)
        blocked = ((dm >= 0) & (dm <= math.floor(eps * R))).astype(np.uint8)
        for x in sphere:
            d, _ = kernels.bfs(g.indptr, g.indices, int(x), blocked)
            reach = d[sphere]
            if (reach < 0).any():
                y = int(sphere[np.argmax(reach < 0)])
                return SphereDetourCheck(False, eps, R, None, None, (m, int(x), y))
            worst = max(worst, int(reach.max()))
    return SphereDetourCheck(True, eps, R, max(1.0, worst / R), worst)


def sample_admissible_triples(g: Graph, lambda1: float, girth: int, count: int,
                              seed: int) -> list[tuple[int, int, int]]:
    """Random (m, v, w), v != w, with lambda1 girth <= d(m, v), d(m, w) <= girth / 4."""
    lo, hi = math.ceil(lambda1 * girth), math.floor(girth / 4)
    if lo > hi:
        raise ValueError(f"no admissible distances for lambda1={lambda1}, girth={girth}")
    gen = rng(seed, "detour-triples")
    out = []
    while len(out) < count:
        m = int(gen.integers(g.n))
        dm = distances(g, m, max_depth=hi)
        ring = np.flatnonzero((dm >= lo) & (dm <= hi))
        if len(ring) < 2:
            continue
        v, w = (int(x) for x in gen.choice(ring, size=2, replace=False))
        out.append((m, v, w))
    return out


@dataclass
class DetourSurvey:
    triples: int
    found: int
    separated: int
    violations: int
    max_length: int | None
    bound: float
    forbidden_radius: int
    L: float

    def to_dict(self) -> dict:
        return asdict(self)


def _separated(g: Graph, blocked: np.ndarray, v: int, w: int) -> bool:
    """Union-find check that v and w lie in different components of g minus ``blocked``."""
    parent = list(range(g.n))

    def root(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    keep = ~blocked.astype(bool)
    for a, b in g.edge_list():
        if keep[a] and keep[b]:
            parent[root(a)] = root(b)
    return root(v) != root(w)


def detour_survey(g: Graph, lambda1: float, h: float, c_h: float, count: int, seed: int,
                  girth: int | None = None) -> DetourSurvey:
    """Detours for sampled admissible triples, checked against L ln|V|.

    A violation is a returned path that fails re-validation or the length
    bound, or a missing path while v and w are still connected.
    """
    gg = int(graph_girth(g)) if girth is None else girth
    L = detour_constant(h, c_h)
    bound = L * math.log(g.n)
    found = separated = violations = 0
    longest = None
    for m, v, w in sample_admissible_triples(g, lambda1, gg, count, seed):
        cert = find_detour(g, m, v, w, lambda1, girth=gg)
        if cert is None:
            blocked = ball_mask(g, m, math.floor(lambda1 * gg))
            if _separated(g, blocked, v, w):
                separated += 1
            else:
                violations += 1
            continue
        cert.bound = bound
        found += 1
        longest = cert.length if longest is None else max(longest, cert.length)
        if not cert.validate(g):
            violations += 1
    return DetourSurvey(count, found, separated, violations, longest, bound,
                        math.floor(lambda1 * gg), L)
