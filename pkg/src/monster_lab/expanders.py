"""The explicit expander family Cay(SL2(Z/p), {A_p, B_p}) and family checks."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .graph import (
    CHEEGER_EXACT_CAP,
    Graph,
    cheeger_exact,
    cheeger_lower_bound,
    diameter,
    girth,
    is_connected,
)

Matrix = tuple[int, int, int, int]  # (a, b, c, d) for [[a, b], [c, d]]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


def mat_mul(x: Matrix, y: Matrix, p: int) -> Matrix:
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % p, (a * f + b * h) % p,
            (c * e + d * g) % p, (c * f + d * h) % p)


def mat_inv(x: Matrix, p: int) -> Matrix:
    a, b, c, d = x  # determinant 1
    return (d % p, -b % p, -c % p, a % p)


def generators(p: int) -> tuple[Matrix, Matrix]:
    return (1, 2 % p, 0, 1), (1, 0, 2 % p, 1)


@dataclass(frozen=True)
class CayleyGraph:
    graph: Graph
    p: int
    matrices: tuple[Matrix, ...]  # vertex id -> matrix

    def vertex_of(self, m: Matrix) -> int:
        return self.matrices.index(m)


def sl2_cayley(p: int) -> CayleyGraph:
    """Right Cayley graph of SL2(Z/p) w.r.t. A_p, B_p.

    Vertices are numbered in BFS order from the identity, one geometric edge
    {M, M*g} per vertex and positive generator g.
    """
    if p % 2 == 0 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    gens = generators(p)
    inv = [mat_inv(g, p) for g in gens]
    moves = [*gens, *inv]
    if len(set(moves)) != 4:
        raise ValueError(f"generator coincidence for p={p}")
    ident: Matrix = (1, 0, 0, 1)
    index = {ident: 0}
    order = [ident]
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in moves:
            y = mat_mul(x, g, p)
            if y not in index:
                index[y] = len(order)
                order.append(y)
                queue.append(y)
    edges = [(index[x], index[mat_mul(x, g, p)]) for x in order for g in gens]
    return CayleyGraph(Graph(len(order), edges), p, tuple(order))


@dataclass(frozen=True)
class ExpanderFamilySpec:
    primes: tuple[int, ...]
    degree: int = 4
    C: float = 10.0
    h: float = 1e-3
    j: int = 1

    def __post_init__(self):
        if not self.primes or any(p % 2 == 0 or not is_prime(p) for p in self.primes):
            raise ValueError("primes must be a nonempty list of odd primes")
        if self.degree < 3:
            raise ValueError("degree must be >= 3")
        if not self.C > 0:
            raise ValueError("C must be positive")
        if not self.h > 0:
            raise ValueError("h must be positive")
        if self.j < 1:
            raise ValueError("j must be >= 1")


@dataclass
class GraphCheck:
    vertices: int
    regular: bool
    simple: bool
    connected: bool
    girth: float
    diameter: float
    diam_girth_ok: bool
    cheeger: float
    cheeger_kind: str  # "exact" or "spectral"
    cheeger_ok: bool

    @property
    def passed(self) -> bool:
        return all((self.regular, self.simple, self.connected,
                    self.diam_girth_ok, self.cheeger_ok))


@dataclass
class ValidationReport:
    spec: ExpanderFamilySpec
    checks: list[GraphCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def validate_family(spec: ExpanderFamilySpec, graphs: list[Graph],
                    exact_cap: int = CHEEGER_EXACT_CAP) -> ValidationReport:
    """Check the family hypotheses graph by graph; failures are report entries."""
    if not graphs:
        raise ValueError("no graphs to validate")
    report = ValidationReport(spec)
    for g in graphs:
        deg = g.degrees()
        regular = g.is_regular() and int(deg[0]) == spec.degree
        gi, di = girth(g), diameter(g)
        if g.n <= exact_cap:
            h, kind = float(cheeger_exact(g, exact_cap)), "exact"
        else:
            h, kind = cheeger_lower_bound(g), "spectral"
        report.checks.append(GraphCheck(
            vertices=g.n,
            regular=regular,
            simple=g.is_simple(),
            connected=is_connected(g),
            girth=gi,
            diameter=di,
            diam_girth_ok=di <= spec.C * gi,
            cheeger=h,
            cheeger_kind=kind,
            cheeger_ok=h >= spec.h,
        ))
    return report
