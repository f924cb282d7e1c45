"""Fast consistency checks run by ``monster-lab selftest``."""

from __future__ import annotations

import numpy as np

from . import kernels
from .divergence import div_triple
from .expanders import sl2_cayley
from .freegroup import compute_phi
from .graph import cycle_graph, girth, random_connected_graph, subdivide
from .quotient import quotient_ball, surface_presentation
from .seeding import rng


def selftest() -> list[str]:
    """Return a list of failure descriptions (empty when all checks pass)."""
    failures = []

    def check(cond, what):
        if not cond:
            failures.append(what)

    g = random_connected_graph(40, 20, rng(0, "selftest"))
    for s in (0, 7):
        fast = kernels.bfs(g.indptr, g.indices, s)[0]
        slow = kernels.pure.bfs(g.indptr, g.indices, s)[0]
        check(np.array_equal(fast, slow), f"bfs backends disagree from {s}")
    check(kernels.girth(g.indptr, g.indices, g.adj_edges)
          == kernels.pure.girth(g.indptr, g.indices, g.adj_edges), "girth backends disagree")
    check(sl2_cayley(5).graph.n == 120, "|SL2(5)| != 120")
    check(girth(subdivide(cycle_graph(7), 3)) == 21, "subdivision girth")
    check(div_triple(cycle_graph(100), 10, 90, 0) == 80, "div on C_100")
    check(compute_phi(2, 0.1, 2.0) == 1, "phi for kappa = 0.1")
    check(quotient_ball(surface_presentation(2), 2).sphere_sizes == [1, 8, 56], "surface spheres")
    return failures
