"""Compare the compiled kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from monster_lab import _pykernels as pure
from monster_lab.expanders import sl2_cayley
from monster_lab.freegroup import random_letters
from monster_lab.graph import subdivide
from monster_lab.seeding import rng

try:
    from monster_lab import _kernels as fast
except ImportError:  # pragma: no cover
    fast = None


def cases():
    g = subdivide(sl2_cayley(7).graph, 2)
    letters = random_letters(rng(0, "bench"), 2, (2000, 90))
    start = np.ones(8, dtype=np.int8)
    codes = rng(1, "bench").integers(0, 4, size=100_000).astype(np.int32)
    return {
        "bfs (SL2(7)^2, 1008 vertices)": lambda k: k.bfs(g.indptr, g.indices, 0),
        "girth (SL2(7)^2)": lambda k: k.girth(g.indptr, g.indices, g.adj_edges),
        "walk_hits (2000 x 90 steps)": lambda k: k.walk_hits(letters, start, 1),
        "window_presence (1e5 letters, l=6)": lambda k: k.window_presence(codes, 6, 4),
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if fast is None:
        print("compiled extension not built; nothing to compare")
        return
    print(f"{'kernel':40s} {'cython':>10s} {'python':>10s} {'speedup':>8s}")
    for name, fn in cases().items():
        t_fast = min(timeit.repeat(lambda: fn(fast), number=1, repeat=args.repeat))
        t_pure = min(timeit.repeat(lambda: fn(pure), number=1, repeat=args.repeat))
        print(f"{name:40s} {t_fast * 1e3:9.2f}ms {t_pure * 1e3:9.2f}ms {t_pure / t_fast:7.1f}x")


if __name__ == "__main__":
    main()
