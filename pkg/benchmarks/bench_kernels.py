"""Compiled vs pure-Python kernel timings.

    python benchmarks/bench_kernels.py [--n 3000] [--np 30] [--repeat 5]

Both backends are imported directly, so the comparison does not depend on
which one ``walklab.kernels`` selected.  Outputs are checked for equality
before anything is timed.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from walklab.graph import derive_seed, sample_gnp
from walklab.kernels import _pure

try:
    from walklab.kernels import _core
except ImportError:  # extension not built
    _core = None


def _cases(n: int, p: float, seed: int):
    g = sample_gnp(n, p, seed)
    roots = np.array([0, n - 1], dtype=np.int64)
    key = derive_seed(seed, 7)
    return {
        "gnp_edges": lambda m: m.gnp_edges(n, p, key),
        "bfs_distances": lambda m: m.bfs_distances(g.indptr, g.indices, 0, -1),
        "mbfs": lambda m: m.mbfs(g.indptr, g.indices, roots, True),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3000)
    ap.add_argument("--np", type=float, default=30.0)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    if _core is None:
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1
    cases = _cases(args.n, args.np / args.n, args.seed)
    print(f"n={args.n} np={args.np:g}  (best of {args.repeat})")
    print(f"{'kernel':<15}{'pure (s)':>12}{'compiled (s)':>14}{'speedup':>10}")
    for name, fn in cases.items():
        if not _same(fn(_pure), fn(_core)):
            raise SystemExit(f"{name}: backends disagree")
        tp = min(timeit.repeat(lambda: fn(_pure), number=1, repeat=args.repeat))
        tc = min(timeit.repeat(lambda: fn(_core), number=1, repeat=args.repeat))
        print(f"{name:<15}{tp:>12.4f}{tc:>14.5f}{tp / tc:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
