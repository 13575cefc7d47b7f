"""Compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times the two hot loops on inputs taken from real manifold arcs, checks that
both backends return identical arrays, and prints one line per case.
"""
from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from lozihom import _fallback
from lozihom.core import Params
from lozihom.manifolds import stable_arc, unstable_arc

try:
    from lozihom import _kernels
except ImportError:  # pragma: no cover
    _kernels = None


def cases():
    p = Params(1.7, 0.5)
    U = unstable_arc(p, 6).line.vertices
    S = stable_arc(p, 12).line.vertices
    yield "split_and_map fwd", lambda m: m.split_and_map(U, p.a, p.b, True)
    yield "split_and_map bwd", lambda m: m.split_and_map(S, p.a, p.b, False)
    tol = 1e-9 * 10.0
    yield f"pairs {len(U)}x{len(S)}", lambda m: m.segment_pairs_within(U, S, tol)


def _same(x, y) -> bool:
    if isinstance(x, tuple):
        return all(_same(u, v) for u, v in zip(x, y))
    return np.array_equal(np.asarray(x), np.asarray(y))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the fallback is available")
        return 1
    print(f"{'case':<28}{'numpy ms':>10}{'cython ms':>11}{'speedup':>9}  same")
    ok = True
    for name, fn in cases():
        t_py = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeat)) * 1e3
        t_cy = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=args.repeat)) * 1e3
        same = _same(fn(_fallback), fn(_kernels))
        ok &= same
        print(f"{name:<28}{t_py:>10.2f}{t_cy:>11.2f}{t_py / t_cy:>8.1f}x  {same}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
