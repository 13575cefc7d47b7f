"""Kernel dispatch: the compiled extension when importable, numpy otherwise.

Set ``LOZIHOM_PURE=1`` in the environment to force the numpy fallback.
"""
import os

from . import _fallback

BACKEND = "python"
if os.environ.get("LOZIHOM_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _fallback
else:
    _impl = _fallback


def split_and_map(v, a, b, forward):
    return _impl.split_and_map(v, a, b, forward)


def segment_pairs_within(A, B, tol):
    import numpy as np

    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    return _impl.segment_pairs_within(A, B, float(tol))


__all__ = ["BACKEND", "split_and_map", "segment_pairs_within"]
