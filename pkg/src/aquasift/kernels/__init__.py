"""Hot numeric kernels with two interchangeable backends.

``_native`` is a Cython extension compiled with ``python setup.py
build_ext --inplace``; ``_pure`` is the numpy fallback.  The compiled
backend is preferred when importable.  Set ``AQUASIFT_PURE_KERNELS=1`` to
force the fallback (used by the parity tests and the benchmark).
"""

import os

from . import _pure

if os.environ.get("AQUASIFT_PURE_KERNELS"):
    _impl = _pure
else:
    try:
        from . import _native as _impl
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND
pairwise_distances = _impl.pairwise_distances
core_distances = _impl.core_distances
mutual_reachability = _impl.mutual_reachability
prim_mst = _impl.prim_mst
fused_error_count = _impl.fused_error_count

__all__ = [
    "BACKEND",
    "pairwise_distances",
    "core_distances",
    "mutual_reachability",
    "prim_mst",
    "fused_error_count",
]
