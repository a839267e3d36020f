"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; setting
KOBALAB_PURE_PY=1 in the environment forces the numpy reference backend.
Both backends expose the same flat function API (see kernels_py).
"""

import os

from . import kernels_py

BACKEND = "python"
_impl = kernels_py

if os.environ.get("KOBALAB_PURE_PY", "") != "1":
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "compiled"

KIND_EXPPOWER = kernels_py.KIND_EXPPOWER
KIND_PIECEWISE = kernels_py.KIND_PIECEWISE
KIND_MOLLIFIED = kernels_py.KIND_MOLLIFIED

eval_profile = _impl.eval_profile
eval_profile_batch = _impl.eval_profile_batch
inverse_profile = _impl.inverse_profile
inverse_profile_batch = _impl.inverse_profile_batch
boundary_distance = _impl.boundary_distance
boundary_distance_batch = _impl.boundary_distance_batch
directional_distance_scan = _impl.directional_distance_scan
directional_distance_scan_batch = _impl.directional_distance_scan_batch
directional_distance_phase = _impl.directional_distance_phase
segment_kappa_batch = _impl.segment_kappa_batch
