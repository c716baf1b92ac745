"""Optional numba acceleration.

Set ``HOPFION_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when
numba is importable.
"""

import os

_DISABLED = os.environ.get("HOPFION_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by HOPFION_DISABLE_NUMBA")
    import numba as _numba
except ImportError:
    _numba = None

HAVE_NUMBA = _numba is not None

if HAVE_NUMBA and _numba.config.THREADING_LAYER == "default":
    # the bundled workqueue layer avoids probing for a system TBB
    _numba.config.THREADING_LAYER = "workqueue"


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if _numba is None:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn
    return _numba.njit(*args, **kwargs)


prange = _numba.prange if _numba is not None else range
