"""Kernel backend selection.

The heavy numeric kernels exist twice: a numba-compiled version and a pure
numpy fallback.  Set ``TRIVIEWCAL_NO_NUMBA=1`` to force the numpy path; when
numba is missing the fallback is picked automatically.
"""

import os

_FLAG = "TRIVIEWCAL_NO_NUMBA"


def _select():
    if os.environ.get(_FLAG, "").strip().lower() in ("1", "true", "yes"):
        from . import _kernels_np

        return _kernels_np, "numpy"
    try:
        from . import _kernels_numba

        return _kernels_numba, "numba"
    except ImportError:
        from . import _kernels_np

        return _kernels_np, "numpy"


kernels, BACKEND = _select()
