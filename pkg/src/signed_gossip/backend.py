"""Kernel backend selection.

The hot numeric kernels exist twice: jitted (``_kernels_numba``) and pure
numpy (``_kernels_numpy``). One implementation is chosen at import time from
the ``SIGNED_GOSSIP_BACKEND`` environment variable:

* unset or ``"numba"``: use the jitted kernels (unset falls back to numpy
  when numba is not importable, ``"numba"`` makes numba mandatory),
* ``"numpy"``: force the pure-numpy fallback.

``benchmarks/backend_bench.py`` times both implementations side by side.
"""

import os

ENV_VAR = "SIGNED_GOSSIP_BACKEND"


def _choose():
    want = os.environ.get(ENV_VAR, "").strip().lower()
    if want not in ("", "numba", "numpy"):
        raise ValueError(
            f"{ENV_VAR} must be 'numba' or 'numpy', got {want!r}"
        )
    if want == "numpy":
        from . import _kernels_numpy as kern
        return kern, "numpy"
    try:
        from . import _kernels_numba as kern
        return kern, "numba"
    except ImportError:
        if want == "numba":
            raise
        from . import _kernels_numpy as kern
        return kern, "numpy"


kernels, _BACKEND = _choose()


def backend_name() -> str:
    """Name of the active kernel backend ("numba" or "numpy")."""
    return _BACKEND
