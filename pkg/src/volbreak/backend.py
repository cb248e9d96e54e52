"""Backend selection for the numeric kernels.

The environment variable ``VOLBREAK_BACKEND`` picks the implementation:

* unset or ``numba``: the numba-compiled kernels (falls back to numpy with a
  warning if numba is not importable; ``numba`` makes the failure hard),
* ``numpy``: the pure-numpy kernels.

The choice is made once at import time.
"""

import os
import warnings

from .errors import ConfigError

_ENV_VAR = "VOLBREAK_BACKEND"
_requested = os.environ.get(_ENV_VAR, "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise ConfigError(f"{_ENV_VAR} must be 'numba' or 'numpy', got {_requested!r}")

if _requested == "numpy":
    from . import _impl_numpy as impl
else:
    try:
        from . import _impl_numba as impl
    except ImportError:
        if _requested == "numba":
            raise
        warnings.warn("numba not importable; using the pure-numpy backend", RuntimeWarning)
        from . import _impl_numpy as impl

BACKEND = impl.NAME

__all__ = ["impl", "BACKEND"]
