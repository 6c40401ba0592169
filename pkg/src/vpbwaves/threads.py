"""Thread count for the compiled velocity-space kernels.

Read from the ``VPBWAVES_THREADS`` environment variable; unset means numba's
own default (one thread per core).
"""
from __future__ import annotations

import os

from .errors import ValidationError

ENV_VAR = "VPBWAVES_THREADS"


def requested_threads(environ=None) -> int | None:
    raw = (os.environ if environ is None else environ).get(ENV_VAR, "").strip()
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValidationError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
    return n


def configure_threads(environ=None) -> int:
    """Apply the requested count (capped at numba's pool size); returns the count in use."""
    import numba

    # the TBB layer is skipped: older system TBB builds only produce warnings
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    n = requested_threads(environ)
    if n is not None:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    return int(numba.get_num_threads())
