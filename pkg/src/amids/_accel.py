"""Backend selection for the numeric kernels.

Set ``AMIDS_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when numba
is importable.  The choice is made once, at import time.
"""
import os

try:
    import numba  # noqa: F401
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    HAVE_NUMBA = False


def numba_requested(environ=None):
    env = os.environ if environ is None else environ
    return env.get("AMIDS_DISABLE_NUMBA", "").strip().lower() not in ("1", "true", "yes", "on")


USE_NUMBA = HAVE_NUMBA and numba_requested()
BACKEND = "numba" if USE_NUMBA else "numpy"
