"""JIT selection for the hot stepping kernels.

Set ``FURNACESIM_DISABLE_JIT=1`` to run every kernel as plain Python/numpy.
The flag is read once at import time, so it has to be set before
``furnacesim`` is first imported.
"""

import os

_FALSY = ("", "0", "false", "no", "off")

JIT_DISABLED = os.environ.get("FURNACESIM_DISABLE_JIT", "0").strip().lower() not in _FALSY

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

JIT_ENABLED = numba is not None and not JIT_DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity decorator otherwise."""
    if not JIT_ENABLED:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda func: func
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


def backend_name():
    return "numba" if JIT_ENABLED else "python"
