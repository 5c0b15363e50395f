"""Backend selection for the numeric kernels.

Numba is used when it imports cleanly and ``MEANSPIN_DISABLE_NUMBA`` is not
set to a truthy value. Otherwise every kernel runs its pure-numpy path.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}

DISABLED_BY_ENV = os.environ.get("MEANSPIN_DISABLE_NUMBA", "").strip().lower() not in _FALSY

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func

        return decorator


USE_NUMBA = NUMBA_AVAILABLE and not DISABLED_BY_ENV


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
