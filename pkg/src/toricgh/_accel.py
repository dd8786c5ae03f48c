"""Backend switch for the compiled kernels.

Set ``TORICGH_DISABLE_NUMBA=1`` to force the pure-numpy implementations.
"""

import os

_FLAG = os.environ.get("TORICGH_DISABLE_NUMBA", "").strip().lower()

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(*args, **kwargs):
    """``numba.njit`` with caching, or a no-op decorator when numba is absent."""
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    import numba

    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


def set_threads(n: int) -> None:
    if HAVE_NUMBA and n > 0:
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
