"""JIT switch for the hot loops.

Set ``RYDPOL_NO_JIT=1`` (or numba's own ``NUMBA_DISABLE_JIT=1``) to run the
plain Python/numpy versions of the kernels instead of the compiled ones.
"""
import os

_FLAG_VALUES = ("1", "true", "yes", "on")


def _flag(name):
    return os.environ.get(name, "").strip().lower() in _FLAG_VALUES


JIT_DISABLED = _flag("RYDPOL_NO_JIT") or _flag("NUMBA_DISABLE_JIT")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None


def compile_kernel(fn):
    """Return a compiled version of ``fn`` (or ``fn`` itself if numba is absent)."""
    if numba is None:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend_name():
    return "python" if (JIT_DISABLED or not HAVE_NUMBA) else "numba"
