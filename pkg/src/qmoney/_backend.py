"""Backend selection for the state-vector kernels.

``QMONEY_BACKEND=numpy`` forces the pure-numpy path; anything else (default
``numba``) uses the JIT kernels when numba imports cleanly. The variable is
read once at import; ``set_backend`` switches at run time.
"""
import os

BACKEND_ENV = "QMONEY_BACKEND"

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def _resolve(name: str) -> str:
    name = name.strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {name!r}")
    if name == "numba" and not HAS_NUMBA:
        return "numpy"
    return name


_current = _resolve(os.environ.get(BACKEND_ENV, "numba"))


def requested_backend() -> str:
    return _current


def set_backend(name: str) -> str:
    """Switch the active backend; returns the previous one."""
    global _current
    prev, _current = _current, _resolve(name)
    return prev
