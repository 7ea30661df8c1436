"""Backend selection for the hot kernels.

The compiled Cython extension (``_fast``) is preferred when it was built;
otherwise the numpy reference implementation (``_ref``) is used.  The
environment variable ``QUANTOUR_BACKEND`` forces the choice (``compiled``
or ``python``), and :func:`use` switches it temporarily, which is how the
benchmark harness compares the two.
"""

import contextlib
import os

from . import _ref

try:
    from . import _fast
except ImportError:
    _fast = None

HAVE_COMPILED = _fast is not None

_BACKENDS = {"python": _ref}
if HAVE_COMPILED:
    _BACKENDS["compiled"] = _fast

_env = os.environ.get("QUANTOUR_BACKEND", "").strip().lower()
if _env:
    if _env not in ("compiled", "python"):
        raise ValueError(f"QUANTOUR_BACKEND must be 'compiled' or 'python', got {_env!r}")
    if _env == "compiled" and not HAVE_COMPILED:
        raise ImportError("QUANTOUR_BACKEND=compiled but the extension is not built")
    _active = _env
else:
    _active = "compiled" if HAVE_COMPILED else "python"


def active_name():
    """Name of the backend currently in use ('compiled' or 'python')."""
    return _active


def available_backends():
    return tuple(sorted(_BACKENDS))


def get_backend(name=None):
    """Backend module; ``name=None`` returns the active one."""
    if name is None:
        name = _active
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}") from None


@contextlib.contextmanager
def use(name):
    """Temporarily switch the active backend (for tests and benchmarks)."""
    global _active
    get_backend(name)
    prev = _active
    _active = name
    try:
        yield
    finally:
        _active = prev


def directional_offsets(points, thetas, k, num_threads=0):
    return get_backend().directional_offsets(points, thetas, k, num_threads)


def min_margins(queries, thetas, offsets):
    return get_backend().min_margins(queries, thetas, offsets)


def simplex_iterate(T, basis, ncols_active, tol, max_iter, bland, stall_limit):
    return get_backend().simplex_iterate(
        T, basis, ncols_active, tol, max_iter, bland, stall_limit)
