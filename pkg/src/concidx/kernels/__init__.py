"""Kernel backend selection.

The compiled Cython extension is preferred; the NumPy implementation in
``_pure`` is the fallback when the extension was not built.  Both expose
the same two entry points:

* ``log_abs_primary_scalar(w, p)``
* ``eval_sum_many(zs, xi, mass, genus)``
"""

from . import _pure

try:  # pragma: no cover - depends on the build environment
    from . import _fast as _impl
except ImportError:  # pragma: no cover
    _impl = _pure

BACKEND = _impl.BACKEND_NAME
log_abs_primary_scalar = _impl.log_abs_primary_scalar
eval_sum_many = _impl.eval_sum_many


def get_backend(name):
    """Return a backend module by name ('compiled' or 'pure').

    Used by the benchmark and the backend-agreement tests; raises
    ``ValueError`` for unknown names and ``ImportError`` if the compiled
    backend was requested but is unavailable.
    """
    if name == "pure":
        return _pure
    if name == "compiled":
        if _impl is _pure:
            raise ImportError("compiled kernel backend is not available")
        return _impl
    raise ValueError(f"unknown kernel backend: {name!r}")
