"""Selects the compiled core when it imports, the numpy fallback otherwise.

Set ``KERNSEG_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _core_py

BACKEND = "python"
core = _core_py

if not os.environ.get("KERNSEG_PURE_PYTHON"):
    try:
        from . import _core as core  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        core = _core_py


def use_backend(name):
    """Switch the active backend at runtime ("cython" or "python")."""
    global core, BACKEND
    if name == "python":
        core, BACKEND = _core_py, "python"
    elif name == "cython":
        from . import _core
        core, BACKEND = _core, "cython"
    else:
        raise ValueError(f"unknown backend {name!r}")
