"""Hot numeric kernels, compiled when available.

Importing this package binds the Cython core if it was built, otherwise the
pure-Python fallback. Both produce bit-identical results; the environment
variable WPTBEAM_PURE_PYTHON=1 forces the fallback (used by the benchmark).
"""

import os

from . import fallback

COMPILED = False
_impl = fallback
if not os.environ.get("WPTBEAM_PURE_PYTHON"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        pass

assignment_energies = _impl.assignment_energies
search_exhaustive = _impl.search_exhaustive


def backend() -> str:
    """Name of the kernel backend in use."""
    return "compiled" if COMPILED else "pure-python"
