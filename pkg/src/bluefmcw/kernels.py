"""Backend selection for the synthesis kernel.

The compiled extension is used when it imports; otherwise the numpy
version. Setting ``BLUEFMCW_PURE_PYTHON=1`` forces the numpy version.
"""

import os

from . import _kernels_py

_compiled = None
if not os.environ.get("BLUEFMCW_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

if _compiled is not None:
    accumulate_mixer = _compiled.accumulate_mixer
    BACKEND = "cython"
else:
    accumulate_mixer = _kernels_py.accumulate_mixer
    BACKEND = "python"


def available_backends():
    """Map of backend name to kernel function, for tests and benchmarks."""
    found = {"python": _kernels_py.accumulate_mixer}
    try:
        from . import _kernels

        found["cython"] = _kernels.accumulate_mixer
    except ImportError:
        pass
    return found
