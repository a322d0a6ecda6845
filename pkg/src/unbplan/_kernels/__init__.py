"""Hot-loop kernels with a compiled core and a NumPy fallback.

The compiled extension is selected at import when available; set the
environment variable ``UNBPLAN_PURE=1`` to force the NumPy implementation
(used by the equivalence tests and the benchmark).
"""

import os

from unbplan._kernels import _fallback

if os.environ.get("UNBPLAN_PURE"):
    interference_matrix = _fallback.interference_matrix
    BACKEND = "numpy"
else:
    try:
        from unbplan._kernels import _core

        interference_matrix = _core.interference_matrix
        BACKEND = "cython"
    except ImportError:
        interference_matrix = _fallback.interference_matrix
        BACKEND = "numpy"

__all__ = ["interference_matrix", "BACKEND"]
