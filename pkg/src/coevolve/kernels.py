"""Backend selection for the replicator integrator.

The compiled extension is used when it imports; setting the environment
variable ``COEVOLVE_PURE_PYTHON=1`` forces the pure-Python fallback.
"""

import os

if os.environ.get("COEVOLVE_PURE_PYTHON", "") not in ("", "0"):
    from . import _replicator_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _replicator as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _replicator_py as _impl

        BACKEND = "python"

integrate = _impl.integrate
rhs = _impl.rhs
project = _impl.project

__all__ = ["BACKEND", "integrate", "project", "rhs"]
