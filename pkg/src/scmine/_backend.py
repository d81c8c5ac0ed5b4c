"""Kernel selection.

The compiled extension is used when it imports; set ``SCMINE_PURE_PYTHON=1``
to force the fallback (the benchmark and the parity tests do this).
"""

import os

from . import _fallback

fallback = _fallback
compiled = None

if os.environ.get("SCMINE_PURE_PYTHON") != "1":
    try:
        from . import _kernels as compiled
    except ImportError:
        compiled = None

kernels = compiled if compiled is not None else _fallback
BACKEND = "compiled" if compiled is not None else "python"

sparse_dot = kernels.sparse_dot
quantize_counts = kernels.quantize_counts
gibbs_sweep = kernels.gibbs_sweep
