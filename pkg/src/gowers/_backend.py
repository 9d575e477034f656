"""Backend selection for the hot kernels.

At import time we try the compiled extension and fall back to the numpy
implementation if it is missing (e.g. no C compiler at install time).
Set GOWERS_FORCE_PYTHON=1 to force the fallback, which is also how the
benchmark compares the two.
"""

from __future__ import annotations

import os

if os.environ.get("GOWERS_FORCE_PYTHON"):
    from ._kernels_py import direct_norm_sum

    BACKEND = "python"
else:
    try:
        from ._kernels_c import direct_norm_sum  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        from ._kernels_py import direct_norm_sum  # type: ignore[no-redef]

        BACKEND = "python"

__all__ = ["direct_norm_sum", "BACKEND"]
