"""Select the compiled kernel module when available, else the numpy fallback.

Set ``QBATT_PURE=1`` to force the pure-numpy implementations.
"""

from __future__ import annotations

import os

if os.environ.get("QBATT_PURE"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels


def backend_name() -> str:
    return "compiled" if kernels.__name__.endswith("._kernels") else "pure"
