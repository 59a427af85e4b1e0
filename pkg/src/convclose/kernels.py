"""Backend selection for the accumulation kernels.

Prefers the compiled Cython extension; falls back to the pure Python
implementation when the extension is not built.  Set CONVCLOSE_PURE=1 to
force the fallback (used by the benchmark and the parity tests).
"""

from __future__ import annotations

import os

if os.environ.get("CONVCLOSE_PURE"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

line_conv = _impl.line_conv
abs_sum = _impl.abs_sum
total = _impl.total


def backend_name() -> str:
    """Name of the active kernel backend: 'cython' or 'python'."""
    return _impl.BACKEND
