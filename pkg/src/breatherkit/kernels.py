"""Kernel backend selection.

The compiled Cython kernels are preferred when the extension was built;
otherwise the pure-NumPy implementation is used. Both produce bit-identical
output, so the choice only affects speed. Set ``BREATHERKIT_KERNELS`` to
``python`` or ``c`` to force a backend (``c`` raises if unavailable).
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("BREATHERKIT_KERNELS", "auto").lower()

if _requested not in ("auto", "c", "python"):
    raise ValueError(
        f"BREATHERKIT_KERNELS={_requested!r}: expected 'auto', 'c' or 'python'"
    )

if _requested == "python":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        if _requested == "c":
            raise ImportError(
                "compiled kernels requested via BREATHERKIT_KERNELS=c "
                "but breatherkit._kernels_cy is not built"
            )
        _impl = _kernels_py
        BACKEND = "python"

site_uniforms = _impl.site_uniforms
field_values = _impl.field_values


def backend_name() -> str:
    return BACKEND
