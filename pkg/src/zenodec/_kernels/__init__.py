"""Kernel backend selection.

The compiled extension is preferred; the numpy fallback is arithmetically
identical and is selected automatically when the extension is missing, or
explicitly via ZENODEC_FORCE_FALLBACK=1.
"""

import os

if os.environ.get("ZENODEC_FORCE_FALLBACK") == "1":
    from . import _fallback as _impl

    BACKEND = "fallback"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _fallback as _impl

        BACKEND = "fallback"

fp_substep = _impl.fp_substep
langevin_chunk = _impl.langevin_chunk

__all__ = ["BACKEND", "fp_substep", "langevin_chunk"]
