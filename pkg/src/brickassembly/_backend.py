"""Kernel backend selection.

The compiled extension is preferred when it imports cleanly; otherwise the
pure-Python twin takes over. Both expose the same three functions with
bit-identical outputs, so everything above this module is backend-agnostic.
``BRICKASSEMBLY_BACKEND=python`` forces the fallback (used by the backend
equivalence tests and the comparison benchmark).
"""

from __future__ import annotations

import os

from . import _kernels_py

_FORCED = os.environ.get("BRICKASSEMBLY_BACKEND", "").strip().lower()

if _FORCED == "python":
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        if _FORCED == "cython":
            raise ImportError(
                "BRICKASSEMBLY_BACKEND=cython but the compiled extension is "
                "not built; run `python setup.py build_ext --inplace`"
            )
        _impl = _kernels_py

BACKEND_NAME: str = _impl.NAME


def active_backend():
    """The module providing the placement kernels for this process."""
    return _impl


def available_backends() -> dict[str, object]:
    """All importable kernel backends, keyed by name."""
    found: dict[str, object] = {"python": _kernels_py}
    try:
        from . import _kernels_cy

        found["cython"] = _kernels_cy
    except ImportError:
        pass
    return found
