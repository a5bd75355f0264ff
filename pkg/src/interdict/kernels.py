"""Kernel backend selection: compiled extension if importable, else pure.

Set INTERDICT_PURE=1 to force the fallback (used by the benchmark and
the backend-agreement tests).
"""

import os

if os.environ.get("INTERDICT_PURE"):
    from . import _pykernels as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernels as _impl

BACKEND = _impl.BACKEND
hop_distances = _impl.hop_distances
blocked_rate = _impl.blocked_rate
