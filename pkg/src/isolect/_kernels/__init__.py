"""Kernel backend selection.

The compiled Cython extension is preferred; the numpy fallback is used when
the extension is missing or when ``ISOLECT_PURE`` is set in the environment.
Both backends are bit-identical, so the choice never changes results.
"""

import os

from . import _pykernels

if os.environ.get("ISOLECT_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl.__name__.endswith("_ckernels") else "python"

evolve_slots = _impl.evolve_slots
pair_shared_counts = _impl.pair_shared_counts

__all__ = ["BACKEND", "evolve_slots", "pair_shared_counts"]
