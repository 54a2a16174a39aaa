"""Hot inner loops with a compiled backend and a pure fallback.

The Cython extension ``_ckernels`` is used when it was built; otherwise (or
when ``LAYERFORGE_PURE=1``) the NumPy versions in ``_pykernels`` are used.
Both expose the same functions with identical results.
"""
import os

from . import _pykernels as pure

compiled = None
if os.environ.get("LAYERFORGE_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

_impl = compiled if compiled is not None else pure
BACKEND = "cython" if compiled is not None else "python"

fill_evenodd = _impl.fill_evenodd
trace_boundaries = _impl.trace_boundaries
nearest_center = _impl.nearest_center

TURN_BLACK = pure.TURN_BLACK
TURN_WHITE = pure.TURN_WHITE
TURN_LEFT = pure.TURN_LEFT
TURN_RIGHT = pure.TURN_RIGHT
TURN_MINORITY = pure.TURN_MINORITY
TURN_MAJORITY = pure.TURN_MAJORITY

__all__ = ["BACKEND", "compiled", "pure", "fill_evenodd", "trace_boundaries", "nearest_center"]
