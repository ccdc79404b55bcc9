"""Subset-lattice kernels with compiled core and pure-numpy fallback.

The compiled Cython extension is preferred; set TAYLORPODA_PURE=1 to force
the fallback. ``HAVE_COMPILED`` reports which implementation is active.
"""

import os

from . import fallback

HAVE_COMPILED = False
_impl = fallback

if os.environ.get("TAYLORPODA_PURE") != "1":
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        HAVE_COMPILED = True
    except ImportError:
        pass

popcounts = _impl.popcounts
subset_mobius = _impl.subset_mobius
subset_zeta = _impl.subset_zeta
semivalues = _impl.semivalues
interaction_penalties = _impl.interaction_penalties

__all__ = [
    "HAVE_COMPILED",
    "fallback",
    "popcounts",
    "subset_mobius",
    "subset_zeta",
    "semivalues",
    "interaction_penalties",
]
