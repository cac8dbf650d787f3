"""Selects the automaton kernel: compiled extension or pure fallback.

The Cython module `zecklogic._core` implements the hot loops (Hopcroft
refinement, product exploration, subset construction).  When it is missing,
or when the environment variable ZECKLOGIC_PURE is set to a non-empty value,
the numpy fallback `zecklogic._core_py` is used instead.  Both expose the
same functions with identical result conventions, so callers never branch.
"""

import os

if os.environ.get("ZECKLOGIC_PURE"):
    from . import _core_py as _impl

    COMPILED = False
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        from . import _core_py as _impl

        COMPILED = False

refine = _impl.refine
product = _impl.product
determinize = _impl.determinize


def backend() -> str:
    """Name of the active kernel implementation."""
    return "compiled" if COMPILED else "pure"
