"""Backend selection for the hot numeric kernels.

The inner recursion loops ship in two variants: a numba ``@njit`` version and
a pure-numpy fallback.  Set ``VOLSPEC_BACKEND=numpy`` to force the fallback
(useful for debugging and for the benchmark comparison); default is numba
whenever it imports.
"""

import os

_requested = os.environ.get("VOLSPEC_BACKEND", "auto").strip().lower()

if _requested in ("numpy", "fallback"):
    HAVE_NUMBA = False
elif _requested in ("auto", "", "numba"):
    try:
        import numba  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise
        HAVE_NUMBA = False
else:
    raise ValueError(
        f"VOLSPEC_BACKEND={_requested!r} not understood (use 'numba' or 'numpy')"
    )

BACKEND = "numba" if HAVE_NUMBA else "numpy"
