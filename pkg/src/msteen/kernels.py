"""Select the compiled kernels when available, else the pure-Python ones.

Set ``MSTEEN_PURE_PYTHON=1`` to force the fallback.
"""

import os

BACKEND = "python"

if os.environ.get("MSTEEN_PURE_PYTHON") != "1":
    try:
        from msteen._kernels import apply_op, binom_mod, carries, poly_mul_into, ring_mono_mul

        BACKEND = "cython"
    except ImportError:  # extension not built
        pass

if BACKEND == "python":
    from msteen._kernels_py import apply_op, binom_mod, carries, poly_mul_into, ring_mono_mul

from msteen._kernels_py import COEFF_BITS

__all__ = ["BACKEND", "COEFF_BITS", "binom_mod", "carries", "poly_mul_into", "ring_mono_mul", "apply_op"]
