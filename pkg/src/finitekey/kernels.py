"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the pure-Python
twin. Set ``FINITEKEY_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels as python_backend

compiled_backend = None
if not os.environ.get("FINITEKEY_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

backend = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

OK = python_backend.OK
NO_KEY_BITS = python_backend.NO_KEY_BITS
NO_ESTIMATION = python_backend.NO_ESTIMATION

rate_point = backend.rate_point
rate_grid = backend.rate_grid
floor_count = backend.floor_count

# compiled GF kernel is limited to 64-bit words
_py_mulmod = python_backend.gf2_mulmod


def gf2_mulmod(a, b, modulus, degree):
    if compiled_backend is not None and degree <= 64:
        return compiled_backend.gf2_mulmod(a, b, modulus, degree)
    return _py_mulmod(a, b, modulus, degree)


def gf2_mulmod_many(a_values, b_values, modulus, degree):
    if compiled_backend is not None and degree <= 64:
        return compiled_backend.gf2_mulmod_many(a_values, b_values, modulus, degree)
    return python_backend.gf2_mulmod_many(a_values, b_values, modulus, degree)
