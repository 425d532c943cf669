import os

import numpy as np
from setuptools import Extension, setup

# The extension is optional: without Cython (or a compiler) the package
# falls back to finitekey._pykernels at import time.
ext_modules = []
if not os.environ.get("FINITEKEY_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "finitekey._ckernels",
                    ["src/finitekey/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    # no fast-math / fma: results must match the Python twin bit for bit
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
