"""Build script: compiles the Cython propagation kernels when possible.

The package works without the extension (a numpy fallback is selected at
import time), so any failure here should not block installation.  Set
DARKPATH_PURE_PYTHON=1 to skip the compiled build entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("DARKPATH_PURE_PYTHON"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "darkpath._kernels",
                    ["src/darkpath/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "initializedcheck": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
