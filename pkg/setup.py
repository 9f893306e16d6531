"""Build script: compiles the optional swing-integration Cython kernel.

The package works without the extension (a pure-numpy kernel is selected at
import time), so a failed extension build is downgraded to a warning.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "coifreq.sim._swing_cy",
                ["src/coifreq/sim/_swing_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    warnings.warn(f"Cython kernel not built ({exc}); pure-Python fallback will be used")

setup(ext_modules=ext_modules)
