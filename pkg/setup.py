"""Build script: compiles the optional Cython kernel core.

The package works without the extension (a pure-Python fallback is selected
at import time); set WPTBEAM_NO_EXT=1 to skip the build entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("WPTBEAM_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext = Extension(
            "wptbeam._kernels._core",
            sources=["src/wptbeam/_kernels/_core.pyx"],
            extra_compile_args=["-O3"],
        )
        ext.optional = True  # build failure degrades to the fallback, not an error
        ext_modules = cythonize(
            [ext],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
