"""Build script: compiles the optional Cython kernel.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed compile is not fatal for installation from source
without a C toolchain.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "unbplan._kernels._core",
                ["src/unbplan/_kernels/_core.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
