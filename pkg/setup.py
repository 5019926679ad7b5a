"""Build script for the optional compiled kernels.

The package works without the extension; `partition_forge._kernels`
falls back to the pure Python implementations when the compiled
module is missing.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/partition_forge/_kernels/_speed.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
