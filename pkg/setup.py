"""Build script: compiles the optional integer-scan extension.

The package works without the extension (a pure-Python scanner is selected
at import time), so a failed compile only costs speed, never correctness.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("integral_census._scan", ["src/integral_census/_scan.pyx"])],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
