"""Build shim: compiles the optional GF(2) kernel extension when Cython is present.

The package is fully functional without the extension (a NumPy implementation
with identical semantics is selected at import time), so any failure here is
deliberately non-fatal.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/qdtree/_gf2_cy.pyx"],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False},
    )
    include_dirs = [numpy.get_include()]
except Exception:
    include_dirs = []

setup(
    ext_modules=ext_modules,
    include_dirs=include_dirs,
)
