"""Build script.  The compiled kernel is optional: if Cython or a C compiler
is unavailable the package installs anyway and falls back to the numpy
implementation of the same loops (see gowers._backend)."""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("gowers._kernels_c", ["src/gowers/_kernels_c.pyx"])],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs = include_dirs
except Exception as exc:  # pragma: no cover - exercised only on broken toolchains
    import sys

    print("warning: compiled kernel disabled (%s); using numpy fallback" % exc,
          file=sys.stderr)

setup(ext_modules=ext_modules)
