"""Build script: compiles the optional Cython trajectory kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a missing compiler or Cython only costs speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "rotodiff._langevin_cy",
                ["src/rotodiff/_langevin_cy.pyx"],
                # -ffp-contract=off: keep a*b+c as two rounded operations so the
                # compiled kernel matches the numpy fallback's arithmetic.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )

setup(ext_modules=extensions)
