"""Build script for the compiled Monte Carlo kernel.

The package works without the extension (a pure-Python fallback is selected
at import time); building it just makes large simulations much faster.
To compile in place: python3 setup.py build_ext --inplace
"""

from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "elitegt._mc",
        ["src/elitegt/_mc.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
)
