"""Build script for the optional compiled kernels.

The package works without the extension (a pure-Python twin is selected at
import time); set LDPCOPT_PURE_PYTHON=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

extensions = []
if not os.environ.get("LDPCOPT_PURE_PYTHON"):
    try:
        from Cython.Build import cythonize

        extensions = cythonize(
            [
                Extension(
                    "ldpcopt._speedups",
                    ["src/ldpcopt/_speedups.pyx"],
                    # -ffp-contract=off keeps the compiled kernels bit-for-bit
                    # identical to the pure-Python fallback (no FMA fusion).
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        pass

# Layout metadata duplicated from pyproject.toml so that legacy setuptools
# tooling (pre-PEP 660) still resolves the src layout correctly.
setup(
    name="ldpcopt",
    package_dir={"": "src"},
    packages=["ldpcopt"],
    ext_modules=extensions,
)
