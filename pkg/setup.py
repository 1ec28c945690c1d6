"""Build script: compiles the optional Cython match kernel.

The package works without the extension (a pure-Python engine is selected
at import time), so a failed or skipped build is not fatal.  Set
ONTOHARVEST_PURE=1 to skip compilation entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ONTOHARVEST_PURE") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "ontoharvest.matcher._engine_cy",
                    ["src/ontoharvest/matcher/_engine_cy.pyx"],
                )
            ],
            language_level="3",
        )

setup(ext_modules=ext_modules)
