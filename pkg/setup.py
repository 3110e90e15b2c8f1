"""Build script: compiles the optional window-fit extension.

The package is fully functional without the extension (a NumPy fallback is
selected at import time); building it just makes the robust window
estimators faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "trendcycle.windowed._ckernels",
                ["src/trendcycle/windowed/_ckernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
