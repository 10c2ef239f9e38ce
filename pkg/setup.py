"""Build script for the compiled kernel core.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time); building it just makes the hot
loops fast.  `python setup.py build_ext --inplace` drops the shared
object next to the fallback inside src/chshlab/_kernels/.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "chshlab._kernels._fast",
                ["src/chshlab/_kernels/_fast.pyx"],
                # no FP contraction: keeps results bit-comparable to the fallback
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
