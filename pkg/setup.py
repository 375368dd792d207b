"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure NumPy twin is selected at
import time), so any build failure here downgrades to a warning.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "kreinspec._kernels.fast",
                ["src/kreinspec/_kernels/fast.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # noqa: BLE001
    import warnings

    warnings.warn(f"Cython kernel extension not built ({exc}); using pure fallback")

setup(ext_modules=ext_modules)
