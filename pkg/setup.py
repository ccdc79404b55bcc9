"""Build hook: compiles the optional Cython kernel core.

The extension is strictly optional -- if Cython or a C compiler is missing
(or TAYLORPODA_PURE=1 is set) the package installs pure and the numpy
fallback kernels are used at import time.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("TAYLORPODA_PURE") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "taylorpoda._kernels._core",
                    ["src/taylorpoda/_kernels/_core.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
