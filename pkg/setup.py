"""Build script for the optional compiled kernel extension.

The package works without compilation (a numpy fallback is selected at
import time); building the extension just makes the hot kernels faster.
Run ``python setup.py build_ext --inplace`` to compile in a checkout.
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
                "aquasift.kernels._native",
                ["src/aquasift/kernels/_native.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
