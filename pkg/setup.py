import os

from setuptools import Extension, setup

# The compiled kernel is optional: without Cython (or with HOLOFLOW_NO_EXT=1)
# the package falls back to the pure-Python backend at import time.
ext_modules = []
if os.environ.get("HOLOFLOW_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "holoflow._kernels._core",
                    ["src/holoflow/_kernels/_core.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
