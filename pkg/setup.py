import numpy as np
from setuptools import Extension, setup

# The compiled kernels are an optimization only; qbatt falls back to the
# pure-numpy implementations at import time if this extension is missing.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "qbatt._kernels",
                ["src/qbatt/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
