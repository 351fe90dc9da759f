from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "airfoilgen.kernels._ops",
                ["src/airfoilgen/kernels/_ops.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # pure-Python fallback in airfoilgen.kernels covers a missing extension
    extensions = []

setup(ext_modules=extensions)
