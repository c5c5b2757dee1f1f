import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "sl2flow._core",
                ["src/sl2flow/_core.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Without Cython the package still installs; integration falls back to
    # the pure-Python kernel.
    ext_modules = []

setup(ext_modules=ext_modules)
