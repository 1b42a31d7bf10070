import os

from setuptools import setup

ext_modules = []
if not os.environ.get("BELLSIM_SKIP_EXT"):
    try:
        from setuptools import Extension
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("bellsim._kernels", ["src/bellsim/_kernels.pyx"])],
            language_level="3",
        )
    except ImportError:
        # No Cython available: the package falls back to the numpy kernels.
        ext_modules = []

setup(ext_modules=ext_modules)
