import os

from setuptools import setup

# The compiled kernels are optional: the package falls back to the pure
# Python implementations in convclose._kernels_py when the extension is
# missing.  Set CONVCLOSE_NO_EXT=1 to skip the build entirely.
ext_modules = []
if not os.environ.get("CONVCLOSE_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("convclose._kernels", ["src/convclose/_kernels.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
