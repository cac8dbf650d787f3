from setuptools import setup

# The compiled kernel is optional: without Cython (or a C compiler) the
# package falls back to the pure implementation in zecklogic._core_py.
ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/zecklogic/_core.pyx"],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
