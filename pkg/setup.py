from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("p4mc._bitkern", ["src/p4mc/_bitkern.pyx"], optional=True)],
        language_level=3,
    )
except ImportError:
    # No Cython available: install pure-Python only, the kernel shim
    # falls back automatically.
    ext_modules = []

setup(ext_modules=ext_modules)
