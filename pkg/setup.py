from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # fall back to the pure-Python kernels
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("tokfair._kernels._ckernels", ["src/tokfair/_kernels/_ckernels.pyx"])],
        language_level="3",
    )

setup(ext_modules=ext_modules)
