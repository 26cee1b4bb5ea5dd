import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("mrig._sampler_core", ["src/mrig/_sampler_core.pyx"])],
        language_level=3,
    )
except ImportError:
    # Pure-python install still works; the package falls back to the
    # numpy-batched sampler at import time.
    ext_modules = []

setup(ext_modules=ext_modules, include_dirs=[np.get_include()])
