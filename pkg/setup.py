"""Build the optional compiled kernel: python setup.py build_ext --inplace.

The package is fully functional without it (a NumPy fallback is selected
at import time); building the extension just makes the ranking iteration
faster on large graphs.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "scholarank._kernels._pagerank_cy",
                ["src/scholarank/_kernels/_pagerank_cy.pyx"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
