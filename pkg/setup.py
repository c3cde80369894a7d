"""Build shim: compile the BFS kernels when Cython is available.

The package works without the extension (opgraph.kernels falls back to the
pure-Python twin), so any failure here downgrades to a pure build instead of
breaking the install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "opgraph._speedups",
                ["src/opgraph/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - depends on build host
    print(f"opgraph: skipping compiled kernels ({exc!r}); pure-Python fallback will be used")

setup(ext_modules=ext_modules)
