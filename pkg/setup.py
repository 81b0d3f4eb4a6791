"""Build script: compiles the optional Mellin-Barnes kernel extension.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so a failed compile only costs speed.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "mmwrelay._mbkernel",
                ["src/mmwrelay/_mbkernel.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"mmwrelay: skipping compiled kernel ({exc}); pure-python backend will be used")

setup(ext_modules=ext_modules)
