import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    USE_CYTHON = True
except ImportError:
    USE_CYTHON = False

# Set ALLPASS_NO_EXT=1 to install the pure-Python backend only.
SKIP_EXT = os.environ.get("ALLPASS_NO_EXT", "") not in ("", "0")

EXTENSIONS = []
if USE_CYTHON and not SKIP_EXT:
    EXTENSIONS = cythonize(
        [
            Extension(
                "allpass._kernels",
                ["src/allpass/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=EXTENSIONS)
