import os

from setuptools import Extension, setup


def extensions():
    if os.environ.get("CONCIDX_PURE"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    return cythonize(
        [
            Extension(
                "concidx.kernels._fast",
                ["src/concidx/kernels/_fast.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )


setup(ext_modules=extensions())
