"""Build the optional compiled kernels.

The package works without them: ``knapsack_hierarchy.knapsack`` falls back to
the pure-Python branch and bound when ``_bnb`` cannot be imported, and
``exact_lp`` pivots in Python when ``_lpcore`` is missing.

    pip install -e . --no-build-isolation
    python3 setup.py build_ext --inplace
"""

import os

from setuptools import Extension, setup


def _extensions():
    if os.environ.get("KH_NO_EXT") == "1":
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    exts = [
        Extension(
            "knapsack_hierarchy._bnb",
            ["src/knapsack_hierarchy/_bnb.pyx"],
            extra_compile_args=["-O2"],
            optional=True,
        )
    ]
    try:
        import gmpy2
    except ImportError:
        gmpy2 = None
    if gmpy2 is not None:
        exts.append(
            Extension(
                "knapsack_hierarchy._lpcore",
                ["src/knapsack_hierarchy/_lpcore.pyx"],
                include_dirs=[os.path.dirname(gmpy2.__file__)],
                libraries=["gmp"],
                extra_compile_args=["-O2"],
                optional=True,
            )
        )
    return cythonize(exts, compiler_directives={"language_level": "3"})


setup(ext_modules=_extensions())
