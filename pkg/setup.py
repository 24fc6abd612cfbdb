import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("MORAVA_CHERN_PURE", "") not in ("1", "true", "yes"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("morava_chern._kernels", ["src/morava_chern/_kernels.pyx"])],
            compiler_directives={"language_level": "3"},
            quiet=True,
        )

setup(ext_modules=ext_modules)
