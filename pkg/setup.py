"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-NumPy fallback is selected
at import time), so a missing compiler or Cython must not fail the install.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Degrade to the pure-Python backend when compilation is impossible."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: skipping C kernel build ({exc}); "
                  "falling back to pure-Python kernels")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); "
                  "falling back to pure-Python kernels")


def _extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "breatherkit._kernels_cy",
        sources=["src/breatherkit/_kernels_cy.pyx"],
        include_dirs=[np.get_include()],
        # no -ffast-math: the C and NumPy backends must be bit-identical
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
