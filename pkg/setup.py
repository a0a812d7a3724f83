"""Build script.

The agreement bootstrap has a compiled Cython kernel for the hot loop.
Building it is best-effort: without Cython or a C compiler the package
installs anyway and falls back to the pure-Python kernel at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/defquest/_alpha_fast.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass


class optional_build_ext:
    pass


if ext_modules:
    from setuptools.command.build_ext import build_ext

    class optional_build_ext(build_ext):  # noqa: F811
        """Swallow compiler failures; the pure-Python kernel covers for us."""

        def run(self):
            try:
                build_ext.run(self)
            except Exception as exc:  # pragma: no cover - depends on toolchain
                print(f"warning: skipping compiled kernel ({exc})")

        def build_extension(self, ext):
            try:
                build_ext.build_extension(self, ext)
            except Exception as exc:  # pragma: no cover
                print(f"warning: skipping {ext.name} ({exc})")

    setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
else:
    setup()
