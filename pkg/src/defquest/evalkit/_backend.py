"""Kernel selection: compiled extension when built, pure Python otherwise.

Set DEFQUEST_PURE_PYTHON=1 to force the fallback (used by the benchmark
and the twin-equality tests). Both kernels are bit-identical by
construction, so which one runs never changes results, only speed.
"""

import os


def _select():
    if not os.environ.get("DEFQUEST_PURE_PYTHON"):
        try:
            from defquest import _alpha_fast

            return _alpha_fast
        except ImportError:
            pass
    from . import _alpha_py

    return _alpha_py


kernel = _select()
BACKEND_NAME = kernel.BACKEND_NAME
