"""Kernel selection.

The compiled extension is used when it was built and every mask fits in a
signed 64-bit integer; set ``LIMITLAB_PURE_PYTHON=1`` to force the
pure-Python path.
"""

from __future__ import annotations

import os

from . import _pykernels
from ._pykernels import CAUT, CONV, DEC, MON, NU, SDEC, SMON, SNU, WB, WMON  # noqa: F401

try:
    if os.environ.get("LIMITLAB_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _ckernels
    import numpy as np
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"
_MAX_BITS = 62


def first_violation(code: int, sem, hid, cnt, total: int, backend: str | None = None):
    backend = backend or BACKEND
    if backend == "cython" and _ckernels is not None:
        widest = max([total, *sem, *cnt], default=0).bit_length()
        if widest <= _MAX_BITS:
            return _ckernels.first_violation(
                code,
                np.asarray(sem, dtype=np.int64),
                np.asarray(hid, dtype=np.int64),
                np.asarray(cnt, dtype=np.int64),
                total,
            )
    elif backend not in ("cython", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    return _pykernels.first_violation(code, sem, hid, cnt, total)
