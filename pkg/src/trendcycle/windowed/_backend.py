"""Kernel backend selection.

The compiled extension is preferred when present; the NumPy fallback is
interchangeable.  Set TRENDCYCLE_KERNELS=python (or =compiled) to force a
backend, e.g. for benchmarking.
"""

import os

from ..errors import ConfigError

_choice = os.environ.get("TRENDCYCLE_KERNELS", "auto").strip().lower()

if _choice in ("", "auto"):
    try:
        from . import _ckernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernels as kernels
elif _choice in ("c", "compiled"):
    from . import _ckernels as kernels  # type: ignore[attr-defined]
elif _choice in ("py", "python"):
    from . import _pykernels as kernels
else:
    raise ConfigError(f"unknown TRENDCYCLE_KERNELS value {_choice!r}")


def backend_name() -> str:
    return kernels.BACKEND


def available_backends():
    names = ["python"]
    try:
        from . import _ckernels  # noqa: F401

        names.insert(0, "compiled")
    except ImportError:
        pass
    return tuple(names)
