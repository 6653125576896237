"""Kernel backend selection: compiled extension when importable, else numpy."""

import os

from . import _pykernels

if os.environ.get("SEQSCAN_PURE", "") not in ("", "0"):
    kernels = _pykernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        kernels = _pykernels

python_kernels = _pykernels

try:
    from . import _kernels as compiled_kernels
except ImportError:
    compiled_kernels = None


def name() -> str:
    return kernels.BACKEND


def use(backend: str) -> None:
    """Switch the active backend at runtime (``"cython"`` or ``"python"``)."""
    global kernels
    if backend == "python":
        kernels = _pykernels
    elif backend == "cython":
        if compiled_kernels is None:
            raise RuntimeError("compiled kernels are not built")
        kernels = compiled_kernels
    else:
        raise ValueError(f"unknown backend {backend!r}")
