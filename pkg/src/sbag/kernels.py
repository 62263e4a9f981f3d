"""Kernel backend selection: compiled Cython kernels with a numpy fallback.

The compiled module is preferred when importable; set SBAG_KERNEL=python or
SBAG_KERNEL=compiled to force a backend (the latter raises if the extension
is unavailable). Both backends implement `forward_probs` and
`forward_backward` with identical semantics; results agree to floating-point
reassociation error, and each backend is individually deterministic.
"""

from __future__ import annotations

import os

from . import _pykernels

_forced = os.environ.get("SBAG_KERNEL", "").strip().lower()

if _forced == "python":
    _impl = _pykernels
elif _forced == "compiled":
    from . import _ckernels as _impl
elif _forced in ("", "auto"):
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels
else:
    raise ValueError(f"SBAG_KERNEL must be 'python' or 'compiled', got {_forced!r}")

forward_probs = _impl.forward_probs
forward_backward = _impl.forward_backward
batch_loss_grads = _impl.batch_loss_grads
forward_full = _pykernels.forward_full  # cache-returning path is python-only


def backend_name() -> str:
    return _impl.BACKEND


def available_backends():
    """The kernel modules importable in this environment, python first."""
    backends = [_pykernels]
    try:
        from . import _ckernels
        backends.append(_ckernels)
    except ImportError:
        pass
    return backends
