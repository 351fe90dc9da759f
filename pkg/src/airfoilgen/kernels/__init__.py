"""Numeric kernel backend selection.

The compiled Cython extension (`_ops`) is preferred when importable; the
NumPy fallback (`_pyops`) is always available. Force a choice with
AIRFOILGEN_BACKEND=python|compiled.
"""

import os

from . import _pyops

_choice = os.environ.get("AIRFOILGEN_BACKEND", "").lower()

if _choice == "python":
    _impl = _pyops
    BACKEND = "python"
else:
    try:
        from . import _ops as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        _impl = _pyops
        BACKEND = "python"

ACT_IDENTITY = _pyops.ACT_IDENTITY
ACT_LEAKY_RELU = _pyops.ACT_LEAKY_RELU
ACT_TANH = _pyops.ACT_TANH
ACT_SIGMOID = _pyops.ACT_SIGMOID
LEAKY_SLOPE = _pyops.LEAKY_SLOPE

act_forward = _impl.act_forward
act_backward = _impl.act_backward
dense_forward = _impl.dense_forward
dense_backward = _impl.dense_backward
adam_update = _impl.adam_update
