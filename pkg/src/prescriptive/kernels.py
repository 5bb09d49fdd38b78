"""Backend selection for the hot kernels.

The compiled extension is preferred. Setting ``PRESCRIPTIVE_PURE_PYTHON=1``
before import forces the numpy fallback.
"""
import os

import numpy as np

from prescriptive import _kernels_py

if os.environ.get("PRESCRIPTIVE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from prescriptive import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"


def logistic_loss_grad(X, y, sample_weights, weights, bias, l2, impl=None):
    impl = impl or _impl
    return impl.logistic_loss_grad(
        np.ascontiguousarray(X, dtype=np.float64),
        np.ascontiguousarray(y, dtype=np.float64),
        np.ascontiguousarray(sample_weights, dtype=np.float64),
        np.ascontiguousarray(weights, dtype=np.float64),
        float(bias),
        float(l2),
    )


def arm_cumsums(treatment, outcome, impl=None):
    impl = impl or _impl
    return impl.arm_cumsums(treatment, outcome)


def available_backends():
    """Map of backend name to implementation module for every importable backend."""
    backends = {"python": _kernels_py}
    try:
        from prescriptive import _kernels
    except ImportError:
        pass
    else:
        backends["cython"] = _kernels
    return backends
