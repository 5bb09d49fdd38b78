"""Pure numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_kernels`` extension; used
when the extension is not built or when ``PRESCRIPTIVE_PURE_PYTHON`` is set.
"""
import numpy as np


def logistic_loss_grad(X, y, sample_weights, weights, bias, l2):
    """Weighted mean cross-entropy plus ``l2/2 * |w|^2`` and its gradient.

    Returns ``(loss, grad)`` where ``grad`` has length ``d + 1`` with the bias
    derivative last.
    """
    z = X @ weights + bias
    # softplus(z) - y*z is the cross-entropy of sigmoid(z) against y
    terms = np.logaddexp(0.0, z) - y * z
    wsum = sample_weights.sum()
    p = np.empty_like(z)
    pos = z >= 0
    p[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    p[~pos] = ez / (1.0 + ez)
    r = sample_weights * (p - y)
    grad = np.empty(X.shape[1] + 1)
    grad[:-1] = (X.T @ r) / wsum + l2 * weights
    grad[-1] = r.sum() / wsum
    loss = float(sample_weights @ terms) / wsum + 0.5 * l2 * float(weights @ weights)
    return loss, grad


def arm_cumsums(treatment, outcome):
    """Cumulative (treated count, treated positives, control count, control positives).

    Inputs are already in ranking order. Each output has length ``n + 1`` and
    starts at zero, so entry ``k`` describes the top-``k`` units.
    """
    t = np.asarray(treatment, dtype=np.int64)
    y = np.asarray(outcome, dtype=np.int64)
    c = 1 - t
    out = np.zeros((4, t.shape[0] + 1), dtype=np.int64)
    np.cumsum(t, out=out[0, 1:])
    np.cumsum(t * y, out=out[1, 1:])
    np.cumsum(c, out=out[2, 1:])
    np.cumsum(c * y, out=out[3, 1:])
    return out[0], out[1], out[2], out[3]
