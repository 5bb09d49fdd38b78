"""Regularized logistic regression fit by full-batch gradient descent.

This is the only base learner in the package: outcome models, propensity
models and the components of the meta-learners are all instances of it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from prescriptive import kernels
from prescriptive.errors import DegenerateLabels, DimensionMismatch, NonFiniteInput, SingleArmDataset
from prescriptive.scm import Dataset


@dataclass(frozen=True)
class FitConfig:
    learning_rate: float = 0.1
    max_iterations: int = 2000
    tolerance: float = 1e-8
    l2: float = 1e-3
    standardize: bool = False

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Fitted logistic model ``sigmoid(x . weights + bias)``.

    When fit with ``standardize=True`` the model stores the column centering
    and scaling and applies it before the linear map.
    """

    weights: np.ndarray
    bias: float
    l2: float = 0.0
    iterations_run: int = 0
    final_loss: float = 0.0
    feature_mean: np.ndarray | None = None
    feature_scale: np.ndarray | None = None
    loss_history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def feature_count(self) -> int:
        return len(self.weights)

    def decision_function(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.feature_count:
            raise DimensionMismatch(f"expected {self.feature_count} features, got {X.shape[1]}")
        if self.feature_mean is not None:
            X = (X - self.feature_mean) / self.feature_scale
        z = X @ self.weights + self.bias
        return z[0] if single else z

    def predict_proba(self, X) -> np.ndarray:
        z = self.decision_function(X)
        return 0.5 * (1.0 + np.tanh(0.5 * z))

    def same_parameters(self, other: "LinearModel") -> bool:
        return (
            np.array_equal(self.weights, other.weights)
            and self.bias == other.bias
            and self.l2 == other.l2
        )

    def to_dict(self) -> dict:
        d = {
            "feature_count": self.feature_count,
            "weights": [float(w) for w in self.weights],
            "bias": float(self.bias),
            "l2": float(self.l2),
            "iterations_run": int(self.iterations_run),
            "final_loss": float(self.final_loss),
        }
        if self.feature_mean is not None:
            d["feature_mean"] = [float(v) for v in self.feature_mean]
            d["feature_scale"] = [float(v) for v in self.feature_scale]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LinearModel":
        weights = np.asarray(d["weights"], dtype=np.float64)
        if len(weights) != d.get("feature_count", len(weights)):
            raise DimensionMismatch("weights length disagrees with feature_count")
        mean = d.get("feature_mean")
        return cls(
            weights=weights,
            bias=float(d["bias"]),
            l2=float(d.get("l2", 0.0)),
            iterations_run=int(d.get("iterations_run", 0)),
            final_loss=float(d.get("final_loss", 0.0)),
            feature_mean=None if mean is None else np.asarray(mean, dtype=np.float64),
            feature_scale=None if mean is None else np.asarray(d["feature_scale"], dtype=np.float64),
        )


def predict_proba(model: LinearModel, x) -> np.ndarray:
    return model.predict_proba(x)


def _check_xy(X, y, sample_weights):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"X must be 2-D, got shape {X.shape}")
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (X.shape[0],):
        raise DimensionMismatch(f"y has shape {y.shape}, expected ({X.shape[0]},)")
    if sample_weights is None:
        sample_weights = np.ones(X.shape[0])
    sample_weights = np.asarray(sample_weights, dtype=np.float64)
    if sample_weights.shape != (X.shape[0],):
        raise DimensionMismatch(f"sample_weights has shape {sample_weights.shape}, expected ({X.shape[0]},)")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y)) and np.all(np.isfinite(sample_weights))):
        raise NonFiniteInput("inputs must be finite")
    if np.any(sample_weights < 0) or not np.any(sample_weights > 0):
        raise ValueError("sample_weights must be non-negative and not all zero")
    return X, y, sample_weights


def loss_and_gradient(weights, bias, X, y, sample_weights=None, l2=0.0):
    """Weighted mean cross-entropy plus ``(l2/2)*|weights|^2``, and its exact gradient.

    The bias is not penalized. The gradient has length ``d + 1``; the last
    entry is the bias derivative.
    """
    X, y, sample_weights = _check_xy(X, y, sample_weights)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (X.shape[1],):
        raise DimensionMismatch(f"weights have shape {weights.shape}, expected ({X.shape[1]},)")
    return kernels.logistic_loss_grad(X, y, sample_weights, weights, bias, l2)


def fit_logistic(X, y, sample_weights=None, config: FitConfig | None = None) -> LinearModel:
    """Fit from zero initialization by full-batch gradient descent.

    Stops once an iteration lowers the loss by less than ``config.tolerance``
    or after ``config.max_iterations`` steps.
    """
    config = config or FitConfig()
    X, y, sample_weights = _check_xy(X, y, sample_weights)
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    labels = np.unique(y[sample_weights > 0])
    if len(labels) < 2 and config.l2 == 0:
        raise DegenerateLabels("a single label class with l2=0 has no finite optimum")

    mean = scale = None
    if config.standardize:
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0] = 1.0
        X = (X - mean) / scale
    X = np.ascontiguousarray(X)

    d = X.shape[1]
    w = np.zeros(d)
    b = 0.0
    lr = config.learning_rate
    loss, grad = kernels.logistic_loss_grad(X, y, sample_weights, w, b, config.l2)
    history = [loss]
    it = 0
    while it < config.max_iterations:
        it += 1
        w = w - lr * grad[:d]
        b = b - lr * grad[d]
        new_loss, grad = kernels.logistic_loss_grad(X, y, sample_weights, w, b, config.l2)
        history.append(new_loss)
        decrease = loss - new_loss
        loss = new_loss
        if decrease < config.tolerance:
            break

    if not (np.all(np.isfinite(w)) and np.isfinite(b) and np.isfinite(loss)):
        raise NonFiniteInput("gradient descent diverged; lower the learning rate")
    return LinearModel(
        weights=w,
        bias=float(b),
        l2=config.l2,
        iterations_run=it,
        final_loss=float(loss),
        feature_mean=mean,
        feature_scale=scale,
        loss_history=tuple(history),
    )


@dataclass(frozen=True, eq=False)
class PropensityModel:
    """Logistic model of P(T=1|x) whose predictions are clipped to ``clip``."""

    model: LinearModel
    clip: tuple[float, float] = (0.01, 0.99)
    calibration: tuple[dict, ...] = field(default=(), repr=False)

    def predict(self, X) -> np.ndarray:
        lo, hi = self.clip
        return np.clip(self.model.predict_proba(X), lo, hi)

    def predict_raw(self, X) -> np.ndarray:
        return self.model.predict_proba(X)

    def to_dict(self) -> dict:
        return {**self.model.to_dict(), "clip": list(self.clip)}

    @classmethod
    def from_dict(cls, d: dict) -> "PropensityModel":
        return cls(LinearModel.from_dict(d), tuple(d.get("clip", (0.01, 0.99))))


def calibration_by_decile(predicted, treatment) -> tuple[dict, ...]:
    """Mean predicted vs observed treatment rate within each predicted-propensity decile."""
    predicted = np.asarray(predicted, dtype=np.float64)
    treatment = np.asarray(treatment)
    order = np.argsort(predicted, kind="stable")
    rows = []
    for i, idx in enumerate(np.array_split(order, 10)):
        if len(idx) == 0:
            continue
        rows.append(
            {
                "decile": i + 1,
                "count": int(len(idx)),
                "mean_predicted": float(predicted[idx].mean()),
                "observed_rate": float(treatment[idx].mean()),
            }
        )
    return tuple(rows)


def fit_propensity(
    dataset: Dataset,
    config: FitConfig | None = None,
    clip: tuple[float, float] = (0.01, 0.99),
) -> PropensityModel:
    lo, hi = clip
    if not 0 <= lo < hi <= 1:
        raise ValueError(f"invalid clip range {clip}")
    t = dataset.treatment
    if t.min(initial=1) == t.max(initial=0):
        raise SingleArmDataset("propensity fitting needs treated and control units")
    model = fit_logistic(dataset.features, t, None, config)
    calib = calibration_by_decile(model.predict_proba(dataset.features), t)
    return PropensityModel(model, (float(lo), float(hi)), calib)


def ipw_weights(treatment, propensity) -> np.ndarray:
    """1/e for treated units and 1/(1-e) for control units."""
    t = np.asarray(treatment)
    e = np.asarray(propensity, dtype=np.float64)
    if t.shape != e.shape:
        raise DimensionMismatch("treatment and propensity lengths differ")
    return np.where(t == 1, 1.0 / e, 1.0 / (1.0 - e))


def save_model(model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_linear_model(path) -> LinearModel:
    with open(path, encoding="utf-8") as fh:
        return LinearModel.from_dict(json.load(fh))


def load_propensity_model(path) -> PropensityModel:
    with open(path, encoding="utf-8") as fh:
        return PropensityModel.from_dict(json.load(fh))
