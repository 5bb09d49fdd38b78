"""Average and individual treatment effect estimation.

ATE: the raw arm contrast and the Horvitz-Thompson inverse-propensity
estimator. ITE: T-learner (one outcome model per arm) and S-learner (one model
on features, treatment indicator and their interactions). For observational
data, pass inverse-propensity weights as ``sample_weights`` to the learners.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from prescriptive.errors import DimensionMismatch, LengthMismatch, SingleArmDataset
from prescriptive.learners import FitConfig, LinearModel, fit_logistic
from prescriptive.scm import Dataset


@dataclass(frozen=True)
class AteEstimate:
    value: float
    method: str
    n_used: int
    std_error: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "n_used": self.n_used,
            "std_error": self.std_error if math.isfinite(self.std_error) else None,
        }


def _require_both_arms(t):
    if not (np.any(t == 1) and np.any(t == 0)):
        raise SingleArmDataset("estimation needs treated and control units")


def ate_naive(dataset: Dataset) -> AteEstimate:
    """Difference of outcome means between treated and control units."""
    t, y = dataset.treatment, dataset.outcome
    _require_both_arms(t)
    y1, y0 = y[t == 1], y[t == 0]
    se = math.sqrt(y1.var(ddof=1) / len(y1) + y0.var(ddof=1) / len(y0)) if min(len(y1), len(y0)) > 1 else math.nan
    return AteEstimate(float(y1.mean() - y0.mean()), "naive", len(y), se)


def ate_ipw(dataset: Dataset, propensities) -> AteEstimate:
    """Horvitz-Thompson estimate ``mean(T*y/e - (1-T)*y/(1-e))``."""
    e = np.asarray(propensities, dtype=np.float64)
    if e.shape != (len(dataset),):
        raise LengthMismatch(f"got {e.shape} propensities for {len(dataset)} units")
    if np.any(e <= 0) or np.any(e >= 1):
        raise ValueError("propensities must lie strictly inside (0, 1); clip them first")
    t, y = dataset.treatment, dataset.outcome
    terms = t * y / e - (1 - t) * y / (1.0 - e)
    n = len(terms)
    se = float(terms.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    return AteEstimate(float(terms.mean()), "ipw", n, se)


@dataclass(frozen=True, eq=False)
class IteModel:
    """Fitted meta-learner. ``kind`` is ``"t"`` (mu1, mu0) or ``"s"`` (mu)."""

    kind: str
    feature_count: int
    mu1: LinearModel | None = None
    mu0: LinearModel | None = None
    mu: LinearModel | None = None
    interactions: bool = True

    def _s_design(self, X, t):
        t = np.broadcast_to(np.asarray(t, dtype=np.float64), (X.shape[0],))[:, None]
        cols = [X, t]
        if self.interactions:
            cols.append(X * t)
        return np.hstack(cols)

    def _matrix(self, X):
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.feature_count:
            raise DimensionMismatch(f"expected {self.feature_count} features, got {X.shape[1]}")
        return X, single

    def outcome(self, X, t) -> np.ndarray:
        """Predicted P(Y=1 | x, T=t); ``t`` is a scalar or per-row array."""
        X, single = self._matrix(X)
        if self.kind == "t":
            t = np.broadcast_to(np.asarray(t), (X.shape[0],))
            out = np.where(t == 1, self.mu1.predict_proba(X), self.mu0.predict_proba(X))
        else:
            out = self.mu.predict_proba(self._s_design(X, t))
        return out[0] if single else out

    def predict(self, X) -> np.ndarray:
        X, single = self._matrix(X)
        if self.kind == "t":
            tau = self.mu1.predict_proba(X) - self.mu0.predict_proba(X)
        else:
            tau = self.mu.predict_proba(self._s_design(X, 1)) - self.mu.predict_proba(self._s_design(X, 0))
        tau = np.clip(tau, -1.0, 1.0)
        return tau[0] if single else tau

    @property
    def treatment_weight(self) -> float:
        """S-learner coefficient on the treatment indicator."""
        if self.kind != "s":
            raise AttributeError("only S-learners have a treatment weight")
        return float(self.mu.weights[self.feature_count])

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "feature_count": self.feature_count}
        if self.kind == "t":
            d["mu1"] = self.mu1.to_dict()
            d["mu0"] = self.mu0.to_dict()
        else:
            d["mu"] = self.mu.to_dict()
            d["interactions"] = self.interactions
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "IteModel":
        if d["kind"] == "t":
            return cls("t", int(d["feature_count"]), mu1=LinearModel.from_dict(d["mu1"]), mu0=LinearModel.from_dict(d["mu0"]))
        if d["kind"] == "s":
            return cls("s", int(d["feature_count"]), mu=LinearModel.from_dict(d["mu"]), interactions=bool(d.get("interactions", True)))
        raise ValueError(f"unknown learner kind {d['kind']!r}")

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "IteModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def predict_ite(model: IteModel, x) -> np.ndarray:
    return model.predict(x)


def fit_t_learner(dataset: Dataset, fit_config: FitConfig | None = None, sample_weights=None) -> IteModel:
    t = dataset.treatment
    _require_both_arms(t)
    w = np.ones(len(t)) if sample_weights is None else np.asarray(sample_weights, dtype=np.float64)
    if w.shape != t.shape:
        raise LengthMismatch("sample_weights length differs from dataset size")
    X, y = dataset.features, dataset.outcome
    treated, control = t == 1, t == 0
    mu1 = fit_logistic(X[treated], y[treated], w[treated], fit_config)
    mu0 = fit_logistic(X[control], y[control], w[control], fit_config)
    return IteModel("t", dataset.n_features, mu1=mu1, mu0=mu0)


def fit_s_learner(
    dataset: Dataset,
    fit_config: FitConfig | None = None,
    sample_weights=None,
    interactions: bool = True,
) -> IteModel:
    """Single model on ``[x, T, T*x]`` (``[x, T]`` with ``interactions=False``).

    Without the interaction block a logistic S-learner can only shift every
    unit's logit by the same amount, so the sign of the estimated effect would
    be identical for all units.
    """
    t = dataset.treatment
    _require_both_arms(t)
    shell = IteModel("s", dataset.n_features, interactions=interactions)
    Z = shell._s_design(dataset.features, t)
    mu = fit_logistic(Z, dataset.outcome, sample_weights, fit_config)
    return IteModel("s", dataset.n_features, mu=mu, interactions=interactions)


def fit_learner(kind: str, dataset: Dataset, fit_config: FitConfig | None = None, sample_weights=None) -> IteModel:
    if kind == "t":
        return fit_t_learner(dataset, fit_config, sample_weights)
    if kind == "s":
        return fit_s_learner(dataset, fit_config, sample_weights)
    raise ValueError(f"unknown learner {kind!r}; choose 't' or 's'")
