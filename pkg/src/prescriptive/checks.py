"""Data diagnostics for the identification assumptions that can be probed from data.

Positivity is checked from propensities and per-stratum arm counts, covariate
balance via standardized mean differences, and consistency (on synthetic data)
by comparing observed outcomes with the potential outcome of the received arm.
Absence of hidden confounding cannot be tested from data and is not attempted.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from prescriptive.errors import LengthMismatch, SingleArmDataset
from prescriptive.learners import PropensityModel
from prescriptive.scm import Dataset

PASS, WARN, FAIL = "pass", "warn", "fail"


@dataclass(frozen=True)
class PositivityReport:
    min_propensity: float
    max_propensity: float
    fraction_below_eps: float
    fraction_above_one_minus_eps: float
    eps: float
    fail_threshold: float
    per_cell_arm_counts: dict[str, dict[str, int]] = field(default_factory=dict)
    verdict: str = PASS

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BalanceReport:
    feature_names: tuple[str, ...]
    smd_unweighted: tuple[float, ...]
    smd_weighted: tuple[float, ...] | None
    max_abs_smd_unweighted: float
    max_abs_smd_weighted: float | None

    def to_dict(self) -> dict:
        # JSON has no infinity; the zero-variance sentinel is written as a string
        enc = lambda v: v if v is None or math.isfinite(v) else ("inf" if v > 0 else "-inf")  # noqa: E731
        return {
            "features": [
                {
                    "name": name,
                    "smd_unweighted": enc(u),
                    "smd_weighted": None if self.smd_weighted is None else enc(self.smd_weighted[i]),
                }
                for i, (name, u) in enumerate(zip(self.feature_names, self.smd_unweighted))
            ],
            "max_abs_smd_unweighted": enc(self.max_abs_smd_unweighted),
            "max_abs_smd_weighted": enc(self.max_abs_smd_weighted),
        }


def _propensities(dataset, propensity) -> np.ndarray:
    if isinstance(propensity, PropensityModel):
        return propensity.predict_raw(dataset.features)
    if hasattr(propensity, "predict_proba"):
        return propensity.predict_proba(dataset.features)
    e = np.asarray(propensity, dtype=np.float64)
    if e.shape != (len(dataset),):
        raise LengthMismatch(f"got {e.shape[0]} propensities for {len(dataset)} units")
    return e


def positivity_report(
    dataset: Dataset,
    propensity,
    eps: float = 0.05,
    fail_threshold: float = 0.02,
) -> PositivityReport:
    """Overlap diagnostics.

    ``propensity`` is a fitted propensity model (its unclipped predictions are
    inspected) or an array of per-unit propensities.

    Verdict is ``fail`` when a stratum has an empty arm or when the share of
    units outside ``[eps, 1 - eps]`` exceeds ``fail_threshold``; ``warn`` when
    that share is positive but below the threshold.
    """
    if not 0 <= eps < 0.5:
        raise ValueError(f"eps must lie in [0, 0.5), got {eps}")
    e = _propensities(dataset, propensity)
    n = len(dataset)
    below = float(np.mean(e < eps)) if n else 0.0
    above = float(np.mean(e > 1 - eps)) if n else 0.0

    counts: dict[str, dict[str, int]] = {}
    strata = dataset.strata()
    empty_arm = False
    if strata is not None:
        for k in range(dataset.n_categorical):
            in_k = strata == k
            treated = int(np.sum(dataset.treatment[in_k] == 1))
            control = int(np.sum(dataset.treatment[in_k] == 0))
            counts[dataset.feature_names[k]] = {"treated": treated, "control": control}
            # strata with no units at all say nothing about overlap
            if treated + control > 0 and (treated == 0 or control == 0):
                empty_arm = True

    if empty_arm or below + above > fail_threshold:
        verdict = FAIL
    elif below + above > 0:
        verdict = WARN
    else:
        verdict = PASS
    return PositivityReport(
        min_propensity=float(e.min()) if n else float("nan"),
        max_propensity=float(e.max()) if n else float("nan"),
        fraction_below_eps=below,
        fraction_above_one_minus_eps=above,
        eps=eps,
        fail_threshold=fail_threshold,
        per_cell_arm_counts=counts,
        verdict=verdict,
    )


def _weighted_moments(X, w):
    wsum = w.sum()
    mean = (w @ X) / wsum
    var = (w @ (X - mean) ** 2) / wsum
    return mean, var


def _smd(X, t, w):
    mt, vt = _weighted_moments(X[t == 1], w[t == 1])
    mc, vc = _weighted_moments(X[t == 0], w[t == 0])
    diff = mt - mc
    sd = np.sqrt((vt + vc) / 2.0)
    out = np.empty_like(diff)
    for j in range(len(diff)):
        if sd[j] > 0:
            out[j] = diff[j] / sd[j]
        else:
            out[j] = 0.0 if diff[j] == 0 else math.copysign(math.inf, diff[j])
    return out


def balance_report(dataset: Dataset, weights=None) -> BalanceReport:
    """Standardized mean differences, treated minus control, over the pooled standard deviation.

    With ``weights`` the weighted variant is reported alongside; each arm's
    weights are normalized by that arm's weight sum.
    """
    t = dataset.treatment
    if not (np.any(t == 1) and np.any(t == 0)):
        raise SingleArmDataset("balance needs treated and control units")
    X = dataset.features
    unweighted = _smd(X, t, np.ones(len(t)))
    weighted = None
    if weights is not None:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != t.shape:
            raise LengthMismatch(f"got {w.shape[0]} weights for {len(t)} units")
        if np.any(w < 0) or not (w[t == 1].sum() > 0 and w[t == 0].sum() > 0):
            raise ValueError("weights must be non-negative and not all zero within an arm")
        weighted = _smd(X, t, w)

    def max_abs(v):
        return float(np.max(np.abs(v))) if len(v) else 0.0

    return BalanceReport(
        feature_names=tuple(dataset.feature_names),
        smd_unweighted=tuple(float(v) for v in unweighted),
        smd_weighted=None if weighted is None else tuple(float(v) for v in weighted),
        max_abs_smd_unweighted=max_abs(unweighted),
        max_abs_smd_weighted=None if weighted is None else max_abs(weighted),
    )


def consistency_check(dataset: Dataset) -> bool:
    """True iff every observed outcome equals the potential outcome of the received arm."""
    dataset.require_counterfactuals()
    expected = np.where(dataset.treatment == 1, dataset.y1, dataset.y0)
    return bool(np.array_equal(dataset.outcome, expected))
