"""Policy scoring: uplift curves, offline policy evaluation, exact oracle values, compliance.

Uplift curves are computed on randomized data: units are ranked by score and,
for each targeted fraction ``q`` with ``k = floor(q*N)``, the cumulative uplift
is ``(r_t/n_t - r_c/n_c) * k`` over the top ``k`` units, where ``r``/``n`` are
positive-outcome counts and arm sizes. Fractions whose top-``k`` lacks one arm
are skipped; ``q = 0`` is always ``(0, 0)``.

Offline estimators (IPS, SNIPS, DR) evaluate deterministic policies on a log of
binary treatments with known or estimated logging propensities.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from prescriptive import kernels
from prescriptive.errors import DuplicateUnitIds, LengthMismatch, SingleArmDataset
from prescriptive.policy import DecisionBatch, Policy, rank_order, top_k
from prescriptive.scm import HIGHER_IS_BETTER, LOWER_IS_BETTER, Dataset

DEFAULT_GRID = tuple(i / 100 for i in range(101))


@dataclass(frozen=True, eq=False)
class UpliftCurve:
    fractions: np.ndarray
    values: np.ndarray
    ate_total: float
    variant: str = "uplift"
    n_units: int = 0

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fractions.tolist(), self.values.tolist()))

    def argmax(self) -> tuple[float, float]:
        i = int(np.argmax(self.values))
        return float(self.fractions[i]), float(self.values[i])

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("q,cumulative_uplift\n")
            for q, u in zip(self.fractions, self.values):
                fh.write(f"{format(q, '.17g')},{format(u, '.17g')}\n")


def _grid(grid) -> np.ndarray:
    g = np.asarray(DEFAULT_GRID if grid is None else grid, dtype=np.float64)
    if np.any((g < 0) | (g > 1)):
        raise ValueError("grid fractions must lie in [0, 1]")
    return np.unique(np.concatenate([[0.0], g, [1.0]]))


def _curve_values(t, y, scores, unit_id, grid, variant, sign):
    order = rank_order(scores, unit_id)
    return _ranked_curve_values(t[order], y[order], grid, variant, sign)


def _ranked_curve_values(t, y, grid, variant, sign):
    nt, rt, nc, rc = kernels.arm_cumsums(t, y)
    n = len(t)
    values = np.full(len(grid), np.nan)
    for i, q in enumerate(grid):
        k = top_k(q, n)
        if q == 0.0 or k == 0:
            values[i] = 0.0 if q == 0.0 else np.nan
            continue
        if nt[k] == 0 or nc[k] == 0:
            continue
        if variant == "qini":
            u = rt[k] - rc[k] * (nt[k] / nc[k])
        else:
            u = (rt[k] / nt[k] - rc[k] / nc[k]) * k
        values[i] = sign * u
    return values


def _check_curve_inputs(dataset, scores):
    t = dataset.treatment
    if not (np.any(t == 1) and np.any(t == 0)):
        raise SingleArmDataset("uplift curves need treated and control units")
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (len(dataset),):
        raise LengthMismatch(f"got {scores.shape} scores for {len(dataset)} units")
    return scores


def uplift_curve(
    dataset: Dataset,
    scores,
    grid=None,
    outcome_direction: str | None = None,
    variant: str = "uplift",
) -> UpliftCurve:
    """Cumulative uplift by targeted fraction; sign flipped for lower-is-better outcomes."""
    if variant not in ("uplift", "qini"):
        raise ValueError(f"unknown variant {variant!r}")
    scores = _check_curve_inputs(dataset, scores)
    direction = outcome_direction or dataset.outcome_direction
    sign = -1.0 if direction == LOWER_IS_BETTER else 1.0
    g = _grid(grid)
    values = _curve_values(dataset.treatment, dataset.outcome, scores, dataset.unit_id, g, variant, sign)
    keep = ~np.isnan(values)
    return UpliftCurve(g[keep], values[keep], float(values[-1]), variant, len(dataset))


def auuc(curve: UpliftCurve) -> float:
    """Trapezoidal area between the curve and the random-targeting diagonal, divided by N."""
    gap = curve.values - curve.fractions * curve.ate_total
    area = float(np.sum(np.diff(curve.fractions) * (gap[1:] + gap[:-1]) / 2.0))
    return area / curve.n_units if curve.n_units else area


@dataclass(frozen=True, eq=False)
class CurveBand:
    fractions: np.ndarray
    std: np.ndarray
    n_boot: int


def bootstrap_band(
    dataset: Dataset,
    scores,
    grid=None,
    n_boot: int = 200,
    seed: int = 0,
    outcome_direction: str | None = None,
    variant: str = "uplift",
) -> CurveBand:
    """Bootstrap standard deviation of the curve value at each grid fraction."""
    scores = _check_curve_inputs(dataset, scores)
    direction = outcome_direction or dataset.outcome_direction
    sign = -1.0 if direction == LOWER_IS_BETTER else 1.0
    g = _grid(grid)
    rng = np.random.default_rng(seed)
    n = len(dataset)
    order = rank_order(scores, dataset.unit_id)
    t, y = dataset.treatment[order], dataset.outcome[order]
    draws = np.empty((n_boot, len(g)))
    for b in range(n_boot):
        # a resample keeps the full-sample ranking; copies of one unit sit next to each other
        counts = np.bincount(rng.integers(0, n, n), minlength=n)[order]
        draws[b] = _ranked_curve_values(np.repeat(t, counts), np.repeat(y, counts), g, variant, sign)
    with np.errstate(invalid="ignore"):
        std = np.nanstd(draws, axis=0, ddof=1)
    return CurveBand(g, std, n_boot)


def diagonal_within_band(curve: UpliftCurve, band: CurveBand, n_sigma: float = 3.0) -> bool:
    """True iff every curve point lies within ``n_sigma`` bootstrap sd of the straight line to the endpoint."""
    std = np.interp(curve.fractions, band.fractions, band.std)
    dev = np.abs(curve.values - curve.fractions * curve.ate_total)
    return bool(np.all(dev <= n_sigma * std + 1e-12))


# --- offline policy evaluation -------------------------------------------------------------


@dataclass(frozen=True)
class OpeEstimate:
    value: float
    method: str
    effective_sample_size: float
    std_error: float
    n: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "effective_sample_size": self.effective_sample_size,
            "std_error": self.std_error,
            "n": self.n,
        }


def _actions(policy, dataset) -> np.ndarray:
    if isinstance(policy, Policy):
        return policy.actions(dataset)
    if isinstance(policy, DecisionBatch):
        if not np.array_equal(policy.unit_id, dataset.unit_id):
            raise LengthMismatch("decisions do not cover the dataset's units in order")
        return np.asarray(policy.action)
    a = np.asarray(policy)
    if a.shape != (len(dataset),):
        raise LengthMismatch(f"got {a.shape} actions for {len(dataset)} units")
    return a


def _match_weights(actions, dataset, propensities):
    e = np.asarray(propensities, dtype=np.float64)
    if e.shape != (len(dataset),):
        raise LengthMismatch(f"got {e.shape} propensities for {len(dataset)} units")
    if np.any(e <= 0) or np.any(e >= 1):
        raise ValueError("logging propensities must lie strictly inside (0, 1); clip them first")
    t = dataset.treatment
    p_logged = np.where(t == 1, e, 1.0 - e)
    return (actions == t) / p_logged


def _ess(w) -> float:
    sq = float(w @ w)
    return float(w.sum() ** 2 / sq) if sq > 0 else 0.0


def _se(terms) -> float:
    n = len(terms)
    return float(terms.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan


def ips_value(policy, logged_dataset: Dataset, logging_propensities) -> OpeEstimate:
    """``mean(1{pi(x)=t} * y / p(t|x))`` with ``p(1|x)=e`` and ``p(0|x)=1-e``."""
    a = _actions(policy, logged_dataset)
    w = _match_weights(a, logged_dataset, logging_propensities)
    terms = w * logged_dataset.outcome
    return OpeEstimate(float(terms.mean()), "ips", _ess(w), _se(terms), len(terms))


def snips_value(policy, logged_dataset: Dataset, logging_propensities) -> OpeEstimate:
    """IPS normalized by the mean importance weight."""
    a = _actions(policy, logged_dataset)
    w = _match_weights(a, logged_dataset, logging_propensities)
    y = logged_dataset.outcome
    wsum = w.sum()
    if wsum == 0:
        return OpeEstimate(math.nan, "snips", 0.0, math.nan, len(w))
    value = float((w @ y) / wsum)
    # delta-method terms of the ratio estimator
    terms = w * (y - value) / w.mean()
    return OpeEstimate(value, "snips", _ess(w), _se(terms), len(w))


def zero_outcome_model(X, t) -> np.ndarray:
    return np.zeros(np.atleast_2d(X).shape[0])


def _as_outcome_fn(outcome_model):
    if hasattr(outcome_model, "outcome"):
        return outcome_model.outcome
    if hasattr(outcome_model, "outcome_model"):
        return outcome_model.outcome_model()
    if callable(outcome_model):
        return outcome_model
    raise TypeError("outcome_model must be callable as mu(X, t)")


def dr_value(policy, logged_dataset: Dataset, logging_propensities, outcome_model) -> OpeEstimate:
    """Doubly robust: ``mean(mu(x, pi(x)) + 1{pi(x)=t} * (y - mu(x, t)) / p(t|x))``."""
    mu = _as_outcome_fn(outcome_model)
    a = _actions(policy, logged_dataset)
    w = _match_weights(a, logged_dataset, logging_propensities)
    X, t, y = logged_dataset.features, logged_dataset.treatment, logged_dataset.outcome
    terms = np.asarray(mu(X, a), dtype=np.float64) + w * (y - np.asarray(mu(X, t), dtype=np.float64))
    return OpeEstimate(float(terms.mean()), "dr", _ess(w), _se(terms), len(terms))


def oracle_value(policy, dataset: Dataset) -> float:
    """Exact value on synthetic data: mean of y1 where the policy treats, y0 elsewhere.

    The raw outcome mean is returned for either outcome direction.
    """
    dataset.require_counterfactuals()
    a = _actions(policy, dataset)
    return float(np.where(a == 1, dataset.y1, dataset.y0).mean())


def incremental_outcome(policy, dataset: Dataset) -> float:
    """Oracle value gain over treating no one, oriented so that positive is good."""
    gain = oracle_value(policy, dataset) - float(dataset.y0.mean())
    return -gain if dataset.outcome_direction == LOWER_IS_BETTER else gain


# --- compliance -------------------------------------------------------------------------------


@dataclass(frozen=True)
class ComplianceReport:
    # table[decision][performed]
    table: dict[int, dict[int, int]]
    compliance_rate: dict[int, float | None]
    interference_breakdown: dict[str, int] = field(default_factory=dict)
    n_joined: int = 0
    unmatched_decisions: int = 0
    unmatched_performed: int = 0

    def to_dict(self) -> dict:
        return {
            "table": {f"decided_{d}": {f"performed_{a}": c for a, c in row.items()} for d, row in self.table.items()},
            "compliance_rate": {f"decided_{d}": r for d, r in self.compliance_rate.items()},
            "interference_breakdown": dict(self.interference_breakdown),
            "n_joined": self.n_joined,
            "unmatched_decisions": self.unmatched_decisions,
            "unmatched_performed": self.unmatched_performed,
        }


def compliance_report(decisions: DecisionBatch, performed_unit_id, performed_action, reasons=None) -> ComplianceReport:
    """Join decisions with performed actions on unit_id and tabulate agreement.

    ``reasons`` optionally labels each performed row; labels on rows whose
    performed action differs from the decision are counted per label. A
    decided action with no joined units has compliance rate ``None``.
    """
    pid = np.asarray(performed_unit_id, dtype=np.int64)
    pact = np.asarray(performed_action, dtype=np.int64)
    if pid.shape != pact.shape:
        raise LengthMismatch("performed unit ids and actions differ in length")
    if reasons is not None and len(reasons) != len(pid):
        raise LengthMismatch("reasons differ in length from performed actions")
    if len(np.unique(pid)) != len(pid):
        raise DuplicateUnitIds("performed actions list a unit more than once")
    if len(np.unique(decisions.unit_id)) != len(decisions.unit_id):
        raise DuplicateUnitIds("decisions list a unit more than once")

    _, di, pi = np.intersect1d(decisions.unit_id, pid, assume_unique=True, return_indices=True)
    decided = np.asarray(decisions.action)[di]
    done = pact[pi]
    table = {d: {a: int(np.sum((decided == d) & (done == a))) for a in (0, 1)} for d in (0, 1)}
    rates = {}
    for d in (0, 1):
        total = table[d][0] + table[d][1]
        rates[d] = table[d][d] / total if total else None
    breakdown: Counter = Counter()
    if reasons is not None:
        labels = np.asarray(reasons, dtype=object)[pi]
        for label, dec, act in zip(labels, decided, done):
            if dec != act and label:
                breakdown[str(label)] += 1
    return ComplianceReport(
        table=table,
        compliance_rate=rates,
        interference_breakdown=dict(sorted(breakdown.items())),
        n_joined=len(di),
        unmatched_decisions=len(decisions.unit_id) - len(di),
        unmatched_performed=len(pid) - len(pi),
    )


# --- export -------------------------------------------------------------------------------------


def curves_to_svg(curves: dict[str, UpliftCurve], width: int = 480, height: int = 320) -> str:
    """Minimal line chart of one or more curves with the random diagonal of the first."""
    pad = 40
    all_vals = np.concatenate([c.values for c in curves.values()] + [np.array([0.0])])
    lo, hi = float(all_vals.min()), float(all_vals.max())
    if hi == lo:
        hi = lo + 1.0

    def xy(q, u):
        x = pad + q * (width - 2 * pad)
        y = height - pad - (u - lo) / (hi - lo) * (height - 2 * pad)
        return f"{x:.2f},{y:.2f}"

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2:.0f}" y="{height - 8}" text-anchor="middle" font-size="12">targeted fraction</text>',
        f'<text x="12" y="{height / 2:.0f}" font-size="12" transform="rotate(-90 12 {height / 2:.0f})" text-anchor="middle">cumulative uplift</text>',
    ]
    first = next(iter(curves.values()), None)
    if first is not None:
        parts.append(
            f'<polyline points="{xy(0, 0)} {xy(1, first.ate_total)}" fill="none" stroke="gray" stroke-dasharray="4 3"/>'
        )
    for i, (name, c) in enumerate(curves.items()):
        color = colors[i % len(colors)]
        pts = " ".join(xy(q, u) for q, u in zip(c.fractions, c.values))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{width - pad - 4}" y="{pad + 14 * (i + 1)}" text-anchor="end" font-size="11" fill="{color}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


__all__ = [
    "ComplianceReport",
    "HIGHER_IS_BETTER",
    "OpeEstimate",
    "UpliftCurve",
    "auuc",
    "bootstrap_band",
    "compliance_report",
    "dr_value",
    "incremental_outcome",
    "ips_value",
    "oracle_value",
    "snips_value",
    "uplift_curve",
    "zero_outcome_model",
]
