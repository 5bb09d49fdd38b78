"""Deterministic targeting policies and the decisions they render.

* predictive: treat when the predicted risk of a bad outcome exceeds a threshold.
* prescriptive: treat when the estimated benefit of treating exceeds a threshold.
* budget: treat the top fraction of units ranked by score.
* oracle: treat when the true benefit is positive (synthetic data only).

Every threshold comparison is strict, so a unit sitting exactly on the
threshold is not treated. Ranking ties are broken by ascending ``unit_id``.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from prescriptive.errors import LengthMismatch, MissingCounterfactuals
from prescriptive.learners import LinearModel
from prescriptive.scm import HIGHER_IS_BETTER, LOWER_IS_BETTER, OUTCOME_DIRECTIONS, Dataset
from prescriptive.uplift import IteModel

KINDS = ("predictive", "prescriptive", "budget", "oracle")


def risk(outcome_probability, outcome_direction: str) -> np.ndarray:
    """Probability of the bad outcome: the prediction itself when lower is better, else its complement."""
    p = np.asarray(outcome_probability, dtype=np.float64)
    return p if outcome_direction == LOWER_IS_BETTER else 1.0 - p


def benefit(tau, outcome_direction: str) -> np.ndarray:
    """Effect of treating expressed so that larger is better."""
    tau = np.asarray(tau, dtype=np.float64)
    return -tau if outcome_direction == LOWER_IS_BETTER else tau


def cost_aware_scores(benefit_scores, unit_value: float, action_cost: float) -> np.ndarray:
    """Net value of treating; with ``positive_only`` budget selection treats iff value*benefit > cost."""
    return np.asarray(benefit_scores, dtype=np.float64) * unit_value - action_cost


def rank_order(scores, unit_id) -> np.ndarray:
    """Indices sorted by score descending, ties by unit_id ascending."""
    return np.lexsort((np.asarray(unit_id), -np.asarray(scores, dtype=np.float64)))


def top_k(fraction: float, n: int) -> int:
    # rounding guards against q*N landing a hair below an integer, e.g. 0.29*100
    return int(math.floor(round(fraction * n, 9)))


def select_top_fraction(scores, unit_id, fraction: float, positive_only: bool = False) -> np.ndarray:
    """0/1 actions treating the top ``floor(fraction * N)`` units by score."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")
    scores = np.asarray(scores, dtype=np.float64)
    n = len(scores)
    if len(unit_id) != n:
        raise LengthMismatch("scores and unit_id lengths differ")
    k = top_k(fraction, n)
    actions = np.zeros(n, dtype=np.int64)
    actions[rank_order(scores, unit_id)[:k]] = 1
    if positive_only:
        actions[scores <= 0] = 0
    return actions


@dataclass(frozen=True)
class DecisionBatch:
    unit_id: np.ndarray
    score: np.ndarray
    action: np.ndarray
    policy_id: str
    decided_at: str

    def __post_init__(self):
        if len(np.unique(self.unit_id)) != len(self.unit_id):
            raise ValueError("a decision batch holds one decision per unit_id")

    def __len__(self):
        return len(self.unit_id)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("unit_id,score,action,policy_id,decided_at\n")
            for uid, s, a in zip(self.unit_id, self.score, self.action):
                fh.write(f"{uid},{format(s, '.17g')},{a},{self.policy_id},{self.decided_at}\n")

    @classmethod
    def from_csv(cls, path) -> "DecisionBatch":
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
        policy_ids = {r["policy_id"] for r in rows}
        stamps = {r["decided_at"] for r in rows}
        if len(policy_ids) > 1 or len(stamps) > 1:
            raise ValueError("a decision batch holds decisions from a single policy run")
        return cls(
            unit_id=np.array([int(r["unit_id"]) for r in rows], dtype=np.int64),
            score=np.array([float(r["score"]) for r in rows], dtype=np.float64),
            action=np.array([int(r["action"]) for r in rows], dtype=np.int64),
            policy_id=policy_ids.pop() if policy_ids else "",
            decided_at=stamps.pop() if stamps else "",
        )


@dataclass(frozen=True, eq=False)
class Policy:
    """A deterministic decision rule.

    ``model`` is a :class:`LinearModel` outcome model for predictive policies,
    an :class:`IteModel` for prescriptive ones, and either for budget policies
    (ranking by risk or by benefit respectively). Oracle policies read the true
    effects off the dataset they are applied to.
    """

    kind: str
    model: LinearModel | IteModel | None = None
    threshold: float = 0.0
    fraction: float | None = None
    positive_only: bool = False
    outcome_direction: str = HIGHER_IS_BETTER
    policy_id: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.outcome_direction not in OUTCOME_DIRECTIONS:
            raise ValueError(f"unknown outcome_direction {self.outcome_direction!r}")
        if self.kind == "budget" and self.fraction is None:
            raise ValueError("budget policies need a target fraction")
        if self.kind in ("predictive", "prescriptive", "budget") and self.model is None:
            raise ValueError(f"{self.kind} policies need a fitted model")
        if not self.policy_id:
            object.__setattr__(self, "policy_id", self._default_id())

    def _default_id(self) -> str:
        if self.kind == "budget" or (self.kind == "oracle" and self.fraction is not None):
            return f"{self.kind}-q{self.fraction:g}"
        if self.kind == "oracle":
            return "oracle"
        return f"{self.kind}-t{self.threshold:g}"

    def scores(self, dataset: Dataset) -> np.ndarray:
        """Per-unit score the rule compares: risk for outcome models, benefit otherwise."""
        if self.kind == "oracle":
            dataset.require_counterfactuals()
            if dataset.tau_true is None:
                raise MissingCounterfactuals("oracle policies need true effects")
            return benefit(dataset.tau_true, self.outcome_direction)
        if isinstance(self.model, IteModel):
            return benefit(self.model.predict(dataset.features), self.outcome_direction)
        return risk(self.model.predict_proba(dataset.features), self.outcome_direction)

    def actions_from_scores(self, scores, unit_id) -> np.ndarray:
        if self.fraction is not None and self.kind in ("budget", "oracle"):
            return select_top_fraction(scores, unit_id, self.fraction, self.positive_only)
        return (np.asarray(scores) > self.threshold).astype(np.int64)

    def actions(self, dataset: Dataset) -> np.ndarray:
        return self.actions_from_scores(self.scores(dataset), dataset.unit_id)

    def decide(self, dataset: Dataset, decided_at: str | None = None) -> DecisionBatch:
        scores = self.scores(dataset)
        return DecisionBatch(
            unit_id=dataset.unit_id.copy(),
            score=scores,
            action=self.actions_from_scores(scores, dataset.unit_id),
            policy_id=self.policy_id,
            decided_at=decided_at or datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )

    def config_dict(self) -> dict:
        return {
            "kind": self.kind,
            "threshold": self.threshold,
            "fraction": self.fraction,
            "positive_only": self.positive_only,
            "outcome_direction": self.outcome_direction,
            "policy_id": self.policy_id,
            "model": None if self.model is None else self.model.to_dict(),
            "model_type": None if self.model is None else ("ite" if isinstance(self.model, IteModel) else "outcome"),
        }

    def to_json(self) -> str:
        return json.dumps(self.config_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Policy":
        d = json.loads(text)
        model = None
        if d.get("model") is not None:
            model = IteModel.from_dict(d["model"]) if d["model_type"] == "ite" else LinearModel.from_dict(d["model"])
        return cls(
            kind=d["kind"],
            model=model,
            threshold=float(d.get("threshold", 0.0)),
            fraction=d.get("fraction"),
            positive_only=bool(d.get("positive_only", False)),
            outcome_direction=d.get("outcome_direction", HIGHER_IS_BETTER),
            policy_id=d.get("policy_id", ""),
        )


def _check_threshold(t):
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {t}")


def predictive_policy(outcome_model: LinearModel, threshold: float, outcome_direction: str = HIGHER_IS_BETTER) -> Policy:
    _check_threshold(threshold)
    return Policy("predictive", outcome_model, threshold=threshold, outcome_direction=outcome_direction)


def prescriptive_policy(ite_model: IteModel, threshold: float = 0.0, outcome_direction: str = HIGHER_IS_BETTER) -> Policy:
    return Policy("prescriptive", ite_model, threshold=threshold, outcome_direction=outcome_direction)


def budget_policy(
    model: LinearModel | IteModel,
    fraction: float,
    positive_only: bool = False,
    outcome_direction: str = HIGHER_IS_BETTER,
) -> Policy:
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")
    return Policy("budget", model, fraction=fraction, positive_only=positive_only, outcome_direction=outcome_direction)


def oracle_policy(dataset: Dataset, fraction: float | None = None, positive_only: bool = True) -> Policy:
    """Treat iff the true benefit is positive; the per-unit optimum without action costs."""
    dataset.require_counterfactuals()
    if dataset.tau_true is None:
        raise MissingCounterfactuals("oracle policies need true effects")
    return Policy("oracle", None, fraction=fraction, positive_only=positive_only, outcome_direction=dataset.outcome_direction)


def decide_predictive(outcome_model: LinearModel, threshold: float, units: Dataset, decided_at: str | None = None) -> DecisionBatch:
    return predictive_policy(outcome_model, threshold, units.outcome_direction).decide(units, decided_at)


def decide_prescriptive(ite_model: IteModel, units: Dataset, threshold: float = 0.0, decided_at: str | None = None) -> DecisionBatch:
    return prescriptive_policy(ite_model, threshold, units.outcome_direction).decide(units, decided_at)


def decide_budget(
    ite_model: IteModel | LinearModel,
    units: Dataset,
    target_fraction: float,
    positive_only: bool = False,
    decided_at: str | None = None,
) -> DecisionBatch:
    return budget_policy(ite_model, target_fraction, positive_only, units.outcome_direction).decide(units, decided_at)
