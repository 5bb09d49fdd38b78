"""The two end-to-end demonstrations run by ``prescriptive demo``."""
from __future__ import annotations

import numpy as np

from prescriptive.evaluation import incremental_outcome, oracle_value, uplift_curve
from prescriptive.learners import FitConfig, fit_logistic, fit_propensity
from prescriptive.policy import budget_policy, risk
from prescriptive.scm import build_scm, four_segment_preset, simpson_preset
from prescriptive.uplift import ate_ipw, ate_naive, fit_t_learner

CHURN_GRID = tuple(round(0.05 * i, 2) for i in range(1, 21))
WIDE_UNCERTAINTY = 0.02


def run_simpson_demo(seed: int, n: int = 100_000) -> dict:
    """Naive vs inverse-propensity-weighted ATE on the confounded engagement model."""
    scm = build_scm(simpson_preset())
    data = scm.sample(n, seed)
    naive = ate_naive(data)
    ipw_true = ate_ipw(data, data.propensity_true)
    ps_model = fit_propensity(data)
    ipw_fitted = ate_ipw(data, ps_model.predict(data.features))
    truth = scm.true_ate()
    ses = [e.std_error for e in (naive, ipw_true, ipw_fitted)]
    return {
        "n": n,
        "seed": seed,
        "true_ate": truth,
        "exact_naive_contrast": scm.naive_contrast(),
        "naive": naive.to_dict(),
        "ipw_true_propensity": ipw_true.to_dict(),
        "ipw_fitted_propensity": ipw_fitted.to_dict(),
        "sign_flip": bool(np.sign(naive.value) != np.sign(truth)),
        "ipw_sign_correct": bool(np.sign(ipw_true.value) == np.sign(truth)),
        "wide_uncertainty": bool(max(ses) > WIDE_UNCERTAINTY),
    }


def run_churn_demo(seed: int, n: int = 50_000, grid=CHURN_GRID, fit_config: FitConfig | None = None) -> dict:
    """Predictive (risk-ranked) vs prescriptive (effect-ranked) targeting at matching budgets.

    The churn model is fit on control units only, so its predictions describe
    risk without intervention.
    """
    scm = build_scm(four_segment_preset())
    data = scm.sample(n, seed)
    control = data.treatment == 0
    outcome_model = fit_logistic(data.features[control], data.outcome[control], None, fit_config)
    ite_model = fit_t_learner(data, fit_config)

    rows = []
    for q in grid:
        pred = budget_policy(outcome_model, q, outcome_direction=data.outcome_direction)
        presc = budget_policy(ite_model, q, outcome_direction=data.outcome_direction)
        rows.append(
            {
                "q": q,
                "predictive_value": oracle_value(pred, data),
                "prescriptive_value": oracle_value(presc, data),
                "predictive_incremental": incremental_outcome(pred, data) * n,
                "prescriptive_incremental": incremental_outcome(presc, data) * n,
            }
        )
    risk_scores = risk(outcome_model.predict_proba(data.features), data.outcome_direction)
    effect_scores = ite_model.predict(data.features)
    curves = {
        "predictive": uplift_curve(data, risk_scores),
        "prescriptive": uplift_curve(data, effect_scores),
    }
    at_quarter = next((r for r in rows if abs(r["q"] - 0.25) < 1e-12), None)
    ratio = None
    if at_quarter is not None and at_quarter["predictive_incremental"] > 0:
        ratio = at_quarter["prescriptive_incremental"] / at_quarter["predictive_incremental"]
    return {
        "n": n,
        "seed": seed,
        "baseline_value": float(data.y0.mean()),
        "rows": rows,
        "at_q_0.25": at_quarter,
        "incremental_ratio_at_q_0.25": ratio,
        "prescriptive_dominates": all(r["prescriptive_value"] >= r["predictive_value"] for r in rows),
        "curves": curves,
        "models": {"outcome": outcome_model, "ite": ite_model},
    }
