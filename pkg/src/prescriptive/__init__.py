"""Prescriptive modeling toolkit.

Synthetic data from structural causal models with known counterfactuals,
treatment-effect estimation, predictive and prescriptive targeting policies,
policy evaluation, and the Prescriptive Canvas.
"""
from prescriptive.kernels import BACKEND
from prescriptive.scm import (
    HIGHER_IS_BETTER,
    LOWER_IS_BETTER,
    SCM,
    CovariateCell,
    Dataset,
    ScmConfig,
    build_scm,
    four_segment_preset,
    sample_dataset,
    simpson_preset,
    true_ate,
    true_ite,
)
from prescriptive.learners import FitConfig, LinearModel, fit_logistic, fit_propensity
from prescriptive.uplift import IteModel, ate_ipw, ate_naive, fit_s_learner, fit_t_learner, predict_ite
from prescriptive.policy import DecisionBatch, Policy, decide_budget, decide_predictive, decide_prescriptive, oracle_policy
from prescriptive.evaluation import (
    auuc,
    compliance_report,
    dr_value,
    ips_value,
    oracle_value,
    snips_value,
    uplift_curve,
)
from prescriptive.canvas import Canvas, parse_canvas, render_markdown, serialize_canvas, validate_canvas

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "HIGHER_IS_BETTER",
    "LOWER_IS_BETTER",
    "SCM",
    "CovariateCell",
    "Dataset",
    "ScmConfig",
    "build_scm",
    "four_segment_preset",
    "sample_dataset",
    "simpson_preset",
    "true_ate",
    "true_ite",
    "FitConfig",
    "LinearModel",
    "fit_logistic",
    "fit_propensity",
    "IteModel",
    "ate_ipw",
    "ate_naive",
    "fit_s_learner",
    "fit_t_learner",
    "predict_ite",
    "DecisionBatch",
    "Policy",
    "decide_budget",
    "decide_predictive",
    "decide_prescriptive",
    "oracle_policy",
    "auuc",
    "compliance_report",
    "dr_value",
    "ips_value",
    "oracle_value",
    "snips_value",
    "uplift_curve",
    "Canvas",
    "parse_canvas",
    "render_markdown",
    "serialize_canvas",
    "validate_canvas",
]
