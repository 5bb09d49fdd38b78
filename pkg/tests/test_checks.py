import dataclasses
import json
import math

import numpy as np
import pytest

from prescriptive.checks import balance_report, consistency_check, positivity_report
from prescriptive.errors import MissingCounterfactuals, SingleArmDataset
from prescriptive.learners import fit_propensity, ipw_weights
from prescriptive.scm import Dataset, build_scm, four_segment_preset, null_preset, with_positivity_violation


@pytest.fixture(scope="module")
def rct_100k():
    return build_scm(four_segment_preset()).sample(100_000, 21)


def test_rct_positivity_passes(rct_100k):
    report = positivity_report(rct_100k, fit_propensity(rct_100k))
    assert report.verdict == "pass"
    assert report.fraction_below_eps == 0 and report.fraction_above_one_minus_eps == 0
    assert 0.45 < report.min_propensity <= report.max_propensity < 0.55
    assert set(report.per_cell_arm_counts) == {f"cell={c}" for c in ("persuadable", "sure_thing", "lost_cause", "sleeping_dog")}


def test_never_treated_cell_fails():
    scm = build_scm(with_positivity_violation(four_segment_preset(), "lost_cause"))
    data = scm.sample(20_000, 3)
    report = positivity_report(data, data.propensity_true)
    assert report.verdict == "fail"
    assert report.per_cell_arm_counts["cell=lost_cause"]["treated"] == 0
    assert report.per_cell_arm_counts["cell=persuadable"]["treated"] > 0


def test_zero_eps_depends_only_on_arm_counts(rct_100k):
    report = positivity_report(rct_100k, rct_100k.propensity_true, eps=0.0)
    assert report.fraction_below_eps == 0 and report.fraction_above_one_minus_eps == 0
    assert report.verdict == "pass"
    bad = build_scm(with_positivity_violation(four_segment_preset(), "sure_thing")).sample(5000, 1)
    assert positivity_report(bad, bad.propensity_true, eps=0.0).verdict == "fail"


def test_warn_band():
    rng = np.random.default_rng(0)
    n = 1000
    e = np.full(n, 0.5)
    e[:10] = 0.01  # 1% below eps, under the 2% fail threshold
    ds = Dataset(unit_id=np.arange(n), features=rng.standard_normal((n, 1)), treatment=rng.integers(0, 2, n), outcome=np.zeros(n))
    assert positivity_report(ds, e).verdict == "warn"
    e[:30] = 0.01
    assert positivity_report(ds, e).verdict == "fail"


def test_shrinking_eps_never_turns_pass_into_fail(simpson_data):
    e = simpson_data.propensity_true
    verdicts = [positivity_report(simpson_data, e, eps=eps).verdict for eps in (0.3, 0.25, 0.2, 0.1, 0.05, 0.0)]
    order = {"pass": 0, "warn": 1, "fail": 2}
    ranks = [order[v] for v in verdicts]
    assert ranks == sorted(ranks, reverse=True)
    assert verdicts[0] == "fail" and verdicts[-1] == "pass"


def test_report_serializes(rct_100k):
    json.dumps(positivity_report(rct_100k, rct_100k.propensity_true).to_dict())
    json.dumps(balance_report(rct_100k, np.ones(len(rct_100k))).to_dict())


def test_rct_is_balanced(rct_100k):
    assert balance_report(rct_100k).max_abs_smd_unweighted < 0.03


def test_ipw_restores_balance(simpson_data):
    w = ipw_weights(simpson_data.treatment, simpson_data.propensity_true)
    report = balance_report(simpson_data, w)
    assert abs(report.smd_unweighted[0]) > 0.5
    assert report.max_abs_smd_unweighted > 0.5
    assert report.max_abs_smd_weighted < 0.05


def test_smd_against_textbook_formula(simpson_data):
    x = simpson_data.features[:, 0]
    t = simpson_data.treatment
    xt, xc = x[t == 1], x[t == 0]
    expected = (xt.mean() - xc.mean()) / math.sqrt((xt.var() + xc.var()) / 2)
    assert balance_report(simpson_data).smd_unweighted[0] == pytest.approx(expected, rel=1e-10)


def test_zero_variance_sentinels():
    X = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
    ds = Dataset(unit_id=np.arange(4), features=X, treatment=[1, 1, 0, 0], outcome=[0, 0, 0, 0])
    report = balance_report(ds)
    assert report.smd_unweighted[0] == 0.0
    assert report.smd_unweighted[1] == -math.inf
    assert json.loads(json.dumps(report.to_dict()))


def test_single_arm_balance():
    ds = Dataset(unit_id=np.arange(3), features=np.zeros((3, 1)), treatment=[0, 0, 0], outcome=[0, 1, 0])
    with pytest.raises(SingleArmDataset):
        balance_report(ds)


def test_consistency(four_data_50k):
    assert consistency_check(four_data_50k)
    flipped = four_data_50k.outcome.copy()
    flipped[17] ^= 1
    assert not consistency_check(dataclasses.replace(four_data_50k, outcome=flipped))
    empty = four_data_50k.subset(np.zeros(len(four_data_50k), bool))
    assert consistency_check(empty)
    with pytest.raises(MissingCounterfactuals):
        consistency_check(four_data_50k.logged())


def test_null_rct_consistency():
    assert consistency_check(build_scm(null_preset()).sample(1000, 0))
