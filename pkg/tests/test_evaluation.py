import numpy as np
import pytest

from prescriptive.errors import DuplicateUnitIds, LengthMismatch, MissingCounterfactuals, SingleArmDataset
from prescriptive.evaluation import (
    auuc,
    bootstrap_band,
    compliance_report,
    curves_to_svg,
    diagonal_within_band,
    dr_value,
    incremental_outcome,
    ips_value,
    oracle_value,
    snips_value,
    uplift_curve,
    zero_outcome_model,
)
from prescriptive.learners import fit_logistic
from prescriptive.policy import DecisionBatch, budget_policy, oracle_policy, predictive_policy, prescriptive_policy
from prescriptive.scm import Dataset, four_segment_preset
from prescriptive.uplift import ate_naive

STAMP = "2020-01-01T00:00:00+00:00"


def analytic_oracle_curve(config, grid):
    """Population curve u(q)/N when units are ranked by their true effect."""
    cells = sorted(config.cells, key=lambda c: -(c.p_outcome_treated - c.p_outcome_control))
    edges = np.cumsum([0.0] + [c.mass for c in cells])
    effects = np.array([c.p_outcome_treated - c.p_outcome_control for c in cells])
    out = []
    for q in grid:
        covered = np.clip(q - edges[:-1], 0.0, edges[1:] - edges[:-1])
        out.append(float(covered @ effects))
    return np.array(out)


def trapezoid(x, y):
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2))


def test_curve_endpoints(four_data_100k):
    scores = np.random.default_rng(0).random(len(four_data_100k))
    curve = uplift_curve(four_data_100k, scores)
    assert curve.points[0] == (0.0, 0.0)
    assert curve.fractions[-1] == 1.0
    assert np.all(np.diff(curve.fractions) > 0)
    n = len(four_data_100k)
    assert abs(curve.values[-1] - ate_naive(four_data_100k).value * n) < 1e-9 * n
    assert curve.ate_total == curve.values[-1]


def test_lower_is_better_flips_sign(simpson_data):
    scores = np.arange(len(simpson_data), dtype=float)
    up = uplift_curve(simpson_data, scores)
    raw = uplift_curve(simpson_data, scores, outcome_direction="higher_is_better")
    np.testing.assert_array_equal(up.values, -raw.values)


def test_random_scores_track_diagonal(four_data_100k):
    scores = np.random.default_rng(1).random(len(four_data_100k))
    curve = uplift_curve(four_data_100k, scores)
    band = bootstrap_band(four_data_100k, scores, n_boot=100, seed=1)
    assert np.all(band.std[1:] > 0)
    sd = np.interp(curve.fractions, band.fractions, band.std)[1:]
    dev = np.abs(curve.values - curve.fractions * curve.ate_total)[1:]
    # pointwise 3 sigma, so a few excursions over ~100 correlated points are expected now and then
    assert np.mean(dev <= 3 * sd) >= 0.95
    assert np.max(dev / sd) < 5


def test_band_check_flags_a_real_signal(four_data_100k):
    band = bootstrap_band(four_data_100k, four_data_100k.tau_true, n_boot=50, seed=0)
    assert not diagonal_within_band(uplift_curve(four_data_100k, four_data_100k.tau_true), band)


def test_oracle_curve_peak(four_data_100k):
    n = len(four_data_100k)
    curve = uplift_curve(four_data_100k, four_data_100k.tau_true)
    q_star, u_star = curve.argmax()
    assert abs(u_star - 0.075 * n) <= 0.05 * 0.075 * n
    # zero-effect segments make the exact curve flat on [0.25, 0.75]; its maximum is first reached at 0.25
    assert 0.22 <= q_star <= 0.78
    grid = np.linspace(0, 1, 101)
    exact = analytic_oracle_curve(four_segment_preset(), grid)
    assert grid[np.argmax(exact)] == 0.25 and exact.max() == pytest.approx(0.075)


def test_auuc_against_closed_form(four_data_100k):
    grid = np.linspace(0, 1, 101)
    exact = trapezoid(grid, analytic_oracle_curve(four_segment_preset(), grid))
    assert exact == pytest.approx(0.05625, abs=1e-12)
    oracle = auuc(uplift_curve(four_data_100k, four_data_100k.tau_true))
    assert oracle > 0 and abs(oracle - exact) <= 0.1 * exact
    worst = auuc(uplift_curve(four_data_100k, -four_data_100k.tau_true))
    assert abs(worst + exact) <= 0.1 * exact


def test_diagonal_curve_has_zero_auuc():
    from prescriptive.evaluation import UpliftCurve

    q = np.linspace(0, 1, 11)
    assert auuc(UpliftCurve(q, 40.0 * q, 40.0, "uplift", 100)) == pytest.approx(0.0, abs=1e-15)


def test_empty_arm_points_are_skipped():
    # first two ranked units are both treated, so q=0.25 and q=0.5 have no controls
    ds = Dataset(unit_id=np.arange(4), features=np.zeros((4, 1)), treatment=[1, 1, 0, 0], outcome=[1, 0, 0, 1])
    curve = uplift_curve(ds, [4.0, 3.0, 2.0, 1.0], grid=[0.25, 0.5, 0.75, 1.0])
    assert curve.fractions.tolist() == [0.0, 0.75, 1.0]
    assert curve.values[1] == pytest.approx((0.5 - 0.0) * 3)


def test_qini_variant(four_data_100k):
    curve = uplift_curve(four_data_100k, four_data_100k.tau_true, variant="qini")
    t, y = four_data_100k.treatment, four_data_100k.outcome
    expected = y[t == 1].sum() - y[t == 0].sum() * (t.sum() / (1 - t).sum())
    assert curve.values[-1] == pytest.approx(expected, rel=1e-12)


def test_curve_input_errors(four_data_100k):
    with pytest.raises(LengthMismatch):
        uplift_curve(four_data_100k, np.zeros(5))
    one_arm = Dataset(unit_id=np.arange(3), features=np.zeros((3, 1)), treatment=[0, 0, 0], outcome=[0, 1, 0])
    with pytest.raises(SingleArmDataset):
        uplift_curve(one_arm, np.zeros(3))


def test_curve_csv_and_svg(tmp_path, four_data_100k):
    curve = uplift_curve(four_data_100k, four_data_100k.tau_true, grid=[0.5])
    curve.to_csv(tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "q,cumulative_uplift" and len(lines) == 4
    assert curves_to_svg({"oracle": curve}).startswith("<svg")


# --- OPE ----------------------------------------------------------------------------------


def test_snips_of_logging_behaviour_is_mean_outcome(four_data_100k):
    e = np.full(len(four_data_100k), 0.5)
    est = snips_value(four_data_100k.treatment, four_data_100k.logged(), e)
    assert est.value == four_data_100k.outcome.mean()


@pytest.mark.parametrize("action", [1, 0])
def test_ips_constant_policies(four_data_100k, action):
    e = np.full(len(four_data_100k), 0.5)
    actions = np.full(len(four_data_100k), action)
    for est in (ips_value(actions, four_data_100k, e), snips_value(actions, four_data_100k, e)):
        assert abs(est.value - 0.55) < 0.02
        assert 0 < est.effective_sample_size <= len(four_data_100k)
        assert est.std_error > 0


def test_dr_with_zero_model_is_ips(simpson_data, t_learner_50k):
    pol = oracle_policy(simpson_data, fraction=0.3, positive_only=False)
    e = simpson_data.propensity_true
    assert dr_value(pol, simpson_data, e, zero_outcome_model).value == ips_value(pol, simpson_data, e).value


@pytest.mark.parametrize("use_true_propensity", [True, False])
def test_dr_with_oracle_model(four_scm, use_true_propensity):
    data = four_scm.sample(100_000, 13)
    e = data.propensity_true if use_true_propensity else np.full(len(data), 0.5)
    for pol in (oracle_policy(data), np.ones(len(data), int), oracle_policy(data, fraction=0.1)):
        assert abs(dr_value(pol, data, e, four_scm).value - oracle_value(pol, data)) < 0.01


def test_dr_on_observational_log(simpson_scm, simpson_data):
    pol = oracle_policy(simpson_data)
    est = dr_value(pol, simpson_data, simpson_data.propensity_true, simpson_scm.outcome_model())
    assert abs(est.value - oracle_value(pol, simpson_data)) < 0.01


def test_ope_rejects_bad_propensities(four_data_100k):
    with pytest.raises(ValueError):
        ips_value(four_data_100k.treatment, four_data_100k, np.ones(len(four_data_100k)))
    with pytest.raises(LengthMismatch):
        ips_value(four_data_100k.treatment, four_data_100k, np.full(4, 0.5))


# --- oracle scoring ---------------------------------------------------------------------------


def test_oracle_values(four_data_100k):
    n = len(four_data_100k)
    assert oracle_value(np.zeros(n, int), four_data_100k) == four_data_100k.y0.mean()
    assert abs(oracle_value(np.ones(n, int), four_data_100k) - 0.55) < 0.01
    assert abs(oracle_value(oracle_policy(four_data_100k), four_data_100k) - 0.625) < 0.01
    assert incremental_outcome(np.zeros(n, int), four_data_100k) == 0.0
    with pytest.raises(MissingCounterfactuals):
        oracle_value(np.zeros(n, int), four_data_100k.logged())


def test_oracle_dominance(four_data_50k, t_learner_50k, s_learner_50k):
    control = four_data_50k.treatment == 0
    churn = fit_logistic(four_data_50k.features[control], four_data_50k.outcome[control])
    best = oracle_value(oracle_policy(four_data_50k), four_data_50k)
    candidates = [prescriptive_policy(t_learner_50k), prescriptive_policy(s_learner_50k)]
    candidates += [predictive_policy(churn, t) for t in (0.1, 0.3, 0.5, 0.7)]
    candidates += [budget_policy(m, q) for m in (t_learner_50k, churn) for q in (0.1, 0.25, 0.5, 1.0)]
    for pol in candidates:
        assert best >= oracle_value(pol, four_data_50k)


def test_decision_batch_as_policy(four_data_50k, t_learner_50k):
    pol = budget_policy(t_learner_50k, 0.25)
    batch = pol.decide(four_data_50k, STAMP)
    assert oracle_value(batch, four_data_50k) == oracle_value(pol, four_data_50k)


# --- compliance -------------------------------------------------------------------------------


def batch(actions):
    actions = np.asarray(actions)
    return DecisionBatch(np.arange(len(actions)), np.zeros(len(actions)), actions, "p", STAMP)


def test_full_compliance():
    decisions = batch([1, 0, 1, 0])
    report = compliance_report(decisions, np.arange(4), [1, 0, 1, 0])
    assert report.compliance_rate == {0: 1.0, 1: 1.0}
    assert sum(c for row in report.table.values() for c in row.values()) == report.n_joined == 4


def test_unreachable_units():
    actions = np.array([1] * 100 + [0] * 50)
    performed = actions.copy()
    performed[:10] = 0
    reasons = [""] * 150
    for i in range(10):
        reasons[i] = "unreachable"
    report = compliance_report(batch(actions), np.arange(150), performed, reasons)
    assert report.compliance_rate[1] == pytest.approx(0.9)
    assert report.compliance_rate[0] == 1.0
    assert report.interference_breakdown == {"unreachable": 10}
    assert report.table[1][0] == 10


def test_empty_join():
    report = compliance_report(batch([1, 0]), np.array([10, 11]), np.array([1, 1]))
    assert report.n_joined == 0
    assert report.compliance_rate == {0: None, 1: None}
    assert report.unmatched_decisions == 2 and report.unmatched_performed == 2
    assert report.to_dict()["compliance_rate"] == {"decided_0": None, "decided_1": None}


def test_duplicate_performed_ids():
    with pytest.raises(DuplicateUnitIds):
        compliance_report(batch([1, 0]), np.array([0, 0]), np.array([1, 1]))
