"""The nine acceptance criteria, one test each, at their stated tolerances."""
import time

import numpy as np
from hypothesis import given, settings
from scipy.stats import spearmanr

from acceptance_log import record
from cli_helpers import run_pipeline, snapshot
from prescriptive.canvas import CELLS, load_canvas, parse_canvas, serialize_canvas, validate_canvas
from prescriptive.checks import balance_report
from prescriptive.demos import CHURN_GRID, run_churn_demo, run_simpson_demo
from prescriptive.evaluation import bootstrap_band, diagonal_within_band, dr_value, ips_value, oracle_value, uplift_curve, zero_outcome_model
from prescriptive.learners import ipw_weights, loss_and_gradient
from prescriptive.policy import oracle_policy
from prescriptive.scm import build_scm, four_segment_preset
from prescriptive.uplift import ate_naive
from test_canvas import canvases
from test_learners import finite_difference_gradient, random_instance, relative_error


def test_criterion_1_simpson_sign_flip():
    start = time.perf_counter()
    r = run_simpson_demo(seed=7, n=100_000)
    elapsed = time.perf_counter() - start
    naive, ipw = r["naive"]["value"], r["ipw_true_propensity"]["value"]
    ok = abs(naive - 0.25) < 0.01 and abs(ipw + 0.05) < 0.02 and np.sign(naive) != np.sign(r["true_ate"]) and elapsed < 10
    detail = f"naive {naive:+.4f}, IPW(true e) {ipw:+.4f}, true {r['true_ate']:+.2f}, {elapsed:.2f}s"
    assert record(1, "Simpson sign flip", ok, detail)


def test_criterion_2_predictive_vs_prescriptive():
    n, seeds = 50_000, range(5)
    start = time.perf_counter()
    runs = [run_churn_demo(seed, n) for seed in seeds]
    elapsed = time.perf_counter() - start
    presc = np.mean([r["at_q_0.25"]["prescriptive_incremental"] for r in runs])
    pred = np.mean([r["at_q_0.25"]["predictive_incremental"] for r in runs])
    dominated = all(r["prescriptive_dominates"] for r in runs)
    grid_ok = all(len(r["rows"]) == len(CHURN_GRID) for r in runs)
    ok = presc >= 0.06 * n and pred <= 0.01 * n and dominated and grid_ok and elapsed < 60
    detail = (f"q=0.25 incremental prescriptive {presc:.0f} (>= {0.06 * n:.0f}), predictive {pred:.0f} (<= {0.01 * n:.0f}), "
              f"dominance at every q: {dominated}, {elapsed:.1f}s")
    assert record(2, "predictive vs prescriptive gap", ok, detail)


def test_criterion_3_uplift_curve_identities():
    scm = build_scm(four_segment_preset())
    n = 100_000
    endpoint_ok, inside = True, 0
    for seed in range(20):
        data = scm.sample(n, seed)
        # independent stream: the sampler draws its cell uniforms from default_rng(seed)
        scores = np.random.default_rng([seed, 1]).random(n)
        curve = uplift_curve(data, scores)
        endpoint_ok &= curve.points[0] == (0.0, 0.0)
        endpoint_ok &= abs(curve.values[-1] - ate_naive(data).value * n) < 1e-9 * n
        inside += diagonal_within_band(curve, bootstrap_band(data, scores, n_boot=200, seed=seed))
    ok = endpoint_ok and inside >= 19
    assert record(3, "uplift curve identities", ok, f"endpoints exact: {endpoint_ok}, random curve inside 3-sigma band on {inside}/20 seeds")


def test_criterion_4_ite_recovery(four_data_50k, t_learner_50k, s_learner_50k):
    rho = {k: spearmanr(m.predict(four_data_50k.features), four_data_50k.tau_true).statistic
           for k, m in (("T", t_learner_50k), ("S", s_learner_50k))}
    ok = min(rho.values()) >= 0.8
    assert record(4, "ITE recovery", ok, ", ".join(f"{k}-learner Spearman {v:.4f}" for k, v in rho.items()))


def test_criterion_5_ope():
    scm = build_scm(four_segment_preset())
    mu = scm.outcome_model()
    ips, dr_zero_gap, dr = [], 0.0, []
    for seed in range(200):
        data = scm.sample(10_000, seed)
        treat_all = np.ones(len(data), dtype=int)
        e = data.propensity_true
        est = ips_value(treat_all, data, e).value
        ips.append(est)
        dr_zero_gap = max(dr_zero_gap, abs(dr_value(treat_all, data, e, zero_outcome_model).value - est))
        dr.append(dr_value(treat_all, data, e, mu).value)
    ips, dr = np.array(ips), np.array(dr)
    se = ips.std(ddof=1) / np.sqrt(len(ips))
    exact = scm.mean_potential_outcome(1)
    unbiased = abs(ips.mean() - exact) < 3 * se

    big = scm.sample(100_000, 1000)
    dr_gaps = []
    for pol in (np.ones(len(big), dtype=int), oracle_policy(big), oracle_policy(big, fraction=0.1)):
        dr_gaps.append(abs(dr_value(pol, big, big.propensity_true, mu).value - oracle_value(pol, big)))
    var_ok = dr.var(ddof=1) <= ips.var(ddof=1)
    ok = exact == 0.55 and unbiased and dr_zero_gap <= 1e-12 and max(dr_gaps) < 0.01 and var_ok
    detail = (f"mean IPS {ips.mean():.5f} vs {exact:.2f} (3 SE = {3 * se:.5f}), max |DR(0) - IPS| {dr_zero_gap:.1e}, "
              f"max |DR(oracle) - oracle value| {max(dr_gaps):.4f}, var DR {dr.var(ddof=1):.2e} <= var IPS {ips.var(ddof=1):.2e}")
    assert record(5, "OPE correctness", ok, detail)


def test_criterion_6_gradient_check():
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n, d = int(rng.integers(2, 50)), int(rng.integers(1, 8))
        w, b, X, y, sw, l2 = random_instance(seed, n, d)
        _, grad = loss_and_gradient(w, b, X, y, sw, l2)
        worst = max(worst, relative_error(grad, finite_difference_gradient(w, b, X, y, sw, l2)))
    assert record(6, "gradient check", worst < 1e-5, f"max relative error {worst:.2e} over 100 instances")


def test_criterion_7_balance(simpson_data):
    report = balance_report(simpson_data, ipw_weights(simpson_data.treatment, simpson_data.propensity_true))
    ok = report.max_abs_smd_unweighted > 0.5 and report.max_abs_smd_weighted < 0.05
    detail = f"max |SMD| {report.max_abs_smd_unweighted:.3f} unweighted, {report.max_abs_smd_weighted:.4f} IPW-weighted"
    assert record(7, "balance property", ok, detail)


def test_criterion_8_canvas_suite(fixtures_dir):
    cases = {"n": 0, "failures": 0}

    @settings(max_examples=1000, deadline=None, database=None)
    @given(canvases())
    def round_trip(canvas):
        cases["n"] += 1
        text = serialize_canvas(canvas)
        if parse_canvas(text) != canvas or serialize_canvas(parse_canvas(text)) != text:
            cases["failures"] += 1

    round_trip()
    single = 0
    for section, key in CELLS:
        canvas = load_canvas(fixtures_dir / "churn.canvas")
        setattr(getattr(canvas, section), key, None)
        violations = validate_canvas(canvas)
        single += len(violations) == 1 and violations[0].cell == f"{section}.{key}"
    stable = True
    for name in ("churn.canvas", "conversion.canvas"):
        raw = (fixtures_dir / name).read_bytes()
        stable &= serialize_canvas(parse_canvas(raw.decode("utf-8"))).encode("utf-8") == raw
    ok = cases["n"] >= 1000 and cases["failures"] == 0 and single == 10 and stable
    detail = f"round trip {cases['n'] - cases['failures']}/{cases['n']} cases, single deletions {single}/10, fixtures byte-stable: {stable}"
    assert record(8, "canvas suite", ok, detail)


def test_criterion_9_determinism(tmp_path):
    first = run_pipeline(tmp_path)
    before = snapshot(tmp_path)
    second = run_pipeline(tmp_path)
    after = snapshot(tmp_path)
    differing = sorted(k for k in before.keys() | after.keys() if before.get(k) != after.get(k))
    same_stdout = all(first[c] == second[c] for c in first)
    ok = not differing and same_stdout and all(code == 0 for code, _ in first.values())
    detail = f"{len(first)} commands, {len(before)} files compared, differing: {differing or 'none'}, stdout identical: {same_stdout}"
    assert record(9, "determinism", ok, detail)
