"""Command-line entry point: ``prescriptive <command> [options]``.

Exit codes: 0 success, 1 usage error, 2 validation failure (canvas
violations, demo regression guards), 3 data error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from prescriptive import __version__
from prescriptive.canvas import (
    canvas_template,
    canvas_to_pipeline_config,
    load_canvas,
    render_markdown,
    validate_canvas,
)
from prescriptive.checks import balance_report, consistency_check, positivity_report
from prescriptive.demos import CHURN_GRID, run_churn_demo, run_simpson_demo
from prescriptive.errors import InvalidCanvas, PrescriptiveError
from prescriptive.evaluation import (
    compliance_report,
    curves_to_svg,
    dr_value,
    ips_value,
    oracle_value,
    snips_value,
    uplift_curve,
)
from prescriptive.learners import (
    FitConfig,
    fit_logistic,
    fit_propensity,
    ipw_weights,
    load_linear_model,
    load_propensity_model,
    save_model,
)
from prescriptive.policy import DecisionBatch, Policy, budget_policy, oracle_policy, predictive_policy, prescriptive_policy
from prescriptive.scm import HIGHER_IS_BETTER, OUTCOME_DIRECTIONS, Dataset, build_scm, config_from_name_or_path
from prescriptive.uplift import IteModel, fit_learner

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_DATA = 0, 1, 2, 3
DEFAULT_DECIDED_AT = "1970-01-01T00:00:00+00:00"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- helpers ------------------------------------------------------------------------------


class Run:
    """Collects inputs/outputs of one command and writes its manifest."""

    def __init__(self, command: str, args: argparse.Namespace):
        self.command = command
        self.args = args
        self.inputs: list[str] = []
        self.outputs: list[str] = []
        self.started = time.monotonic()
        self.started_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
        self.out = Path(args.out) if getattr(args, "out", None) else None
        if self.out is not None:
            self.out.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        if self.out is None:
            raise UsageError(f"{self.command} needs --out to write {name}")
        self.outputs.append(name)
        return self.out / name

    def input(self, path) -> Path:
        self.inputs.append(str(path))
        return Path(path)

    def config(self) -> dict:
        skip = {"out", "func"}
        return {k: v for k, v in sorted(vars(self.args).items()) if k not in skip}

    def finish(self) -> None:
        if self.out is None:
            return
        config = self.config()
        digest = hashlib.sha256(json.dumps(config, sort_keys=True, default=str).encode()).hexdigest()
        manifest = {
            "command": self.command,
            "config": config,
            "config_digest": digest,
            "seed": getattr(self.args, "seed", None),
            "inputs": self.inputs,
            "outputs": self.outputs,
            "tool_version": __version__,
            "started_at": self.started_at,
            "duration_seconds": round(time.monotonic() - self.started, 6),
        }
        (self.out / "manifest.json").write_text(json.dumps(manifest, indent=2, default=str) + "\n", encoding="utf-8")


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, default=_json_default) + "\n"


def _write_json(run: Run, name: str, obj) -> None:
    run.path(name).write_text(_dumps(obj), encoding="utf-8")


def _emit(args, obj, text: str) -> None:
    if args.format == "json":
        sys.stdout.write(_dumps(obj))
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _table(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def _fmt(v, digits=4) -> str:
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return "n/a"
    return f"{v:.{digits}f}" if isinstance(v, float) else str(v)


def _direction(args) -> str:
    if getattr(args, "direction", None):
        return args.direction
    if getattr(args, "preset", None) or getattr(args, "config", None):
        return config_from_name_or_path(args.preset, args.config).outcome_direction
    return HIGHER_IS_BETTER


def _load_data(run: Run, args) -> Dataset:
    return Dataset.from_csv(run.input(args.data), outcome_direction=_direction(args))


def _fit_config(args) -> FitConfig:
    return FitConfig(
        learning_rate=args.learning_rate,
        max_iterations=args.max_iterations,
        l2=args.l2,
        standardize=args.standardize,
    )


# --- commands -----------------------------------------------------------------------------


def cmd_generate(args, run: Run) -> int:
    config = config_from_name_or_path(args.preset, args.config)
    if args.config:
        run.input(args.config)
    scm = build_scm(config)
    data = scm.sample(args.n, args.seed)
    if args.logged:
        data = data.logged()
    data.to_csv(run.path("dataset.csv"))
    run.path("scm_config.json").write_text(config.to_json(), encoding="utf-8")
    summary = {
        "n": len(data),
        "provenance": data.provenance,
        "treated_fraction": float(data.treatment.mean()),
        "outcome_rate": float(data.outcome.mean()),
        "feature_names": list(data.feature_names),
    }
    if scm.kind == "tabular":
        summary["true_ate"] = scm.true_ate()
    _emit(args, summary, _table([[k, _fmt(v) if not isinstance(v, list) else ",".join(v)] for k, v in summary.items()]))
    return EXIT_OK


def cmd_check(args, run: Run) -> int:
    data = _load_data(run, args)
    if args.propensity == "true":
        if data.propensity_true is None:
            raise UsageError("--propensity true needs a dataset with a propensity_true column")
        e = data.propensity_true
        e_clipped = np.clip(e, 0.01, 0.99)
    else:
        model = fit_propensity(data)
        e = model.predict_raw(data.features)
        e_clipped = model.predict(data.features)
    pos = positivity_report(data, e, eps=args.eps, fail_threshold=args.fail_threshold)
    bal = balance_report(data, ipw_weights(data.treatment, e_clipped))
    report = {"positivity": pos.to_dict(), "balance": bal.to_dict()}
    if data.provenance == "synthetic_full":
        report["consistency"] = consistency_check(data)
    if run.out is not None:
        _write_json(run, "checks.json", report)

    lines = [f"positivity verdict: {pos.verdict}  (min e={_fmt(pos.min_propensity)}, max e={_fmt(pos.max_propensity)}, "
             f"below eps={_fmt(pos.fraction_below_eps)}, above 1-eps={_fmt(pos.fraction_above_one_minus_eps)})"]
    if pos.per_cell_arm_counts:
        rows = [["stratum", "treated", "control"]]
        rows += [[k, str(v["treated"]), str(v["control"])] for k, v in pos.per_cell_arm_counts.items()]
        lines.append(_table(rows))
    rows = [["feature", "smd", "smd_ipw"]]
    for i, name in enumerate(bal.feature_names):
        rows.append([name, _fmt(bal.smd_unweighted[i]), _fmt(bal.smd_weighted[i])])
    lines.append(_table(rows))
    lines.append(f"max |smd|: {_fmt(bal.max_abs_smd_unweighted)} unweighted, {_fmt(bal.max_abs_smd_weighted)} weighted")
    if "consistency" in report:
        lines.append(f"consistency: {'ok' if report['consistency'] else 'VIOLATED'}")
    _emit(args, report, "\n".join(lines))
    return EXIT_OK


def cmd_fit(args, run: Run) -> int:
    data = _load_data(run, args)
    fc = _fit_config(args)
    ps = fit_propensity(data, fc)
    weights = ipw_weights(data.treatment, ps.predict(data.features)) if args.ipw else None
    ite = fit_learner(args.learner, data, fc, weights)
    control = data.treatment == 0
    outcome = fit_logistic(data.features[control], data.outcome[control], None if weights is None else weights[control], fc)
    ite.save(run.path("ite_model.json"))
    save_model(ps, run.path("propensity_model.json"))
    save_model(outcome, run.path("outcome_model.json"))
    tau = ite.predict(data.features)
    summary = {
        "learner": args.learner,
        "ipw": args.ipw,
        "mean_tau_hat": float(tau.mean()),
        "min_tau_hat": float(tau.min()),
        "max_tau_hat": float(tau.max()),
        "propensity_calibration": list(ps.calibration),
    }
    text = _table([[k, _fmt(v)] for k, v in summary.items() if k != "propensity_calibration"])
    _emit(args, summary, text)
    return EXIT_OK


def _load_policy(args, data: Dataset) -> Policy:
    direction = data.outcome_direction
    models = Path(args.models) if args.models else None
    if args.policy == "oracle":
        return oracle_policy(data, fraction=args.fraction)
    if models is None:
        raise UsageError(f"--policy {args.policy} needs --models")
    if args.policy == "predictive":
        return predictive_policy(load_linear_model(models / "outcome_model.json"), args.threshold, direction)
    ite = IteModel.load(models / "ite_model.json")
    if args.policy == "prescriptive":
        return prescriptive_policy(ite, args.threshold, direction)
    if args.fraction is None:
        raise UsageError("--policy budget needs --fraction")
    return budget_policy(ite, args.fraction, args.positive_only, direction)


def cmd_decide(args, run: Run) -> int:
    data = _load_data(run, args)
    if args.models:
        run.input(args.models)
    pol = _load_policy(args, data)
    batch = pol.decide(data, decided_at=args.decided_at)
    batch.to_csv(run.path("decisions.csv"))
    cfg = pol.config_dict()
    cfg.pop("model", None)
    _write_json(run, "policy.json", cfg)
    summary = {"policy_id": pol.policy_id, "n": len(batch), "treated": int(batch.action.sum()),
               "treated_fraction": float(batch.action.mean())}
    _emit(args, summary, _table([[k, _fmt(v)] for k, v in summary.items()]))
    return EXIT_OK


def _read_performed(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    ids = [int(r["unit_id"]) for r in rows]
    actions = [int(r["action"]) for r in rows]
    reasons = [r.get("reason", "") or "" for r in rows]
    return ids, actions, reasons


def cmd_evaluate(args, run: Run) -> int:
    data = _load_data(run, args)
    batch = DecisionBatch.from_csv(run.input(args.decisions))
    report: dict = {"policy_id": batch.policy_id}
    lines = [f"policy: {batch.policy_id}"]

    if np.array_equal(batch.unit_id, data.unit_id):
        ite = None
        ps = None
        if args.models:
            models = Path(run.input(args.models))
            if (models / "ite_model.json").exists():
                ite = IteModel.load(models / "ite_model.json")
            if (models / "propensity_model.json").exists():
                ps = load_propensity_model(models / "propensity_model.json")
        if data.propensity_true is not None:
            e, source = np.clip(data.propensity_true, 0.01, 0.99), "true"
        elif ps is not None:
            e, source = ps.predict(data.features), "fitted"
        else:
            raise UsageError("evaluation needs logging propensities: a propensity_true column or --models with a propensity model")
        estimates = [ips_value(batch, data, e), snips_value(batch, data, e)]
        if ite is not None:
            estimates.append(dr_value(batch, data, e, ite))
        report["propensity_source"] = source
        report["ope"] = {est.method: est.to_dict() for est in estimates}
        rows = [["method", "value", "std_error", "ess"]]
        rows += [[est.method, _fmt(est.value), _fmt(est.std_error), _fmt(est.effective_sample_size, 1)] for est in estimates]
        lines.append(_table(rows))
        if data.provenance == "synthetic_full":
            report["oracle_value"] = oracle_value(batch, data)
            lines.append(f"oracle value: {_fmt(report['oracle_value'])}")
        if np.any(data.treatment == 1) and np.any(data.treatment == 0):
            curve = uplift_curve(data, batch.score, variant=args.curve)
            q_best, u_best = curve.argmax()
            report["uplift_curve"] = {"ate_total": curve.ate_total, "argmax_q": q_best, "argmax_value": u_best}
            if run.out is not None:
                curve.to_csv(run.path("uplift_curve.csv"))
                run.path("uplift_curve.svg").write_text(curves_to_svg({batch.policy_id: curve}), encoding="utf-8")
            lines.append(f"uplift curve: total {_fmt(curve.ate_total, 2)}, max {_fmt(u_best, 2)} at q={q_best:g}")
    else:
        lines.append("decisions do not cover the dataset in order; policy estimates skipped")

    if args.performed:
        ids, actions, reasons = _read_performed(run.input(args.performed))
        comp = compliance_report(batch, ids, actions, reasons)
        report["compliance"] = comp.to_dict()
        lines.append(
            "compliance: decided treat {}, decided control {}".format(
                _fmt(comp.compliance_rate[1]), _fmt(comp.compliance_rate[0])
            )
        )
        for label, count in comp.interference_breakdown.items():
            lines.append(f"  {label}: {count}")
    if run.out is not None:
        _write_json(run, "evaluation.json", report)
    _emit(args, report, "\n".join(lines))
    return EXIT_OK


def cmd_canvas(args, run: Run) -> int:
    if args.canvas_command == "init":
        text = canvas_template()
        if run.out is not None:
            run.path("canvas.txt").write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return EXIT_OK

    canvas = load_canvas(run.input(args.file))
    if args.canvas_command == "validate":
        violations = validate_canvas(canvas)
        report = {"valid": not violations, "violations": [v.__dict__ for v in violations]}
        if violations:
            report["pipeline_config"] = None
        else:
            report["pipeline_config"] = canvas_to_pipeline_config(canvas).to_dict()
        if run.out is not None:
            _write_json(run, "validation.json", report)
        text = "canvas is valid" if not violations else "\n".join(
            f"{v.cell} [{v.rule}] {v.message}" for v in violations
        )
        _emit(args, report, text)
        return EXIT_OK if not violations else EXIT_VALIDATION

    md = render_markdown(canvas)
    if run.out is not None:
        run.path("canvas.md").write_text(md, encoding="utf-8")
    else:
        sys.stdout.write(md)
    return EXIT_OK


def cmd_demo_simpson(args, run: Run) -> int:
    r = run_simpson_demo(args.seed, args.n)
    if run.out is not None:
        _write_json(run, "simpson_report.json", r)
    rows = [
        ["estimate", "value", "std_error"],
        ["true ATE (exact)", _fmt(r["true_ate"]), ""],
        ["naive contrast", _fmt(r["naive"]["value"]), _fmt(r["naive"]["std_error"])],
        ["IPW, true propensity", _fmt(r["ipw_true_propensity"]["value"]), _fmt(r["ipw_true_propensity"]["std_error"])],
        ["IPW, fitted propensity", _fmt(r["ipw_fitted_propensity"]["value"]), _fmt(r["ipw_fitted_propensity"]["std_error"])],
    ]
    lines = [f"Simpson demo (n={r['n']}, seed={r['seed']}); outcome is churn, lower is better", _table(rows)]
    lines.append("naive sign is flipped relative to the true effect" if r["sign_flip"] else "REGRESSION: naive sign matches the true effect")
    if r["wide_uncertainty"]:
        lines.append("WARNING: wide uncertainty at this sample size; read the standard errors")
    _emit(args, r, "\n".join(lines))
    return EXIT_OK if r["sign_flip"] else EXIT_VALIDATION


def cmd_demo_churn(args, run: Run) -> int:
    grid = CHURN_GRID if not args.grid else tuple(float(q) for q in args.grid.split(","))
    r = run_churn_demo(args.seed, args.n, grid, _fit_config(args))
    curves = r.pop("curves")
    models = r.pop("models")
    if run.out is not None:
        _write_json(run, "churn_report.json", r)
        for name, curve in curves.items():
            curve.to_csv(run.path(f"uplift_{name}.csv"))
        run.path("uplift_curves.svg").write_text(curves_to_svg(curves), encoding="utf-8")
        models["ite"].save(run.path("ite_model.json"))
        save_model(models["outcome"], run.path("outcome_model.json"))
    rows = [["q", "predictive", "prescriptive", "pred_incr", "presc_incr"]]
    for row in r["rows"]:
        rows.append([
            f"{row['q']:.2f}",
            _fmt(row["predictive_value"]),
            _fmt(row["prescriptive_value"]),
            _fmt(row["predictive_incremental"], 1),
            _fmt(row["prescriptive_incremental"], 1),
        ])
    lines = [f"Churn demo (n={r['n']}, seed={r['seed']}); outcome is retention, baseline {_fmt(r['baseline_value'])}", _table(rows)]
    ratio = r["incremental_ratio_at_q_0.25"]
    lines.append("incremental-outcome ratio at q=0.25 (prescriptive/predictive): "
                 + (f"{ratio:.2f}" if ratio is not None else "unbounded (predictive gain <= 0)"))
    lines.append("prescriptive dominates at every budget" if r["prescriptive_dominates"] else "REGRESSION: predictive beat prescriptive at some budget")
    _emit(args, r, "\n".join(lines))
    return EXIT_OK if r["prescriptive_dominates"] else EXIT_VALIDATION


# --- parser -------------------------------------------------------------------------------


def _add_common(p, seed=True, out_required=False):
    if seed:
        p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=out_required, help="directory for every file the command writes")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="stdout report style: human-readable text (csv) or json")


def _add_data(p):
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--preset", choices=("simpson", "four_segment", "null"), help="preset the data came from (sets outcome direction)")
    p.add_argument("--config", help="SCM config JSON the data came from (sets outcome direction)")
    p.add_argument("--direction", choices=OUTCOME_DIRECTIONS, help="outcome direction; overrides --preset/--config")


def _add_fit(p):
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--max-iterations", type=int, default=2000)
    p.add_argument("--l2", type=float, default=1e-3)
    p.add_argument("--standardize", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="prescriptive", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="sample a dataset from a preset or SCM config")
    _add_common(p, out_required=True)
    p.add_argument("--n", type=int, default=10_000)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=("simpson", "four_segment", "null"), default="four_segment")
    src.add_argument("--config")
    p.add_argument("--logged", action="store_true", help="drop the counterfactual columns")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("check", help="positivity, balance and consistency diagnostics")
    _add_common(p, seed=False)
    _add_data(p)
    p.add_argument("--propensity", choices=("true", "fitted"), default="fitted")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--fail-threshold", type=float, default=0.02)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fit", help="fit propensity, outcome and ITE models")
    _add_common(p, seed=False, out_required=True)
    _add_data(p)
    _add_fit(p)
    p.add_argument("--learner", choices=("t", "s"), default="t")
    p.add_argument("--ipw", action="store_true", help="weight fits by inverse fitted propensity")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("decide", help="render a policy's decisions for every unit")
    _add_common(p, seed=False, out_required=True)
    _add_data(p)
    p.add_argument("--models", help="directory written by `fit`")
    p.add_argument("--policy", choices=("predictive", "prescriptive", "budget", "oracle"), default="prescriptive")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--fraction", type=float)
    p.add_argument("--positive-only", action="store_true")
    p.add_argument("--decided-at", default=DEFAULT_DECIDED_AT, help="timestamp stamped on every decision")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("evaluate", help="offline evaluation, uplift curve and compliance for decisions")
    _add_common(p, seed=False)
    _add_data(p)
    p.add_argument("--decisions", required=True)
    p.add_argument("--models")
    p.add_argument("--performed", help="CSV with unit_id,action[,reason]")
    p.add_argument("--curve", choices=("uplift", "qini"), default="uplift")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("canvas", help="prescriptive canvas tools")
    csub = p.add_subparsers(dest="canvas_command", required=True, parser_class=_Parser)
    c = csub.add_parser("init", help="write a commented template")
    _add_common(c, seed=False)
    c = csub.add_parser("validate", help="check a canvas file")
    c.add_argument("file")
    _add_common(c, seed=False)
    c = csub.add_parser("render", help="render a canvas as a Markdown table")
    c.add_argument("file")
    _add_common(c, seed=False)
    p.set_defaults(func=cmd_canvas)

    p = sub.add_parser("demo", help="headline demonstrations")
    dsub = p.add_subparsers(dest="demo", required=True, parser_class=_Parser)
    d = dsub.add_parser("simpson", help="confounding flips the sign of the naive effect")
    _add_common(d)
    d.add_argument("--n", type=int, default=100_000)
    d.set_defaults(func=cmd_demo_simpson)
    d = dsub.add_parser("churn", help="predictive vs prescriptive targeting at equal budgets")
    _add_common(d)
    _add_fit(d)
    d.add_argument("--n", type=int, default=50_000)
    d.add_argument("--grid", help="comma-separated budget fractions (default 0.05..1.0 step 0.05)")
    d.set_defaults(func=cmd_demo_churn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    name = args.command
    if name == "canvas":
        name = f"canvas {args.canvas_command}"
    elif name == "demo":
        name = f"demo {args.demo}"
    try:
        run = Run(name, args)
        code = args.func(args, run)
    except UsageError as exc:
        print(f"prescriptive: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidCanvas as exc:
        print(f"prescriptive: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (PrescriptiveError, ValueError, OSError, KeyError) as exc:
        print(f"prescriptive: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    run.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
