"""The Prescriptive Canvas: a ten-cell framing document for prescriptive projects.

File format
-----------
UTF-8 text with LF line endings, made of ``[section]`` headers and
``key = value`` lines. Blank lines and lines starting with ``#`` are ignored.
A value is a JSON literal: a double-quoted string for free-text cells, an
integer for ``outcome_horizon_days`` and an array of strings for
``treatment_actions`` and ``outcome_terms``. Sections and keys::

    [meta]                title
    [business_impact]     goal, goal_metric, goal_direction ("maximize"|"minimize"), action, decision
    [policy_definition]   unit, unit_entity, unit_decision_moment, treatment,
                          treatment_actions, outcomes, outcome_terms, outcome_horizon_days
    [policy_validation]   evaluation_metrics, tracking, compliance, delivery

Unknown sections or keys and repeated keys are errors. Keys that are missing
stay unset (``None``) and are reported by :func:`validate_canvas`.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field, fields

from prescriptive.errors import CanvasSyntaxError, DuplicateKey, InvalidCanvas, UnknownKey, UnknownSection
from prescriptive.scm import HIGHER_IS_BETTER, LOWER_IS_BETTER

GOAL_DIRECTIONS = ("maximize", "minimize")


@dataclass
class Meta:
    title: str | None = None


@dataclass
class BusinessImpact:
    goal: str | None = None
    goal_metric: str | None = None
    goal_direction: str | None = None
    action: str | None = None
    decision: str | None = None


@dataclass
class PolicyDefinition:
    unit: str | None = None
    unit_entity: str | None = None
    unit_decision_moment: str | None = None
    treatment: str | None = None
    treatment_actions: list[str] | None = None
    outcomes: str | None = None
    outcome_terms: list[str] | None = None
    outcome_horizon_days: int | None = None


@dataclass
class PolicyValidation:
    evaluation_metrics: str | None = None
    tracking: str | None = None
    compliance: str | None = None
    delivery: str | None = None


@dataclass
class Canvas:
    meta: Meta = field(default_factory=Meta)
    business_impact: BusinessImpact = field(default_factory=BusinessImpact)
    policy_definition: PolicyDefinition = field(default_factory=PolicyDefinition)
    policy_validation: PolicyValidation = field(default_factory=PolicyValidation)


SECTIONS = ("meta", "business_impact", "policy_definition", "policy_validation")
_SECTION_TYPES = {f.name: f.default_factory for f in fields(Canvas)}
_LIST_KEYS = {"treatment_actions", "outcome_terms"}
_INT_KEYS = {"outcome_horizon_days"}

# (section, key) of the ten free-text cells, in column order
CELLS = (
    ("business_impact", "goal"),
    ("business_impact", "action"),
    ("business_impact", "decision"),
    ("policy_definition", "unit"),
    ("policy_definition", "treatment"),
    ("policy_definition", "outcomes"),
    ("policy_validation", "evaluation_metrics"),
    ("policy_validation", "tracking"),
    ("policy_validation", "compliance"),
    ("policy_validation", "delivery"),
)

COLUMN_TITLES = {
    "business_impact": "Business Impact",
    "policy_definition": "Policy Definition",
    "policy_validation": "Policy Validation",
}

CELL_LABELS = {
    "goal": "Goal (KPI)",
    "action": "Action",
    "decision": "Decision",
    "unit": "Unit",
    "treatment": "Treatment",
    "outcomes": "Outcomes",
    "evaluation_metrics": "Evaluation Metrics",
    "tracking": "Tracking",
    "compliance": "Compliance",
    "delivery": "Delivery",
}


def _section_keys(section: str) -> tuple[str, ...]:
    return tuple(f.name for f in fields(_SECTION_TYPES[section]()))


# --- parsing ------------------------------------------------------------------------------


def _coerce(key: str, raw, lineno: int):
    if key in _LIST_KEYS:
        if not isinstance(raw, list) or not all(isinstance(v, str) for v in raw):
            raise CanvasSyntaxError(f"{key} must be an array of strings", lineno)
        return list(raw)
    if key in _INT_KEYS:
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise CanvasSyntaxError(f"{key} must be an integer", lineno)
        return raw
    if not isinstance(raw, str):
        raise CanvasSyntaxError(f"{key} must be a double-quoted string", lineno)
    if key == "goal_direction" and raw not in GOAL_DIRECTIONS:
        raise CanvasSyntaxError(f"goal_direction must be one of {GOAL_DIRECTIONS}, got {raw!r}", lineno)
    return raw


def parse_canvas(text: str) -> Canvas:
    canvas = Canvas()
    section = None
    seen: set[tuple[str, str]] = set()
    seen_sections: set[str] = set()
    # split on LF only: str.splitlines would also break on separators inside values
    for lineno, line in enumerate(text.split("\n"), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise CanvasSyntaxError("unterminated section header", lineno)
            name = stripped[1:-1].strip()
            if name not in SECTIONS:
                raise UnknownSection(f"unknown section [{name}]", lineno)
            if name in seen_sections:
                raise DuplicateKey(f"section [{name}] appears twice", lineno)
            seen_sections.add(name)
            section = name
            continue
        key, sep, value = stripped.partition("=")
        key = key.strip()
        if not sep or not key:
            raise CanvasSyntaxError("expected 'key = value'", lineno)
        if section is None:
            raise CanvasSyntaxError(f"key {key!r} appears before any section header", lineno)
        if key not in _section_keys(section):
            raise UnknownKey(f"unknown key {key!r} in [{section}]", lineno)
        if (section, key) in seen:
            raise DuplicateKey(f"duplicate key {key!r} in [{section}]", lineno)
        seen.add((section, key))
        try:
            raw = json.loads(value.strip())
        except json.JSONDecodeError as exc:
            raise CanvasSyntaxError(f"bad value for {key!r}: {exc.msg}", lineno) from None
        setattr(getattr(canvas, section), key, _coerce(key, raw, lineno))
    return canvas


def load_canvas(path) -> Canvas:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_canvas(fh.read())


# --- serialization --------------------------------------------------------------------------


def serialize_canvas(canvas: Canvas) -> str:
    """Canonical text: fixed section and key order, present keys only, LF endings."""
    blocks = []
    for section in SECTIONS:
        obj = getattr(canvas, section)
        lines = []
        for key in _section_keys(section):
            value = getattr(obj, key)
            if value is None:
                continue
            lines.append(f"{key} = {json.dumps(value, ensure_ascii=False)}")
        if lines:
            blocks.append(f"[{section}]\n" + "\n".join(lines) + "\n")
    return "\n".join(blocks)


# --- validation -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    cell: str
    rule: str
    message: str


def _blank(value) -> bool:
    return value is None or (isinstance(value, str) and not value.strip())


def validate_canvas(canvas: Canvas) -> list[Violation]:
    """Check the canvas rules; an empty list means the canvas is complete.

    R1  each of the ten cells is non-empty
    R2  goal_direction is set (checked when the goal cell is filled)
    R3  at least one treatment action (when the treatment cell is filled)
    R4  a positive outcome horizon in days (when the outcomes cell is filled)
    R5  evaluation metrics mention a declared outcome term (when both are filled)
    R6  unit names its entity and decision moment (when the unit cell is filled)

    The structured rules only fire for filled cells, so removing one cell
    yields exactly one violation.
    """
    out: list[Violation] = []
    for section, key in CELLS:
        if _blank(getattr(getattr(canvas, section), key)):
            out.append(Violation(f"{section}.{key}", "R1", f"{CELL_LABELS[key]} cell is empty"))

    bi, pd, pv = canvas.business_impact, canvas.policy_definition, canvas.policy_validation
    if not _blank(bi.goal) and bi.goal_direction not in GOAL_DIRECTIONS:
        out.append(Violation("business_impact.goal_direction", "R2", "goal_direction must be 'maximize' or 'minimize'"))
    if not _blank(pd.treatment):
        actions = [a for a in (pd.treatment_actions or []) if a.strip()]
        if not actions:
            out.append(Violation("policy_definition.treatment_actions", "R3", "declare at least one treatment action"))
    if not _blank(pd.outcomes):
        if pd.outcome_horizon_days is None or pd.outcome_horizon_days < 1:
            out.append(Violation("policy_definition.outcome_horizon_days", "R4", "outcome horizon must be a positive number of days"))
    if not _blank(pv.evaluation_metrics):
        terms = [t for t in (pd.outcome_terms or []) if t.strip()]
        text = pv.evaluation_metrics.lower()
        if not any(t.lower() in text for t in terms):
            out.append(
                Violation(
                    "policy_validation.evaluation_metrics",
                    "R5",
                    "evaluation metrics mention none of the declared outcome_terms",
                )
            )
    if not _blank(pd.unit):
        missing = [k for k in ("unit_entity", "unit_decision_moment") if _blank(getattr(pd, k))]
        if missing:
            out.append(Violation("policy_definition.unit", "R6", f"unit is missing {', '.join(missing)}"))
    return out


# --- rendering ------------------------------------------------------------------------------


def _md(text) -> str:
    if isinstance(text, list):
        text = ", ".join(text)
    return str(text).replace("|", "\\|").replace("\r", "").replace("\n", "<br>")


def _cell_lines(canvas: Canvas, section: str) -> list[str]:
    bi, pd = canvas.business_impact, canvas.policy_definition
    rows = []
    for sec, key in CELLS:
        if sec != section:
            continue
        text = _md(getattr(getattr(canvas, sec), key))
        if key == "goal":
            extra = [x for x in (bi.goal_metric and f"KPI: {_md(bi.goal_metric)}", bi.goal_direction) if x]
            if extra:
                text += f" ({'; '.join(extra)})"
        elif key == "unit":
            text += f" (entity: {_md(pd.unit_entity)}; decided at: {_md(pd.unit_decision_moment)})"
        elif key == "treatment":
            text += f" (actions: {_md(pd.treatment_actions)})"
        elif key == "outcomes":
            text += f" (horizon: {pd.outcome_horizon_days} days)"
        rows.append(f"**{CELL_LABELS[key]}**: {text}")
    return rows


def render_markdown(canvas: Canvas) -> str:
    """Three-column Markdown table, one column per canvas dimension."""
    violations = validate_canvas(canvas)
    if violations:
        raise InvalidCanvas(violations)
    title = canvas.meta.title if not _blank(canvas.meta.title) else "Untitled"
    columns = [_cell_lines(canvas, s) for s in COLUMN_TITLES]
    depth = max(len(c) for c in columns)
    lines = [
        f"# Prescriptive Canvas: {_md(title)}",
        "",
        "| " + " | ".join(COLUMN_TITLES.values()) + " |",
        "| --- | --- | --- |",
    ]
    for i in range(depth):
        lines.append("| " + " | ".join(c[i] if i < len(c) else "" for c in columns) + " |")
    return "\n".join(lines) + "\n"


# --- pipeline linkage -----------------------------------------------------------------------


@dataclass(frozen=True)
class PipelineConfig:
    outcome_direction: str
    horizon: int
    action_set: tuple[str, ...]
    unit_key: str

    def to_dict(self) -> dict:
        return {**dataclasses.asdict(self), "action_set": list(self.action_set)}


def canvas_to_pipeline_config(canvas: Canvas) -> PipelineConfig:
    violations = validate_canvas(canvas)
    if violations:
        raise InvalidCanvas(violations)
    pd = canvas.policy_definition
    direction = HIGHER_IS_BETTER if canvas.business_impact.goal_direction == "maximize" else LOWER_IS_BETTER
    return PipelineConfig(direction, pd.outcome_horizon_days, tuple(pd.treatment_actions), pd.unit_entity)


# --- template -------------------------------------------------------------------------------

_GUIDANCE = {
    ("meta", "title"): "Short project name.",
    ("business_impact", "goal"): "The single aggregate number the new policy must move, and how it is measured.",
    ("business_impact", "goal_metric"): "Name of that KPI.",
    ("business_impact", "goal_direction"): '"maximize" or "minimize".',
    ("business_impact", "action"): "The lever we control; note anything that can stop a decision from being carried out.",
    ("business_impact", "decision"): "The existing decision process the policy changes, and the information it uses today.",
    ("policy_definition", "unit"): "What one row is: an entity at the moment a decision is made, plus eligibility rules.",
    ("policy_definition", "unit_entity"): "Entity key, e.g. customer or subscription.",
    ("policy_definition", "unit_decision_moment"): "When the decision for that entity is taken.",
    ("policy_definition", "treatment"): "Which actions the policy may prescribe and how logged activity maps to them.",
    ("policy_definition", "treatment_actions"): "Action names, excluding the implicit do-nothing control.",
    ("policy_definition", "outcomes"): "Per-unit result to optimize, measured from the decision moment.",
    ("policy_definition", "outcome_terms"): "Keywords that evaluation_metrics must mention.",
    ("policy_definition", "outcome_horizon_days"): "Length of the outcome window in days.",
    ("policy_validation", "evaluation_metrics"): "Measurable metric (or faster proxy) used to score the policy.",
    ("policy_validation", "tracking"): "How decisions and performed actions are logged and joined back to policy output.",
    ("policy_validation", "compliance"): "How agreement between decided and performed actions is measured, and known reasons it breaks.",
    ("policy_validation", "delivery"): "How and when decisions reach the people or systems that act on them.",
}

_PLACEHOLDER = {"outcome_horizon_days": 30, "treatment_actions": [], "outcome_terms": [], "goal_direction": "minimize"}


def canvas_template() -> str:
    """Commented canvas with every key present and empty."""
    out = ["# Prescriptive Canvas", "# Fill every cell; run `prescriptive canvas validate` to check it.", ""]
    for section in SECTIONS:
        out.append(f"[{section}]")
        for key in _section_keys(section):
            out.append(f"# {_GUIDANCE[(section, key)]}")
            out.append(f"{key} = {json.dumps(_PLACEHOLDER.get(key, ''))}")
        out.append("")
    return "\n".join(out)
