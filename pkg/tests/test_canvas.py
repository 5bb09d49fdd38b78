import copy

import pytest
from hypothesis import given, settings, strategies as st

from prescriptive.canvas import (
    CELL_LABELS,
    CELLS,
    Canvas,
    canvas_template,
    canvas_to_pipeline_config,
    load_canvas,
    parse_canvas,
    render_markdown,
    serialize_canvas,
    validate_canvas,
)
from prescriptive.errors import CanvasSyntaxError, DuplicateKey, InvalidCanvas, UnknownKey, UnknownSection


@pytest.fixture
def churn(fixtures_dir):
    return load_canvas(fixtures_dir / "churn.canvas")


def test_churn_fixture_parses(churn):
    assert churn.business_impact.goal_direction == "minimize"
    assert churn.policy_definition.outcome_horizon_days == 30
    assert churn.policy_definition.treatment_actions == ["call"]
    assert validate_canvas(churn) == []


@pytest.mark.parametrize("name", ["churn.canvas", "conversion.canvas"])
def test_fixtures_are_canonical(fixtures_dir, name):
    text = (fixtures_dir / name).read_bytes().decode("utf-8")
    canvas = parse_canvas(text)
    assert serialize_canvas(canvas) == text
    assert parse_canvas(serialize_canvas(canvas)) == canvas
    assert serialize_canvas(canvas).encode("utf-8") == serialize_canvas(copy.deepcopy(canvas)).encode("utf-8")


def test_duplicate_key_names_line():
    text = '[business_impact]\ngoal = "a"\n# comment\ngoal = "b"\n'
    with pytest.raises(DuplicateKey) as info:
        parse_canvas(text)
    assert info.value.line == 4
    assert "line 4" in str(info.value)


@pytest.mark.parametrize(
    "text, error, line",
    [
        ("[nope]\n", UnknownSection, 1),
        ('[meta]\ncolour = "x"\n', UnknownKey, 2),
        ('title = "x"\n', CanvasSyntaxError, 1),
        ("[meta]\ntitle = unquoted\n", CanvasSyntaxError, 2),
        ("[meta]\ntitle\n", CanvasSyntaxError, 2),
        ('[policy_definition]\noutcome_horizon_days = "30"\n', CanvasSyntaxError, 2),
        ('[policy_definition]\ntreatment_actions = "call"\n', CanvasSyntaxError, 2),
        ('[business_impact]\ngoal_direction = "sideways"\n', CanvasSyntaxError, 2),
        ("[meta\n", CanvasSyntaxError, 1),
    ],
)
def test_parse_errors(text, error, line):
    with pytest.raises(error) as info:
        parse_canvas(text)
    assert info.value.line == line


def test_crlf_input_parses(fixtures_dir):
    text = (fixtures_dir / "churn.canvas").read_text(encoding="utf-8")
    assert parse_canvas(text.replace("\n", "\r\n")) == parse_canvas(text)


def test_empty_file_has_ten_violations():
    canvas = parse_canvas("")
    assert canvas == Canvas()
    violations = validate_canvas(canvas)
    assert len(violations) == 10
    assert {v.rule for v in violations} == {"R1"}
    assert serialize_canvas(canvas) == ""


@pytest.mark.parametrize("section, key", CELLS, ids=[k for _, k in CELLS])
def test_single_cell_deletion(churn, section, key):
    setattr(getattr(churn, section), key, None)
    violations = validate_canvas(churn)
    assert len(violations) == 1
    assert (violations[0].cell, violations[0].rule) == (f"{section}.{key}", "R1")
    # the same holds after a trip through the file format
    assert validate_canvas(parse_canvas(serialize_canvas(churn))) == violations


def test_absent_cells_serialize_present_keys_only(churn):
    churn.policy_validation = type(churn.policy_validation)()
    text = serialize_canvas(churn)
    assert "[policy_validation]" not in text
    churn.policy_definition.outcome_terms = None
    assert "outcome_terms" not in serialize_canvas(churn)


@pytest.mark.parametrize(
    "mutate, cell, rule",
    [
        (lambda c: setattr(c.policy_definition, "outcome_horizon_days", 0), "policy_definition.outcome_horizon_days", "R4"),
        (lambda c: setattr(c.policy_definition, "outcome_horizon_days", None), "policy_definition.outcome_horizon_days", "R4"),
        (lambda c: setattr(c.business_impact, "goal_direction", None), "business_impact.goal_direction", "R2"),
        (lambda c: setattr(c.policy_definition, "treatment_actions", []), "policy_definition.treatment_actions", "R3"),
        (lambda c: setattr(c.policy_definition, "outcome_terms", ["revenue"]), "policy_validation.evaluation_metrics", "R5"),
        (lambda c: setattr(c.policy_definition, "unit_entity", " "), "policy_definition.unit", "R6"),
        (lambda c: setattr(c.policy_definition, "unit_decision_moment", None), "policy_definition.unit", "R6"),
    ],
)
def test_structured_rules(churn, mutate, cell, rule):
    mutate(churn)
    violations = validate_canvas(churn)
    assert [(v.cell, v.rule) for v in violations] == [(cell, rule)]


def test_outcome_terms_match_case_insensitively(churn):
    churn.policy_definition.outcome_terms = ["CHURN"]
    assert validate_canvas(churn) == []


def test_render(churn):
    md = render_markdown(churn)
    for header in ("Business Impact", "Policy Definition", "Policy Validation"):
        assert header in md
    assert md == render_markdown(copy.deepcopy(churn))
    table = [line for line in md.splitlines() if line.startswith("|")]
    assert len(table) == 2 + 4  # header, separator, then the deepest column has four cells
    for label in CELL_LABELS.values():
        assert md.count(f"**{label}**") == 1


def test_render_escapes_pipes(churn):
    churn.policy_validation.delivery = "CRM | queue\nsecond line"
    md = render_markdown(churn)
    assert "CRM \\| queue<br>second line" in md


def test_render_rejects_invalid(churn):
    churn.policy_validation.compliance = ""
    with pytest.raises(InvalidCanvas) as info:
        render_markdown(churn)
    assert [(v.cell, v.rule) for v in info.value.violations] == [("policy_validation.compliance", "R1")]


def test_pipeline_config(churn, fixtures_dir):
    cfg = canvas_to_pipeline_config(churn)
    assert (cfg.outcome_direction, cfg.horizon, cfg.action_set, cfg.unit_key) == ("lower_is_better", 30, ("call",), "customer")
    conv = canvas_to_pipeline_config(load_canvas(fixtures_dir / "conversion.canvas"))
    assert conv.outcome_direction == "higher_is_better"
    churn.business_impact.goal_direction = None
    with pytest.raises(InvalidCanvas):
        canvas_to_pipeline_config(churn)


def test_template_is_a_parseable_skeleton():
    text = canvas_template()
    canvas = parse_canvas(text)
    assert len(validate_canvas(canvas)) == 10
    for _, key in CELLS:
        assert key in text


# --- round trip over generated canvases ----------------------------------------------------

text_value = st.text(st.characters(blacklist_categories=("Cs",)), max_size=40)
maybe_text = st.none() | text_value
maybe_list = st.none() | st.lists(text_value, max_size=4)


@st.composite
def canvases(draw):
    c = Canvas()
    c.meta.title = draw(maybe_text)
    bi = c.business_impact
    bi.goal, bi.goal_metric, bi.action, bi.decision = (draw(maybe_text) for _ in range(4))
    bi.goal_direction = draw(st.sampled_from([None, "maximize", "minimize"]))
    pd = c.policy_definition
    pd.unit, pd.unit_entity, pd.unit_decision_moment, pd.treatment, pd.outcomes = (draw(maybe_text) for _ in range(5))
    pd.treatment_actions = draw(maybe_list)
    pd.outcome_terms = draw(maybe_list)
    pd.outcome_horizon_days = draw(st.none() | st.integers(-(10**12), 10**12))
    pv = c.policy_validation
    pv.evaluation_metrics, pv.tracking, pv.compliance, pv.delivery = (draw(maybe_text) for _ in range(4))
    return c


@settings(max_examples=1000, deadline=None)
@given(canvases())
def test_round_trip_property(canvas):
    text = serialize_canvas(canvas)
    back = parse_canvas(text)
    assert back == canvas
    assert serialize_canvas(back) == text
