"""Model grammar, rendering, hashing, and report plumbing."""

import json

import pytest

from hamsys import models
from hamsys.algebra import VarKind
from hamsys.modelio import (
    ParseError,
    emit_report,
    model_hash,
    parse_initial_conditions,
    parse_model,
    render_model,
    report_json,
    trajectory_csv,
)

MINIMAL = """\
model demo
coords a b
lagrangian: 1/2*d(a)^2 + a*d(b) - b^2
"""


def test_parse_minimal():
    spec = parse_model(MINIMAL)
    assert spec.name == "demo"
    assert spec.coordinates == ("a", "b")
    assert spec.aux == ()
    assert spec.momentum_names == {"a": "p_a", "b": "p_b"}
    assert spec.velocity_name("a") == "d(a)"


def test_registry_population():
    spec = parse_model(MINIMAL)
    reg = spec.registry
    assert reg.var("a").kind is VarKind.COORD
    assert reg.var("p_a").kind is VarKind.MOMENTUM
    assert reg.var("p_a").base == "a"
    assert reg.var("d(a)").kind is VarKind.VELOCITY
    assert reg.var("t0").kind is VarKind.TIME
    assert reg.var("p0").kind is VarKind.ENERGY


def test_numbered_coordinates_get_numbered_momenta(nhcs):
    assert nhcs.momentum_names == {"q1": "p1", "q2": "p2", "q3": "p3"}


def test_aux_coordinates(gauged):
    assert gauged.aux == ("theta",)
    assert gauged.momentum_names["theta"] == "pi_theta"
    assert gauged.registry.var("theta").kind is VarKind.AUX_COORD
    assert gauged.registry.var("pi_theta").kind is VarKind.AUX_MOMENTUM
    assert gauged.all_coordinates == ("q1", "q2", "q3", "theta")


def test_comments_and_whitespace_are_ignored():
    text = "# header\nmodel demo # trailing\ncoords a b\n\nlagrangian: d(a)*d(b)\n"
    spec = parse_model(text)
    assert spec.name == "demo"


def test_rational_literals():
    spec = parse_model("model m\ncoords x\nlagrangian: 3/4*d(x)^2 - 2*x\n")
    s = spec.registry.sym
    from fractions import Fraction

    assert spec.lagrangian == Fraction(3, 4) * s("d(x)") ** 2 - 2 * s("x")


@pytest.mark.parametrize(
    "text, fragment, line",
    [
        ("coords a\nlagrangian: a\n", "missing model statement", 1),
        ("model m\nlagrangian: 1\n", "missing coords statement", 1),
        ("model m\ncoords a\n", "missing lagrangian", 2),
        ("model m\ncoords d\nlagrangian: 1\n", "reserved name", 2),
        ("model m\ncoords a a\nlagrangian: a\n", "duplicate coordinate", 2),
        ("model m\ncoords a\nlagrangian: b\n", "unknown symbol", 3),
        ("model m\ncoords a\nlagrangian: d(b)\n", "undeclared coordinate", 3),
        ("model m\ncoords a\nlagrangian: d(a)^3\n", "velocity degree 3", 3),
        ("model m\ncoords a\nlagrangian: 1/0\n", "zero denominator", 3),
        ("model m\ncoords a\nlagrangian: a $\n", "unexpected character", 3),
    ],
)
def test_parse_errors_carry_position(text, fragment, line):
    with pytest.raises(ParseError) as excinfo:
        parse_model(text)
    assert fragment in str(excinfo.value)
    assert excinfo.value.line == line


def test_velocity_product_across_factors_is_caught():
    # degree 2 per factor but 4 in the expanded monomial
    with pytest.raises(ParseError, match="velocity degree 4"):
        parse_model("model m\ncoords a\nlagrangian: d(a)^2 * d(a)^2\n")


@pytest.mark.parametrize("name", sorted(models.BUNDLED))
def test_bundled_models_round_trip(name):
    spec = models.load(name)
    assert parse_model(render_model(spec)) == spec


def test_hash_is_stable_under_formatting():
    spec_a = parse_model("model m\ncoords x\nlagrangian: d(x)^2 + x\n")
    spec_b = parse_model("model m\ncoords   x\nlagrangian:   x + d(x)^2\n")
    assert model_hash(spec_a) == model_hash(spec_b)


def test_hash_separates_models():
    spec_a = parse_model("model m\ncoords x\nlagrangian: d(x)^2\n")
    spec_b = parse_model("model m\ncoords x\nlagrangian: d(x)^2 + x\n")
    assert model_hash(spec_a) != model_hash(spec_b)


def test_load_fresh_registries():
    one, two = models.load("nonholonomic"), models.load("nonholonomic")
    assert one.registry is not two.registry
    with pytest.raises(KeyError, match="free_particle"):
        models.load("unknown")


def test_emit_report_envelope(nhcs):
    report = emit_report({"k": 1}, nhcs, analysis="demo")
    assert report["engine"]["name"] == "hamsys"
    assert report["model"]["name"] == "nonholonomic"
    assert report["model"]["hash"] == model_hash(nhcs)
    assert report["analysis"] == "demo"
    assert report["results"] == {"k": 1}
    parsed = json.loads(report_json(report))
    assert parsed == report


def test_emit_report_requires_label_for_plain_dicts(nhcs):
    with pytest.raises(ValueError, match="analysis label"):
        emit_report({"k": 1}, nhcs)


def test_trajectory_csv_shape():
    text = trajectory_csv(
        ["x", "px"], [0.0, 0.5], [[1.0, 2.0], [3.0, 4.0]], [[0.0], [1e-15]]
    )
    lines = text.strip().split("\n")
    assert lines[0] == "t,x,px,res1"
    assert len(lines) == 3
    assert lines[1].startswith("0,1,2")


def test_parse_initial_conditions():
    values = parse_initial_conditions("x=1/2, px = -3", ["x", "px"])
    assert values == {"x": 0.5, "px": -3.0}
    with pytest.raises(ValueError, match="unknown variable"):
        parse_initial_conditions("y=1", ["x"])
    with pytest.raises(ValueError, match="expected name=value"):
        parse_initial_conditions("x", ["x"])
