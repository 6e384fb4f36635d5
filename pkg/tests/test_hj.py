"""Generator families, integrability closure, and parameter dynamics."""

from fractions import Fraction

import pytest

from hamsys import dirac, hamilton_jacobi as hj, legendre, models


@pytest.fixture
def system(leg):
    built = hj.build_hj_system(leg)
    hj.integrability_closure(built)
    return built


def test_generator_family(system, nhcs):
    s = nhcs.registry.sym
    labels = [label for label, _ in system.entries]
    assert labels == ["H'0", "H'2", "H'3"]
    h0 = (
        s("p0")
        + Fraction(1, 2) * (s("p1") ** 2 - 2 * s("p3") ** 2)
        + s("q1")
        + s("q2")
        + s("q3") ** 2
    )
    assert system.generator("H'0") == h0
    assert system.generator("H'2") == s("p2") + s("p3") - s("q1") - s("q3")
    assert system.generator("H'3") == 2 * s("p3") - s("p1") - 2 * s("q3") - 1
    with pytest.raises(KeyError):
        system.generator("H'9")


def test_primary_label_follows_coordinate_position(system):
    assert system.parameters == ["t0", "q2"]
    assert [label for label, _ in system.primary_entries()] == ["H'2"]
    assert [label for label, _ in system.derived_entries()] == ["H'3"]


def test_closure_fixes_remaining_velocity(system, nhcs):
    s = nhcs.registry.sym
    assert system.closed
    assert system.fixings == {"q2": 4 * s("p3") - 4 * s("q3") + 1}


def test_evolution_table(system, nhcs):
    reg = nhcs.registry
    s = reg.sym
    expected = {
        "t0": {"t0": reg.const(1), "q2": reg.const(0)},
        "q1": {"t0": s("p1"), "q2": reg.const(0)},
        "q2": {"t0": reg.const(0), "q2": reg.const(1)},
        "q3": {"t0": -2 * s("p3"), "q2": reg.const(1)},
        "p0": {"t0": reg.const(0), "q2": reg.const(0)},
        "p1": {"t0": reg.const(-1), "q2": reg.const(1)},
        "p2": {"t0": reg.const(-1), "q2": reg.const(0)},
        "p3": {"t0": -2 * s("q3"), "q2": reg.const(1)},
    }
    assert set(system.eom_table) == set(expected)
    for var, row in expected.items():
        assert system.eom_table[var] == row


def test_parameter_ode(system, nhcs):
    s = nhcs.registry.sym
    ode = hj.derive_parameter_ode(system, "q2")
    assert ode.parameter == "q2"
    assert ode.autonomous
    assert ode.coefficients == (Fraction(2), Fraction(-2))
    assert ode.expression == s("ddot(q2)") - 2 * s("dot(q2)") + 2


def test_parameter_ode_requires_fixing(system):
    with pytest.raises(ValueError, match="no velocity fixing"):
        hj.derive_parameter_ode(system, "t0")


def test_agreement_with_dirac(system, chain):
    comparison = hj.compare_with_dirac(system, chain)
    assert comparison["constraints_match"]
    assert comparison["constraint_pairs"] == [["H'2", "omega1"], ["H'3", "omega2"]]
    assert all(pair["match"] for pair in comparison["velocity_pairs"])
    assert comparison["match"]


def test_constraint_in_velocity_form(system, leg, nhcs):
    s = nhcs.registry.sym
    rewritten = hj.rewrite_constraint_in_velocities(system.generator("H'3"), leg)
    assert rewritten == -s("d(q1)") + s("d(q2)") - s("d(q3)") - 2 * s("q3") - 1


def test_regular_model_closes_immediately():
    leg = legendre.analyze(models.load("free_particle"))
    system = hj.build_hj_system(leg)
    hj.integrability_closure(system)
    assert [label for label, _ in system.entries] == ["H'0"]
    assert system.closed
    assert system.fixings == {}


def test_report_shape(system):
    report = system.to_report()
    assert [label for label, _ in report["generators"]] == ["H'0", "H'2", "H'3"]
    assert report["closed"] is True
    assert "velocity_fixings" in report
