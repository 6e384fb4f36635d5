"""Legendre transform on regular and singular models."""

from fractions import Fraction

import pytest

from hamsys import legendre, models
from hamsys.modelio import parse_model


def test_reference_momenta(leg, nhcs):
    s = nhcs.registry.sym
    half = Fraction(1, 2)
    assert leg.momenta["p1"] == s("d(q1)")
    assert leg.momenta["p2"] == half * (s("d(q3)") - s("d(q2)")) + s("q1") + s("q3")
    assert leg.momenta["p3"] == half * (s("d(q2)") - s("d(q3)"))


def test_reference_hessian_rank(leg):
    assert leg.rank == 2
    assert len(leg.hessian) == 3


def test_reference_primary_constraint(leg, nhcs):
    s = nhcs.registry.sym
    assert len(leg.primary_constraints) == 1
    assert leg.primary_constraints[0] == s("p2") + s("p3") - s("q1") - s("q3")


def test_reference_canonical_hamiltonian(leg, nhcs):
    s = nhcs.registry.sym
    expected = (
        Fraction(1, 2) * (s("p1") ** 2 - 2 * s("p3") ** 2)
        + s("q1")
        + s("q2")
        + s("q3") ** 2
    )
    assert leg.canonical_h == expected


def test_hamiltonian_contains_no_velocities(leg, nhcs):
    velocities = {nhcs.velocity_name(c) for c in nhcs.all_coordinates}
    assert not velocities & set(leg.canonical_h.variables())


def test_gauged_momenta(gauged_leg, gauged):
    s = gauged.registry.sym
    half = Fraction(1, 2)
    assert gauged_leg.momenta["p1"] == s("d(q1)") + 2 * s("theta")
    assert gauged_leg.momenta["p2"] == (
        half * (s("d(q3)") - s("d(q2)")) + s("q1") + s("q3") - s("theta")
    )
    assert gauged_leg.momenta["p3"] == half * (s("d(q2)") - s("d(q3)"))
    assert gauged_leg.momenta["pi_theta"] == -s("d(theta)") - 2 * s("theta")


def test_gauged_rank_and_primary(gauged_leg, gauged):
    s = gauged.registry.sym
    assert gauged_leg.rank == 3
    assert gauged_leg.primary_constraints == [
        s("theta") + s("p2") + s("p3") - s("q1") - s("q3")
    ]


def test_free_particle_is_regular():
    result = legendre.analyze(models.load("free_particle"))
    s = result.spec.registry.sym
    assert result.rank == 1
    assert result.primary_constraints == []
    assert result.canonical_h == Fraction(1, 2) * s("p_x") ** 2


def test_fully_degenerate_lagrangian():
    spec = parse_model("model line\ncoords x\nlagrangian: d(x)\n")
    result = legendre.analyze(spec)
    assert result.rank == 0
    assert result.primary_constraints == [spec.registry.sym("p_x") - 1]
    assert result.canonical_h.is_zero()


def test_rejects_cubic_velocity_terms():
    spec = parse_model("model bad\ncoords x y\nlagrangian: d(x)^2*y + x*d(y)\n")
    # quadratic in velocities but with a coordinate-dependent Hessian
    with pytest.raises(ValueError, match="quadratic"):
        legendre.analyze(spec)


def test_report_shape(leg):
    report = leg.to_report()
    assert report["rank"] == 2
    assert set(report["momenta"]) == {"p1", "p2", "p3"}
    assert len(report["primary_constraints"]) == 1
