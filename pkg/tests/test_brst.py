"""BRST charge, gauge fixing, transformations, ghost-extended constraints."""

import pytest

from hamsys import brst
from hamsys.algebra import Parity, poisson_bracket


def test_ghost_declarations(cx):
    assert cx.ghost_names["C"] == ["C1", "C2"]
    assert cx.ghost_names["Pbar"] == ["Pbar1", "Pbar2"]
    assert cx.ghost_names["P"] == ["P1", "P2"]
    assert cx.ghost_names["Cbar"] == ["Cbar1", "Cbar2"]
    assert cx.ghost_names["N"] == ["N1", "N2"]
    assert cx.ghost_names["B"] == ["B1", "B2"]
    reg = cx.registry
    assert reg.var("C1").parity is Parity.ODD
    assert reg.var("C1").ghost_number == 1
    assert reg.var("Pbar1").ghost_number == -1
    assert reg.var("N1").parity is Parity.EVEN
    assert reg.var("lam").parity is Parity.ODD


def test_charge_structure(cx):
    s = cx.registry.sym
    expected = (
        s("C1") * cx.constraints[0]
        + s("C2") * cx.constraints[1]
        + s("P1") * s("B1")
        + s("P2") * s("B2")
    )
    assert cx.charge == expected
    assert cx.charge.parity() is Parity.ODD
    assert cx.charge.ghost_number() == 1


def test_charge_is_nilpotent(cx):
    assert poisson_bracket(cx.charge, cx.charge).is_zero()


def test_minimal_hamiltonian(cx, emb):
    s = cx.registry.sym
    h_prime = emb.fc_hamiltonian_prime.in_registry(cx.registry)
    assert cx.minimal_h == h_prime + s("C1") * s("Pbar2")
    assert poisson_bracket(cx.charge, cx.minimal_h).is_zero()


def test_gauge_fermion_grading(cx):
    assert cx.gauge_fermion.parity() is Parity.ODD
    assert cx.gauge_fermion.ghost_number() == -1
    assert cx.total_h.ghost_number() == 0
    assert poisson_bracket(cx.charge, cx.total_h).is_zero()


def test_identity_report(cx):
    identities = brst.check_brst_identities(cx)
    assert identities["holds"]
    assert identities["nilpotent"]
    assert identities["minimal_invariant"]
    assert identities["total_invariant"]
    assert identities["q_squared"] == "0"


def test_antighost_evolves_into_momentum(cx):
    # fixes the overall sign of the gauge-fixed Hamiltonian
    s = cx.registry.sym
    for a in ("1", "2"):
        rate = poisson_bracket(s(f"Cbar{a}"), cx.total_h)
        assert rate == s(f"Pbar{a}")


def test_transformation_table(cx):
    table = brst.brst_table(cx)
    s = cx.registry.sym
    lam, c1, c2 = s("lam"), s("C1"), s("C2")
    assert table["q1"] == -lam * c2
    assert table["q2"] == lam * c1
    assert table["q3"] == lam * (c1 + 2 * c2)
    assert table["theta"] == -lam * c2
    assert table["Cbar1"] == -lam * s("B1")
    assert table["Cbar2"] == -lam * s("B2")
    for name in ("C1", "C2", "B1", "B2"):
        assert table[name].is_zero()
    assert len(table) == 10


def test_transformation_is_nilpotent_on_coordinates(cx):
    s = cx.registry.sym
    for name in ("q1", "q2", "q3", "theta"):
        step = poisson_bracket(s(name), cx.charge)
        assert poisson_bracket(step, cx.charge).is_zero()


def test_transform_requires_homogeneous_argument(cx):
    s = cx.registry.sym
    assert brst.brst_transform(cx, s("q2")) == s("lam") * s("C1")
    with pytest.raises(ValueError, match="mixed parity|homogeneous"):
        brst.brst_transform(cx, s("q1") + s("C1"))


def test_no_gauge_means_minimal_dynamics(emb):
    cx = brst.build_complex(emb, gauge=None)
    assert cx.gauge_fermion.is_zero()
    assert cx.total_h == cx.minimal_h


def test_custom_gauge_conditions(emb, chain):
    conditions = [expr.in_registry(chain.spec.registry) for expr in chain.exprs()]
    cx = brst.build_complex(emb, gauge=conditions)
    assert brst.check_brst_identities(cx)["holds"]


def test_custom_gauge_validation(emb, nhcs):
    with pytest.raises(ValueError, match="gauge conditions"):
        brst.build_complex(emb, gauge=[nhcs.registry.sym("q1")])


def test_ghost_extended_constraint(cx, gauged_leg):
    ext = brst.ghost_extended_constraint(cx, gauged_leg)
    reg = ext.registry
    s = reg.sym
    expected = (
        -s("d(q1)")
        + s("d(q2)")
        - s("d(q3)")
        - 2 * s("q3")
        - 1
        + s("d(theta)")
        + s("B2")
    )
    assert ext == expected


def test_ghost_extended_constraint_checks_coverage(cx, gauged_leg):
    relations = {"p1": gauged_leg.momenta["p1"]}
    with pytest.raises(ValueError, match="missing momentum relation"):
        brst.ghost_extended_constraint(cx, gauged_leg, relations=relations)
