"""Constraint chains, classification, Dirac brackets, equations of motion."""

import pytest

from hamsys import dirac, legendre
from hamsys.dirac import ConstraintClass, InconsistentSystemError
from hamsys.modelio import parse_model


def test_chain_profile(chain, nhcs):
    s = nhcs.registry.sym
    assert [c.label for c in chain.constraints] == ["omega1", "omega2"]
    assert [c.generation for c in chain.constraints] == [0, 1]
    assert chain.constraints[1].expr == 2 * s("p3") - s("p1") - 2 * s("q3") - 1
    assert chain.rounds == 2


def test_multiplier_is_fixed(chain, nhcs):
    s = nhcs.registry.sym
    assert chain.multiplier_names == ["v1"]
    assert chain.multipliers["v1"] == 4 * s("p3") - 4 * s("q3") + 1


def test_both_second_class(chain):
    assert chain.classes() == [ConstraintClass.SECOND, ConstraintClass.SECOND]


def test_bracket_matrix(chain):
    assert chain.delta[0][0] == 0
    assert chain.delta[0][1] == 1
    assert chain.delta[1][0] == -1
    assert chain.delta_inverse == [[0, -1], [1, 0]]


def test_total_hamiltonian_reduces_to_canonical(chain, leg):
    diff = chain.total_h - leg.canonical_h
    from hamsys.algebra import is_weakly_zero

    assert is_weakly_zero(diff, chain.exprs())


@pytest.mark.parametrize(
    "a, b, value",
    [
        ("q1", "p1", 0),
        ("q2", "p2", 1),
        ("q3", "p3", 1),
        ("q2", "q3", -2),
        ("q1", "q2", -1),
        ("q3", "q1", 1),
        ("p1", "p3", -2),
        ("q3", "p1", 2),
        ("q2", "p3", -2),
        ("q1", "p3", -1),
    ],
)
def test_reference_dirac_brackets(chain, nhcs, a, b, value):
    s = nhcs.registry.sym
    assert dirac.dirac_bracket(s(a), s(b), chain) == value


def test_dirac_bracket_antisymmetry_on_phase_variables(chain, nhcs):
    s = nhcs.registry.sym
    names = dirac.phase_variables(chain)
    for x in names:
        for y in names:
            lhs = dirac.dirac_bracket(s(x), s(y), chain)
            rhs = dirac.dirac_bracket(s(y), s(x), chain)
            assert lhs == -rhs


def test_constraints_are_central_for_dirac_bracket(chain, nhcs):
    s = nhcs.registry.sym
    for omega in chain.exprs():
        for name in dirac.phase_variables(chain):
            assert dirac.dirac_bracket(s(name), omega, chain).is_zero()


def test_equations_of_motion(chain, nhcs):
    s = nhcs.registry.sym
    eom = dirac.hamilton_eom(chain)
    assert eom["q1"] == s("p1")
    assert eom["q2"] == 4 * s("p3") - 4 * s("q3") + 1
    assert eom["q3"] == (
        4 * s("p2") + 6 * s("p3") - 4 * s("q1") - 8 * s("q3") + 1
    )
    assert eom["p1"] == 4 * s("p3") - 4 * s("q3")
    assert eom["p2"] == -1
    assert eom["p3"] == (
        4 * s("p2") + 8 * s("p3") - 4 * s("q1") - 10 * s("q3") + 1
    )


def test_bracket_table_is_complete(chain):
    table = dirac.dirac_bracket_table(chain)
    assert len(table) == 6
    entries = [value for row in table.values() for value in row.values()]
    assert len(entries) == 36
    assert all(value.is_constant() for value in entries)


def test_gauged_chain_is_first_class(gauged_leg):
    chain = dirac.run_chain(gauged_leg)
    assert len(chain.constraints) == 2
    assert chain.classes() == [ConstraintClass.FIRST, ConstraintClass.FIRST]
    assert chain.delta_inverse is None
    free = [name for name, v in chain.multipliers.items() if v is None]
    assert len(free) == 1


def test_dirac_bracket_requires_second_class(gauged_leg, gauged):
    chain = dirac.run_chain(gauged_leg)
    s = gauged.registry.sym
    with pytest.raises(ValueError, match="second-class"):
        dirac.dirac_bracket(s("q1"), s("p1"), chain)


def test_regular_model_has_empty_chain():
    from hamsys import models

    leg = legendre.analyze(models.load("free_particle"))
    chain = dirac.run_chain(leg)
    assert chain.constraints == []
    assert chain.total_h == leg.canonical_h


def test_inconsistent_system_is_detected():
    spec = parse_model("model broken\ncoords q1 q2\nlagrangian: 1/2*d(q1)^2 + q2\n")
    leg = legendre.analyze(spec)
    with pytest.raises(InconsistentSystemError, match="omega1"):
        dirac.run_chain(leg)


def test_first_class_combinations_empty_for_reference(chain):
    assert dirac.first_class_combinations(chain) == []
