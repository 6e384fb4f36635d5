"""Compilation to floats, RK4 integration, and the closed-form family."""

import math

import numpy as np
import pytest

from hamsys import dirac, dynamics
from hamsys.dynamics import CompiledSystem, FamilyConstants


@pytest.fixture
def system(chain):
    return dynamics.compile_rhs(dirac.hamilton_eom(chain))


CONSTANTS = FamilyConstants(a=0.8, b=-0.3, c1=0.4, c2=-1.1)


def test_compiled_variables_follow_registry_order(system):
    assert system.variables == ["q1", "q2", "q3", "p1", "p2", "p3"]


def test_rhs_matches_family_derivative(system):
    # d/dt of the closed form, sampled exactly
    for t in (0.0, 0.37, 1.0):
        state = dynamics.family_state(CONSTANTS, t)
        y = np.array([state[name] for name in system.variables])
        rate = system.rhs(t, y)
        e = math.exp(2 * t)
        a, b = CONSTANTS.a, CONSTANTS.b
        expected = {
            "q1": 2 * a * e - 1,
            "q2": 4 * a * e + 1,
            "q3": a * e - 2 * b / e,
            "p1": 4 * a * e,
            "p2": -1.0,
            "p3": 3 * a * e - 2 * b / e,
        }
        for j, name in enumerate(system.variables):
            assert rate[j] == pytest.approx(expected[name], rel=1e-12, abs=1e-12)


def test_integration_tracks_family(system, chain):
    initial = dynamics.family_state(CONSTANTS, 0.0)
    traj = dynamics.integrate_rk4(
        system, initial, 0.0, 1.0, 1e-3, constraints=chain.exprs()
    )
    assert dynamics.max_family_error(traj, CONSTANTS) < 1e-9
    report = traj.to_report()
    assert report["steps"] == 1000
    assert max(report["max_residuals"]) < 1e-10


def test_constraints_start_on_surface(system, chain):
    initial = dynamics.family_state(CONSTANTS, 0.0)
    traj = dynamics.integrate_rk4(
        system, initial, 0.0, 0.01, 1e-3, constraints=chain.exprs()
    )
    assert abs(traj.residuals[0]).max() < 1e-14


def test_final_partial_step_lands_exactly(system):
    initial = dynamics.family_state(CONSTANTS, 0.0)
    traj = dynamics.integrate_rk4(system, initial, 0.0, 0.35, 0.1)
    assert traj.times[-1] == pytest.approx(0.35, abs=0.0)
    assert len(traj.times) == 5  # 0, .1, .2, .3, .35


def test_fourth_order_convergence(system):
    initial = dynamics.family_state(CONSTANTS, 0.0)
    coarse = dynamics.integrate_rk4(system, initial, 0.0, 1.0, 0.02)
    fine = dynamics.integrate_rk4(system, initial, 0.0, 1.0, 0.01)
    ratio = dynamics.max_family_error(coarse, CONSTANTS) / dynamics.max_family_error(
        fine, CONSTANTS
    )
    assert 12 <= ratio <= 20


def test_integration_validation(system):
    initial = dynamics.family_state(CONSTANTS, 0.0)
    with pytest.raises(ValueError, match="dt"):
        dynamics.integrate_rk4(system, initial, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError, match="t1"):
        dynamics.integrate_rk4(system, initial, 1.0, 0.0, 0.1)
    with pytest.raises(ValueError, match="missing"):
        dynamics.integrate_rk4(system, {"q1": 0.0}, 0.0, 1.0, 0.1)


def test_nonfinite_state_is_reported():
    blowup = CompiledSystem(variables=["x"], rhs=lambda t, y: y * y)
    with np.errstate(over="ignore"), pytest.raises(RuntimeError, match="non-finite"):
        dynamics.integrate_rk4(blowup, {"x": 5.0}, 0.0, 2.0, 0.1)


def test_compile_rejects_free_multipliers(gauged_leg):
    chain = dirac.run_chain(gauged_leg)
    with pytest.raises(ValueError, match="non-dynamical symbol"):
        dynamics.compile_rhs(dirac.hamilton_eom(chain))


def test_compile_rejects_odd_variables(cx):
    s = cx.registry.sym
    with pytest.raises(ValueError, match="odd variables"):
        dynamics.compile_scalar(s("C1"), ["C1"])


def test_family_fit_roundtrip():
    state = dynamics.family_state(CONSTANTS, 0.0)
    fitted = dynamics.fit_family_constants(state)
    assert fitted.a == pytest.approx(CONSTANTS.a, abs=1e-12)
    assert fitted.b == pytest.approx(CONSTANTS.b, abs=1e-12)
    assert fitted.c1 == pytest.approx(CONSTANTS.c1, abs=1e-12)
    assert fitted.c2 == pytest.approx(CONSTANTS.c2, abs=1e-12)


def test_family_fit_rejects_off_surface_points():
    state = dynamics.family_state(CONSTANTS, 0.0)
    state["q1"] += 0.5
    with pytest.raises(ValueError, match="off the solution family"):
        dynamics.fit_family_constants(state)


def test_family_satisfies_constraints(chain):
    from hamsys.dynamics import compile_scalar

    names = ["q1", "q2", "q3", "p1", "p2", "p3"]
    residual_fns = [compile_scalar(c, names) for c in chain.exprs()]
    for t in (0.0, 0.5, 1.3):
        state = dynamics.family_state(CONSTANTS, t)
        y = np.array([state[n] for n in names])
        for fn in residual_fns:
            assert abs(fn(y)) < 1e-12


def test_per_variable_error_report(system):
    initial = dynamics.family_state(CONSTANTS, 0.0)
    traj = dynamics.integrate_rk4(system, initial, 0.0, 0.2, 0.01)
    errors = dynamics.compare_with_family(traj, CONSTANTS)
    assert set(errors) == set(system.variables)
    assert all(v < 1e-8 for v in errors.values())
