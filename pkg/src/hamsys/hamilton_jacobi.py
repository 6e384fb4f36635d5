"""Multi-parameter canonical evolution for degenerate Lagrangians.

Each primary constraint is rewritten as a Hamiltonian-like generator
H'(position) = momentum + remainder, joining H'0 = p0 + H built from the
canonical Hamiltonian and the time pair.  Evolution is then driven by all
parameters at once: dF = {F, H'0} dt + sum_a {F, H'a} dq_a, with brackets
taken in the extended space.  The closure loop demands integrability of the
whole family; remainders either fix a parameter velocity or contribute new
generators, labelled with the next free index.

Weak reduction inside the loop uses the affine generators only (primaries
and derived constraints); H'0 itself is quadratic and never used as a pivot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from hamsys.algebra import (
    GradedExpr,
    Parity,
    VarKind,
    express_in_span,
    extended_bracket,
    grad_derivative,
    is_weakly_zero,
    normalize,
    substitute,
)
from hamsys.dirac import ConstraintChain
from hamsys.legendre import LegendreResult


@dataclass(eq=False)
class ParameterODE:
    parameter: str
    velocity: GradedExpr
    expression: GradedExpr  # residual form in dot/ddot symbols; zero along solutions
    autonomous: bool
    coefficients: tuple[Fraction, Fraction] | None

    def to_report(self) -> dict:
        return {
            "parameter": self.parameter,
            "velocity": str(self.velocity),
            "expression": str(self.expression),
            "autonomous": self.autonomous,
            "coefficients": (
                [str(c) for c in self.coefficients] if self.coefficients else None
            ),
        }


@dataclass(eq=False)
class HJSystem:
    ANALYSIS = "hamilton-jacobi"

    legendre: LegendreResult
    entries: list[tuple[str, GradedExpr]]  # H'0, primaries, then derived
    n_primary: int
    parameters: list[str]  # "t0" plus one coordinate per primary
    dot_names: dict[str, str]  # parameter coordinate -> formal velocity symbol
    eom_table: dict[str, dict[str, GradedExpr]]
    fixings: dict[str, GradedExpr] = field(default_factory=dict)
    closed: bool = False
    rounds: int = 0

    @property
    def spec(self):
        return self.legendre.spec

    def generator(self, label: str) -> GradedExpr:
        for name, expr in self.entries:
            if name == label:
                return expr
        raise KeyError(label)

    def primary_entries(self) -> list[tuple[str, GradedExpr]]:
        return self.entries[1 : 1 + self.n_primary]

    def derived_entries(self) -> list[tuple[str, GradedExpr]]:
        return self.entries[1 + self.n_primary :]

    def to_report(self) -> dict:
        return {
            "generators": [[label, str(expr)] for label, expr in self.entries],
            "parameters": list(self.parameters),
            "eom_table": {
                var: {param: str(expr) for param, expr in row.items()}
                for var, row in self.eom_table.items()
            },
            "derived": [[label, str(expr)] for label, expr in self.derived_entries()],
            "velocity_fixings": {k: str(v) for k, v in self.fixings.items()},
            "closed": self.closed,
            "rounds": self.rounds,
        }


def _table_variables(leg: LegendreResult) -> list[str]:
    registry = leg.spec.registry
    coords = [
        v.name
        for v in registry.variables()
        if v.kind in (VarKind.COORD, VarKind.AUX_COORD)
    ]
    momenta = [
        v.name
        for v in registry.variables()
        if v.kind in (VarKind.MOMENTUM, VarKind.AUX_MOMENTUM)
    ]
    return ["t0", *coords, "p0", *momenta]


def build_hj_system(leg: LegendreResult) -> HJSystem:
    """Generators, parameters, and the multi-parameter evolution table."""
    registry = leg.spec.registry
    coords = leg.spec.all_coordinates

    entries: list[tuple[str, GradedExpr]] = [
        ("H'0", registry.sym("p0") + leg.canonical_h)
    ]
    parameters = ["t0"]
    dot_names: dict[str, str] = {}
    for constraint in leg.primary_constraints:
        momentum = next(
            v
            for v in constraint.variables()
            if registry.var(v).kind in (VarKind.MOMENTUM, VarKind.AUX_MOMENTUM)
            and registry.var(v).name in leg.dependent_momenta
        )
        coordinate = registry.var(momentum).base
        position = coords.index(coordinate) + 1
        entries.append((f"H'{position}", constraint))
        parameters.append(coordinate)
        dot = f"dot({coordinate})"
        registry.ensure(dot, Parity.EVEN, VarKind.FORMAL)
        dot_names[coordinate] = dot

    eom_table: dict[str, dict[str, GradedExpr]] = {}
    for var in _table_variables(leg):
        row: dict[str, GradedExpr] = {}
        for param, (label, gen) in zip(parameters, entries):
            row[param] = extended_bracket(registry.sym(var), gen)
        eom_table[var] = row

    return HJSystem(
        legendre=leg,
        entries=entries,
        n_primary=len(leg.primary_constraints),
        parameters=parameters,
        dot_names=dot_names,
        eom_table=eom_table,
    )


def _next_label(entries: list[tuple[str, GradedExpr]]) -> str:
    used = [int(label[2:]) for label, _ in entries if label[2:].isdigit()]
    return f"H'{max(used) + 1}"


def integrability_closure(system: HJSystem, max_rounds: int = 16) -> HJSystem:
    """Demand integrability of the whole generator family.

    Remainders linear in a parameter velocity with constant coefficient fix
    that velocity; remaining pieces are appended (normalized) as derived
    generators.  A nonzero constant remainder raises.
    """
    registry = system.spec.registry
    primaries = system.primary_entries()
    dot_syms = {
        coord: registry.sym(name) for coord, name in system.dot_names.items()
    }

    for _ in range(max_rounds):
        system.rounds += 1
        changed = False
        idx = 0
        while idx < len(system.entries):
            _, gen = system.entries[idx]
            idx += 1
            condition = extended_bracket(gen, system.entries[0][1])
            for (label, primary), coord in zip(primaries, system.parameters[1:]):
                br = extended_bracket(gen, primary)
                if not br.is_zero():
                    condition = condition + br * dot_syms[coord]
            if system.fixings:
                condition = substitute(
                    condition,
                    {system.dot_names[c]: v for c, v in system.fixings.items()},
                )
            reduction_set = [expr for _, expr in system.entries[1:]]
            if condition.is_zero() or is_weakly_zero(condition, reduction_set):
                continue
            fixed_here = False
            for coord, dot in system.dot_names.items():
                if coord in system.fixings or dot not in condition.variables():
                    continue
                try:
                    coeff, rest = condition.split_linear(dot)
                except ValueError:
                    continue
                if coeff == 0:
                    continue
                system.fixings[coord] = -rest / coeff
                changed = True
                fixed_here = True
                break
            if fixed_here:
                continue
            # Split off the velocity-coefficient pieces and keep each one
            # that is weakly new as a derived generator.
            pieces = [
                substitute(
                    condition,
                    {d: registry.const(0) for d in system.dot_names.values()},
                )
            ]
            for dot in system.dot_names.values():
                pieces.append(grad_derivative(condition, dot, "left"))
            appended = False
            for piece in pieces:
                if piece.is_zero():
                    continue
                if is_weakly_zero(piece, reduction_set):
                    continue
                if piece.is_constant():
                    raise RuntimeError(
                        f"integrability forces the constant {piece} = 0"
                    )
                system.entries.append((_next_label(system.entries), normalize(piece)))
                reduction_set.append(normalize(piece))
                appended = True
            if appended:
                changed = True
        if not changed:
            system.closed = True
            break
    if not system.closed:
        raise RuntimeError(f"closure did not terminate in {max_rounds} rounds")
    return system


def derive_parameter_ode(system: HJSystem, parameter: str) -> ParameterODE:
    """Second-order ODE satisfied by a fixed parameter velocity."""
    if parameter not in system.fixings:
        raise ValueError(f"no velocity fixing for parameter {parameter!r}")
    registry = system.spec.registry
    velocity = system.fixings[parameter]
    primaries = system.primary_entries()

    rate = extended_bracket(velocity, system.entries[0][1])
    for (label, primary), coord in zip(primaries, system.parameters[1:]):
        br = extended_bracket(velocity, primary)
        if not br.is_zero():
            rate = rate + br * registry.sym(system.dot_names[coord])
    rate = substitute(
        rate, {system.dot_names[c]: v for c, v in system.fixings.items()}
    )

    dot = registry.sym(system.dot_names[parameter])
    ddot_name = f"ddot({parameter})"
    registry.ensure(ddot_name, Parity.EVEN, VarKind.FORMAL)
    ddot = registry.sym(ddot_name)

    fit = express_in_span(rate, [velocity, registry.const(1)])
    if fit is not None:
        a, b = fit
        return ParameterODE(
            parameter=parameter,
            velocity=velocity,
            expression=ddot - a * dot - b,
            autonomous=True,
            coefficients=(a, b),
        )
    return ParameterODE(
        parameter=parameter,
        velocity=velocity,
        expression=ddot - rate,
        autonomous=False,
        coefficients=None,
    )


def compare_with_dirac(system: HJSystem, chain: ConstraintChain) -> dict:
    """Match generators against chain constraints and fixings vs multipliers."""
    hj_items = [(label, expr) for label, expr in system.entries[1:]]
    chain_items = [(c.label, c.expr) for c in chain.constraints]

    chain_by_key = {normalize(expr).key(): label for label, expr in chain_items}
    pairs: list[list[str | None]] = []
    matched_chain: set[str] = set()
    for label, expr in hj_items:
        partner = chain_by_key.get(normalize(expr).key())
        pairs.append([label, partner])
        if partner is not None:
            matched_chain.add(partner)
    constraints_match = all(p[1] is not None for p in pairs) and len(
        matched_chain
    ) == len(chain_items)

    velocity_pairs: list[dict] = []
    velocities_match = True
    for k, coord in enumerate(system.parameters[1:]):
        fixing = system.fixings.get(coord)
        multiplier = chain.multipliers.get(chain.multiplier_names[k])
        if fixing is None or multiplier is None:
            ok = fixing is None and multiplier is None
        else:
            ok = fixing == multiplier
        velocities_match = velocities_match and ok
        velocity_pairs.append(
            {
                "parameter": coord,
                "velocity_fixing": str(fixing) if fixing is not None else None,
                "multiplier": str(multiplier) if multiplier is not None else None,
                "match": ok,
            }
        )

    return {
        "constraints_match": constraints_match,
        "constraint_pairs": pairs,
        "velocity_pairs": velocity_pairs,
        "match": constraints_match and velocities_match,
    }


def rewrite_constraint_in_velocities(
    expr: GradedExpr, leg: LegendreResult
) -> GradedExpr:
    """Rewrite a phase-space constraint through the defining momentum relations."""
    registry = leg.spec.registry
    moved = expr.in_registry(registry)
    return substitute(moved, dict(leg.momenta))
