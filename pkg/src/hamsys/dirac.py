"""Constraint stabilization, classification, and Dirac brackets.

Starting from the primary constraints, each round demands weak preservation
of every known constraint under the total Hamiltonian (canonical part plus
one multiplier per primary).  A nonzero remainder either fixes a multiplier,
when it enters affinely with a usable coefficient, or joins the chain as a
new constraint in its raw bracket form; a nonzero constant remainder means
the system is inconsistent.  Classification and the bracket matrix are
computed weakly, modulo the full closed chain.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from hamsys.algebra import (
    GradedExpr,
    Parity,
    VarKind,
    mat_inverse,
    normalize,
    poisson_bracket,
    reduce_weak,
    substitute,
)
from hamsys.legendre import LegendreResult


class ConstraintClass(str, enum.Enum):
    FIRST = "first"
    SECOND = "second"


class InconsistentSystemError(RuntimeError):
    """Stabilization produced a nonzero constant: no solutions exist."""


@dataclass(eq=False)
class Constraint:
    expr: GradedExpr
    generation: int
    label: str
    cls: ConstraintClass | None = None


@dataclass(eq=False)
class ConstraintChain:
    ANALYSIS = "dirac"

    legendre: LegendreResult
    constraints: list[Constraint]
    delta: list[list[GradedExpr]]
    delta_reduced: list[list[GradedExpr]]
    delta_inverse: list[list[Fraction]] | None
    multiplier_names: list[str]
    multipliers: dict[str, GradedExpr | None]
    total_h: GradedExpr
    rounds: int

    @property
    def spec(self):
        return self.legendre.spec

    def exprs(self) -> list[GradedExpr]:
        return [c.expr for c in self.constraints]

    def classes(self) -> list[ConstraintClass]:
        return [c.cls for c in self.constraints]

    def to_report(self) -> dict:
        return {
            "constraints": [
                {
                    "label": c.label,
                    "expression": str(c.expr),
                    "generation": c.generation,
                    "class": c.cls.value if c.cls else None,
                }
                for c in self.constraints
            ],
            "delta": [[str(e) for e in row] for row in self.delta],
            "delta_inverse": (
                [[str(v) for v in row] for row in self.delta_inverse]
                if self.delta_inverse is not None
                else None
            ),
            "multipliers": {
                name: (str(expr) if expr is not None else None)
                for name, expr in self.multipliers.items()
            },
            "total_hamiltonian": str(self.total_h),
            "rounds": self.rounds,
        }


def _fresh_multiplier(registry, k: int) -> str:
    name = f"v{k}"
    while name in registry:
        name = "_" + name
    registry.declare(name, Parity.EVEN, VarKind.MULTIPLIER)
    return name


def run_chain(leg: LegendreResult, max_rounds: int = 16) -> ConstraintChain:
    """Stabilize the primary constraints into a closed chain."""
    registry = leg.spec.registry
    h_base = leg.canonical_h

    constraints = [
        Constraint(expr=c, generation=0, label=f"omega{i + 1}")
        for i, c in enumerate(leg.primary_constraints)
    ]
    multiplier_names = [
        _fresh_multiplier(registry, k + 1) for k in range(len(constraints))
    ]
    n_primary = len(constraints)
    fixings: dict[str, GradedExpr] = {}

    rounds = 0
    for _ in range(max_rounds):
        rounds += 1
        changed = False
        idx = 0
        while idx < len(constraints):
            con = constraints[idx]
            idx += 1
            condition = poisson_bracket(con.expr, h_base)
            for k in range(n_primary):
                br = poisson_bracket(con.expr, constraints[k].expr)
                if not br.is_zero():
                    condition = condition + registry.sym(multiplier_names[k]) * br
            if fixings:
                condition = substitute(condition, fixings)
            reduced = reduce_weak(condition, [c.expr for c in constraints])
            if reduced.is_zero():
                continue
            if reduced.is_constant():
                raise InconsistentSystemError(
                    f"preservation of {con.label} forces {reduced} = 0"
                )
            fixed_here = False
            for name in multiplier_names:
                if name in fixings or name not in reduced.variables():
                    continue
                try:
                    coeff, rest = condition.split_linear(name)
                except ValueError:
                    continue
                if coeff == 0:
                    continue
                fixings[name] = -rest / coeff
                changed = True
                fixed_here = True
                break
            if fixed_here:
                continue
            leftover_multipliers = [
                v for v in condition.variables() if v in multiplier_names
            ]
            if leftover_multipliers:
                raise RuntimeError(
                    "stabilization condition depends on multipliers "
                    f"{leftover_multipliers} in an unsolvable way"
                )
            constraints.append(
                Constraint(
                    expr=condition,
                    generation=con.generation + 1,
                    label=f"omega{len(constraints) + 1}",
                )
            )
            changed = True
        if not changed:
            break
    else:
        raise RuntimeError(f"constraint chain did not close in {max_rounds} rounds")

    exprs = [c.expr for c in constraints]
    m = len(constraints)
    delta = [[poisson_bracket(exprs[a], exprs[b]) for b in range(m)] for a in range(m)]
    delta_reduced = [[reduce_weak(delta[a][b], exprs) for b in range(m)] for a in range(m)]
    for a, con in enumerate(constraints):
        second = any(not delta_reduced[a][b].is_zero() for b in range(m))
        con.cls = ConstraintClass.SECOND if second else ConstraintClass.FIRST

    delta_inverse: list[list[Fraction]] | None = None
    if m and all(c.cls is ConstraintClass.SECOND for c in constraints) and all(
        delta_reduced[a][b].is_constant() for a in range(m) for b in range(m)
    ):
        matrix = [[delta_reduced[a][b].as_fraction() for b in range(m)] for a in range(m)]
        delta_inverse = mat_inverse(matrix)

    total_h = h_base
    for k in range(n_primary):
        coeff = fixings.get(multiplier_names[k])
        if coeff is None:
            coeff = registry.sym(multiplier_names[k])
        total_h = total_h + coeff * constraints[k].expr

    multipliers = {name: fixings.get(name) for name in multiplier_names}

    return ConstraintChain(
        legendre=leg,
        constraints=constraints,
        delta=delta,
        delta_reduced=delta_reduced,
        delta_inverse=delta_inverse,
        multiplier_names=multiplier_names,
        multipliers=multipliers,
        total_h=total_h,
        rounds=rounds,
    )


def dirac_bracket(f: GradedExpr, g: GradedExpr, chain: ConstraintChain) -> GradedExpr:
    """Dirac bracket of f and g for an all-second-class chain."""
    if chain.delta_inverse is None:
        raise ValueError(
            "Dirac brackets require an all-second-class chain with an invertible "
            "constant bracket matrix"
        )
    exprs = chain.exprs()
    result = poisson_bracket(f, g)
    left = [poisson_bracket(f, omega) for omega in exprs]
    right = [poisson_bracket(omega, g) for omega in exprs]
    for a in range(len(exprs)):
        for b in range(len(exprs)):
            coeff = chain.delta_inverse[a][b]
            if coeff != 0:
                result = result - coeff * left[a] * right[b]
    return result


def phase_variables(chain: ConstraintChain) -> list[str]:
    """Coordinate and momentum names in registry order."""
    kinds = (VarKind.COORD, VarKind.AUX_COORD, VarKind.MOMENTUM, VarKind.AUX_MOMENTUM)
    registry = chain.spec.registry
    return [v.name for v in registry.variables() if v.kind in kinds]


def hamilton_eom(chain: ConstraintChain) -> dict[str, GradedExpr]:
    """Time derivative of every phase variable under the total Hamiltonian."""
    registry = chain.spec.registry
    return {
        name: poisson_bracket(registry.sym(name), chain.total_h)
        for name in phase_variables(chain)
    }


def dirac_bracket_table(
    chain: ConstraintChain, names: list[str] | None = None
) -> dict[str, dict[str, GradedExpr]]:
    """All ordered Dirac brackets over the given (default: all phase) variables."""
    registry = chain.spec.registry
    if names is None:
        names = phase_variables(chain)
    table: dict[str, dict[str, GradedExpr]] = {}
    for a in names:
        table[a] = {}
        for b in names:
            table[a][b] = dirac_bracket(registry.sym(a), registry.sym(b), chain)
    return table


def first_class_combinations(chain: ConstraintChain) -> list[GradedExpr]:
    """Normalized first-class members of the chain (raw forms, no recombination)."""
    return [normalize(c.expr) for c in chain.constraints if c.cls is ConstraintClass.FIRST]
