"""Exact Legendre transform for velocity-quadratic Lagrangians.

Momenta are read off symbolically, the (constant, exact-rational) velocity
Hessian is pivoted column by column, and the degenerate directions become
primary constraints.  The canonical Hamiltonian is expressed in coordinates
and the solvable momenta only; dependent momenta are eliminated through
their constraint-solved forms, which also cancels every free-velocity term.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from hamsys.algebra import GradedExpr, VarKind, grad_derivative, substitute
from hamsys.modelio import ModelSpec


@dataclass(eq=False)
class LegendreResult:
    ANALYSIS = "legendre"

    spec: ModelSpec
    momenta: dict[str, GradedExpr]  # momentum name -> dL/dv, in coordinates and velocities
    hessian: list[list[Fraction]]
    rank: int
    solvable_velocities: dict[str, GradedExpr]
    primary_constraints: list[GradedExpr]
    dependent_momenta: dict[str, GradedExpr]  # momentum name -> solved form in (q, p)
    canonical_h: GradedExpr

    def to_report(self) -> dict:
        return {
            "momenta": {name: str(expr) for name, expr in self.momenta.items()},
            "hessian": [[str(v) for v in row] for row in self.hessian],
            "rank": self.rank,
            "solvable_velocities": {
                name: str(expr) for name, expr in self.solvable_velocities.items()
            },
            "primary_constraints": [str(c) for c in self.primary_constraints],
            "dependent_momenta": {
                name: str(expr) for name, expr in self.dependent_momenta.items()
            },
            "canonical_hamiltonian": str(self.canonical_h),
        }


def analyze(spec: ModelSpec) -> LegendreResult:
    """Run the Legendre transform on a parsed model."""
    registry = spec.registry
    coords = spec.all_coordinates
    n = len(coords)
    velocities = [spec.velocity_name(c) for c in coords]
    momentum_names = [spec.momentum_names[c] for c in coords]

    momenta = {
        momentum_names[i]: grad_derivative(spec.lagrangian, velocities[i], "left")
        for i in range(n)
    }
    rows = [momenta[momentum_names[i]] for i in range(n)]

    hessian: list[list[Fraction]] = []
    for i in range(n):
        row: list[Fraction] = []
        for j in range(n):
            entry = grad_derivative(rows[i], velocities[j], "left")
            if not entry.is_constant():
                raise ValueError("Lagrangian is not quadratic in velocities")
            row.append(entry.as_fraction())
        hessian.append(row)

    # Column-major greedy pivoting; among candidate rows prefer a positive
    # entry, then the lowest row index.  The positive preference keeps the
    # eliminated kinetic block positive where the Lagrangian allows it.
    work = [list(row) for row in hessian]
    pivots: list[tuple[int, int]] = []
    used_rows: set[int] = set()
    for col in range(n):
        candidates = [r for r in range(n) if r not in used_rows and work[r][col] != 0]
        if not candidates:
            continue
        positives = [r for r in candidates if work[r][col] > 0]
        row_pick = min(positives) if positives else min(candidates)
        for r in range(n):
            if r == row_pick or r in used_rows or work[r][col] == 0:
                continue
            factor = work[r][col] / work[row_pick][col]
            work[r] = [a - factor * b for a, b in zip(work[r], work[row_pick])]
        used_rows.add(row_pick)
        pivots.append((row_pick, col))
    rank = len(pivots)

    zeros = {v: registry.const(0) for v in velocities}
    intercepts = [substitute(rows[i], zeros) for i in range(n)]

    pivot_rows = [r for r, _ in pivots]
    pivot_cols = [c for _, c in pivots]
    free_cols = [c for c in range(n) if c not in pivot_cols]

    solvable_velocities: dict[str, GradedExpr] = {}
    if pivots:
        from hamsys.algebra import mat_inverse

        block = [[hessian[r][c] for c in pivot_cols] for r in pivot_rows]
        inverse = mat_inverse(block)
        rhs_exprs = []
        for r in pivot_rows:
            rhs = registry.sym(momentum_names[r]) - intercepts[r]
            for c in free_cols:
                if hessian[r][c] != 0:
                    rhs = rhs - hessian[r][c] * registry.sym(velocities[c])
            rhs_exprs.append(rhs)
        for j, col in enumerate(pivot_cols):
            solution = registry.zero()
            for i in range(len(pivot_rows)):
                if inverse[j][i] != 0:
                    solution = solution + inverse[j][i] * rhs_exprs[i]
            solvable_velocities[velocities[col]] = solution

    primary_constraints: list[GradedExpr] = []
    dependent_momenta: dict[str, GradedExpr] = {}
    for r in range(n):
        if r in pivot_rows:
            continue
        solved = substitute(rows[r], solvable_velocities)
        if any(registry.var(v).kind is VarKind.VELOCITY for v in solved.variables()):
            raise ValueError("degenerate row failed to reduce to phase-space form")
        dependent_momenta[momentum_names[r]] = solved
        primary_constraints.append(registry.sym(momentum_names[r]) - solved)

    hamiltonian = -spec.lagrangian
    for i in range(n):
        hamiltonian = hamiltonian + registry.sym(momentum_names[i]) * registry.sym(
            velocities[i]
        )
    hamiltonian = substitute(hamiltonian, solvable_velocities)
    hamiltonian = substitute(hamiltonian, dependent_momenta)
    leftover = [
        v for v in hamiltonian.variables() if registry.var(v).kind is VarKind.VELOCITY
    ]
    if leftover:
        raise ValueError(f"canonical Hamiltonian retains velocities {leftover}")

    return LegendreResult(
        spec=spec,
        momenta=momenta,
        hessian=hessian,
        rank=rank,
        solvable_velocities=solvable_velocities,
        primary_constraints=primary_constraints,
        dependent_momenta=dependent_momenta,
        canonical_h=hamiltonian,
    )
