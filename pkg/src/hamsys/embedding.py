"""Conversion of second-class pairs into gauge symmetry via auxiliary pairs.

Each second-class pair (Omega_a, Omega_b) with constant bracket d gains one
auxiliary canonical pair (theta, pi): the extended constraints

    Omega~_a = Omega_a + theta,    Omega~_b = Omega_b - d * pi

commute strongly.  Original phase variables acquire invariant completions
T(v) = v + (linear aux terms) solved from {Omega~, T(v)} = 0; for affine
constraints the expansion terminates at first order and the invariance is
exact, which is asserted.  The first-class Hamiltonian is the canonical
Hamiltonian evaluated on the completions, improved by pi * Omega~_b so the
algebra closes as {Omega~_a, H'} = Omega~_b, {Omega~_b, H'} = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from hamsys.algebra import (
    GradedExpr,
    Parity,
    VarKind,
    mat_solve,
    normalize,
    poisson_bracket,
    reduce_weak,
    substitute,
)
from hamsys.dirac import ConstraintChain, ConstraintClass, run_chain
from hamsys.legendre import LegendreResult
from hamsys.modelio import ModelSpec


@dataclass(eq=False)
class EmbeddingResult:
    ANALYSIS = "embedding"

    chain: ConstraintChain
    aux_pairs: list[tuple[str, str]]
    fc_constraints: list[GradedExpr]
    tilde_map: dict[str, GradedExpr]
    fc_hamiltonian: GradedExpr
    fc_hamiltonian_prime: GradedExpr
    x_matrix: list[list[Fraction]]

    @property
    def spec(self) -> ModelSpec:
        return self.chain.spec

    def to_report(self) -> dict:
        return {
            "aux_pairs": [list(p) for p in self.aux_pairs],
            "constraints": [str(c) for c in self.fc_constraints],
            "tilde_map": {k: str(v) for k, v in self.tilde_map.items()},
            "hamiltonian": str(self.fc_hamiltonian),
            "hamiltonian_prime": str(self.fc_hamiltonian_prime),
            "x_matrix": [[str(v) for v in row] for row in self.x_matrix],
        }


def _fresh_aux_names(registry, index: int) -> tuple[str, str]:
    base = "theta" if index == 0 else f"theta{index + 1}"
    while base in registry or f"pi_{base}" in registry:
        base = "_" + base
    return base, f"pi_{base}"


def bft_embed(chain: ConstraintChain) -> EmbeddingResult:
    """Embed an all-second-class chain into a first-class system."""
    constraints = chain.exprs()
    if not constraints or len(constraints) % 2 != 0:
        raise ValueError("embedding requires an even number of constraints")
    if any(c.cls is not ConstraintClass.SECOND for c in chain.constraints):
        raise ValueError("embedding requires an all-second-class chain")
    if chain.delta_inverse is None:
        raise ValueError("embedding requires a constant invertible bracket matrix")
    if any(expr.degree() > 1 for expr in constraints):
        raise ValueError("embedding supports affine constraints only")

    registry = chain.spec.registry
    n = len(constraints)
    k = n // 2

    # Validate the adjacent-pair structure of the bracket matrix.
    delta = [
        [chain.delta_reduced[a][b].as_fraction() for b in range(n)] for a in range(n)
    ]
    for a in range(n):
        for b in range(n):
            paired = a // 2 == b // 2 and a != b
            if paired and delta[a][b] == 0:
                raise ValueError("adjacent constraints do not pair under the bracket")
            if not paired and delta[a][b] != 0:
                raise ValueError("bracket matrix is not block-paired; reorder constraints")

    aux_pairs: list[tuple[str, str]] = []
    for j in range(k):
        theta, pi = _fresh_aux_names(registry, j)
        registry.declare(theta, Parity.EVEN, VarKind.AUX_COORD)
        registry.declare(pi, Parity.EVEN, VarKind.AUX_MOMENTUM, base=theta)
        registry.pair(theta, pi)
        aux_pairs.append((theta, pi))

    # X is block diagonal: pair j contributes diag(1, -d_j), killing the
    # original bracket d_j through det X = -d_j.
    x_matrix = [[Fraction(0)] * n for _ in range(n)]
    fc_constraints: list[GradedExpr] = []
    aux_syms: list[GradedExpr] = []
    for j in range(k):
        theta, pi = aux_pairs[j]
        aux_syms.extend([registry.sym(theta), registry.sym(pi)])
    for j in range(k):
        d = delta[2 * j][2 * j + 1]
        x_matrix[2 * j][2 * j] = Fraction(1)
        x_matrix[2 * j + 1][2 * j + 1] = -d
        fc_constraints.append(constraints[2 * j] + aux_syms[2 * j])
        fc_constraints.append(constraints[2 * j + 1] - d * aux_syms[2 * j + 1])

    for a in range(n):
        for b in range(n):
            br = poisson_bracket(fc_constraints[a], fc_constraints[b])
            if not br.is_zero():
                raise RuntimeError("extended constraints fail to commute strongly")

    # Aux-sector symplectic form in the (theta1, pi1, theta2, pi2, ...) basis.
    j_form = [[Fraction(0)] * n for _ in range(n)]
    for j in range(k):
        j_form[2 * j][2 * j + 1] = Fraction(1)
        j_form[2 * j + 1][2 * j] = Fraction(-1)
    m_matrix = [
        [
            sum((x_matrix[a][c] * j_form[c][b] for c in range(n)), Fraction(0))
            for b in range(n)
        ]
        for a in range(n)
    ]

    kinds = (VarKind.COORD, VarKind.AUX_COORD, VarKind.MOMENTUM, VarKind.AUX_MOMENTUM)
    original_vars = [
        v.name
        for v in registry.variables()
        if v.kind in kinds and v.name not in {nm for pair in aux_pairs for nm in pair}
    ]
    tilde_map: dict[str, GradedExpr] = {}
    for name in original_vars:
        grads = []
        for a in range(n):
            g = poisson_bracket(constraints[a], registry.sym(name))
            if not g.is_constant():
                raise ValueError(
                    "affine completion requires constant constraint gradients"
                )
            grads.append(g.as_fraction())
        coeffs = mat_solve(m_matrix, [-g for g in grads])
        completed = registry.sym(name)
        for a in range(n):
            if coeffs[a] != 0:
                completed = completed + coeffs[a] * aux_syms[a]
        tilde_map[name] = completed

    for name, completed in tilde_map.items():
        for a in range(n):
            if not poisson_bracket(fc_constraints[a], completed).is_zero():
                raise RuntimeError(f"completion of {name} is not strongly invariant")

    fc_h = substitute(chain.legendre.canonical_h, tilde_map)
    fc_h_prime = fc_h
    for j in range(k):
        fc_h_prime = fc_h_prime + aux_syms[2 * j + 1] * fc_constraints[2 * j + 1]

    return EmbeddingResult(
        chain=chain,
        aux_pairs=aux_pairs,
        fc_constraints=fc_constraints,
        tilde_map=tilde_map,
        fc_hamiltonian=fc_h,
        fc_hamiltonian_prime=fc_h_prime,
        x_matrix=x_matrix,
    )


def check_gauss_algebra(emb: EmbeddingResult) -> dict:
    """Closure of the extended constraints on the improved Hamiltonian.

    For each pair: the first constraint brackets onto the second, the second
    onto zero, both strongly; at vanishing auxiliaries the same brackets
    reduce to the original-chain relations.
    """
    registry = emb.spec.registry
    zero_aux = {
        name: registry.const(0) for pair in emb.aux_pairs for name in pair
    }
    identities = []
    overall = True
    for j in range(len(emb.aux_pairs)):
        first = emb.fc_constraints[2 * j]
        second = emb.fc_constraints[2 * j + 1]
        b1 = poisson_bracket(first, emb.fc_hamiltonian_prime)
        b2 = poisson_bracket(second, emb.fc_hamiltonian_prime)
        ok1 = b1 == second
        ok2 = b2.is_zero()
        limit1 = substitute(b1, zero_aux)
        limit2 = substitute(b2, zero_aux)
        original_second = emb.chain.constraints[2 * j + 1].expr
        lim_ok = limit1 == original_second and limit2.is_zero()
        overall = overall and ok1 and ok2 and lim_ok
        identities.append(
            {
                "pair": j,
                "bracket_first": str(b1),
                "bracket_second": str(b2),
                "first_maps_to_second": ok1,
                "second_maps_to_zero": ok2,
                "aux_zero_limit_consistent": lim_ok,
            }
        )
    return {"identities": identities, "holds": overall}


def roundtrip_lagrangian(emb: EmbeddingResult, gauged_spec: ModelSpec) -> dict:
    """Check a gauged Lagrangian against the embedding it should reproduce.

    Runs the full constrained analysis of the gauged model and compares:
    the primary constraint with the first extended constraint, the secondary
    with the second (normalized), the first-class classification with one
    free multiplier, and the gauged canonical Hamiltonian with the improved
    Hamiltonian weakly, modulo the gauged chain.
    """
    from hamsys import legendre as legendre_mod

    leg2 = legendre_mod.analyze(gauged_spec)
    chain2 = run_chain(leg2)
    registry2 = gauged_spec.registry

    report: dict = {
        "momenta": {name: str(expr) for name, expr in leg2.momenta.items()},
        "constraints": [str(c.expr) for c in chain2.constraints],
    }

    tilde_first = emb.fc_constraints[0].in_registry(registry2)
    tilde_second = emb.fc_constraints[1].in_registry(registry2)
    primary_ok = (
        len(leg2.primary_constraints) == 1
        and leg2.primary_constraints[0] == tilde_first
    )
    secondary_ok = len(chain2.constraints) == 2 and normalize(
        chain2.constraints[1].expr
    ) == normalize(tilde_second)
    first_class_ok = all(
        c.cls is ConstraintClass.FIRST for c in chain2.constraints
    )
    free = [name for name, v in chain2.multipliers.items() if v is None]
    multiplier_ok = len(free) == len(chain2.multiplier_names) == 1

    h_prime = emb.fc_hamiltonian_prime.in_registry(registry2)
    h_diff = reduce_weak(leg2.canonical_h - h_prime, chain2.exprs())
    hamiltonian_ok = h_diff.is_zero()

    report.update(
        {
            "primary_matches": primary_ok,
            "secondary_matches": secondary_ok,
            "all_first_class": first_class_ok,
            "free_multipliers": free,
            "single_free_multiplier": multiplier_ok,
            "hamiltonian_weakly_equal": hamiltonian_ok,
            "match": primary_ok
            and secondary_ok
            and first_class_ok
            and multiplier_ok
            and hamiltonian_ok,
        }
    )
    return report


def gauge_transformations(emb: EmbeddingResult) -> dict[str, GradedExpr]:
    """Variation of every phase variable under the first-class generator.

    One even parameter per extended constraint; the variation of f is the
    bracket {f, sum_a eps_a * Omega~_a}.
    """
    registry = emb.spec.registry
    eps_syms = []
    for a in range(len(emb.fc_constraints)):
        name = f"eps{a + 1}"
        while name in registry and registry.var(name).kind is not VarKind.FORMAL:
            name = "_" + name
        registry.ensure(name, Parity.EVEN, VarKind.FORMAL)
        eps_syms.append(registry.sym(name))
    generator = registry.zero()
    for eps, omega in zip(eps_syms, emb.fc_constraints):
        generator = generator + eps * omega
    kinds = (VarKind.COORD, VarKind.AUX_COORD, VarKind.MOMENTUM, VarKind.AUX_MOMENTUM)
    return {
        v.name: poisson_bracket(registry.sym(v.name), generator)
        for v in registry.variables()
        if v.kind in kinds
    }
