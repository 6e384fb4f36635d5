"""BRST charge, gauge fixing, and ghost-extended constraints.

The first-class system gets one ghost pair (C_a, Pbar_a) and one trivial
pair (P_a, Cbar_a) per constraint, plus even multiplier pairs (N_a, B_a).
The charge is Q = sum C_a Omega~_a + sum P_a B_a.  The minimal Hamiltonian
adds the counterterm sum V_ab C_a Pbar_b, with V the structure constants of
{Omega~_a, H'} = V_ab Omega~_b; the ghost momentum sits to the right of the
ghost so that {Q, H_m} = 0 holds identically.  Gauge fixing uses an odd
fermion Psi = sum Cbar_a chi_a + sum Pbar_a N_a and H_tot = H_m - {Q, Psi},
the sign chosen so the antighost velocity relation comes out as
d(Cbar)/dt = +Pbar.

The graded variation is delta_B f = (-1)^|f| * lam * {f, Q} with lam an odd
parameter of ghost number -1, so delta_B is nilpotent and grades correctly
on products.
"""

from __future__ import annotations

from dataclasses import dataclass

from hamsys.algebra import (
    GradedExpr,
    Parity,
    VariableRegistry,
    VarKind,
    express_in_span,
    poisson_bracket,
    substitute,
)
from hamsys.embedding import EmbeddingResult
from hamsys.legendre import LegendreResult


@dataclass(eq=False)
class BRSTComplex:
    ANALYSIS = "brst"

    emb: EmbeddingResult
    registry: VariableRegistry
    n: int
    constraints: list[GradedExpr]  # rehomed into the ghost registry
    charge: GradedExpr
    gauge_fermion: GradedExpr
    minimal_h: GradedExpr
    total_h: GradedExpr
    gauge_label: str
    ghost_names: dict[str, list[str]]
    lam: str

    def to_report(self) -> dict:
        return {
            "charge": str(self.charge),
            "gauge": self.gauge_label,
            "gauge_fermion": str(self.gauge_fermion),
            "minimal_hamiltonian": str(self.minimal_h),
            "total_hamiltonian": str(self.total_h),
            "ghosts": {k: list(v) for k, v in self.ghost_names.items()},
        }


def _ghost_prefix(registry: VariableRegistry, n: int) -> str:
    prefix = ""
    groups = ("C", "Pbar", "P", "Cbar", "N", "B")
    while True:
        names = [f"{prefix}{g}{a}" for g in groups for a in range(1, n + 1)]
        names.append(f"{prefix}lam")
        if not any(name in registry for name in names):
            return prefix
        prefix = "_" + prefix


def build_complex(
    emb: EmbeddingResult, gauge: str | list[GradedExpr] | None = "unitary"
) -> BRSTComplex:
    """Assemble the charge, minimal Hamiltonian, and gauge-fixed Hamiltonian.

    gauge selects the fermion: "unitary" uses the original chain constraints
    as gauge conditions, None omits gauge fixing entirely (total equals
    minimal), and an explicit list supplies custom even conditions.
    """
    registry = emb.spec.registry.copy()
    n = len(emb.fc_constraints)
    pfx = _ghost_prefix(registry, n)

    ghost_names: dict[str, list[str]] = {k: [] for k in ("C", "Pbar", "P", "Cbar", "N", "B")}
    for a in range(1, n + 1):
        registry.declare_pair(
            f"{pfx}C{a}", f"{pfx}Pbar{a}", Parity.ODD,
            VarKind.GHOST, VarKind.GHOST, ghost_numbers=(1, -1),
        )
        ghost_names["C"].append(f"{pfx}C{a}")
        ghost_names["Pbar"].append(f"{pfx}Pbar{a}")
    for a in range(1, n + 1):
        registry.declare_pair(
            f"{pfx}P{a}", f"{pfx}Cbar{a}", Parity.ODD,
            VarKind.GHOST, VarKind.GHOST, ghost_numbers=(1, -1),
        )
        ghost_names["P"].append(f"{pfx}P{a}")
        ghost_names["Cbar"].append(f"{pfx}Cbar{a}")
    for a in range(1, n + 1):
        registry.declare_pair(
            f"{pfx}N{a}", f"{pfx}B{a}", Parity.EVEN, VarKind.GHOST, VarKind.GHOST
        )
        ghost_names["N"].append(f"{pfx}N{a}")
        ghost_names["B"].append(f"{pfx}B{a}")
    lam_name = f"{pfx}lam"
    registry.declare(lam_name, Parity.ODD, VarKind.FORMAL, ghost_number=-1)

    constraints = [c.in_registry(registry) for c in emb.fc_constraints]
    h_prime = emb.fc_hamiltonian_prime.in_registry(registry)

    charge = registry.zero()
    for a in range(n):
        charge = charge + registry.sym(ghost_names["C"][a]) * constraints[a]
        charge = charge + registry.sym(ghost_names["P"][a]) * registry.sym(
            ghost_names["B"][a]
        )

    minimal_h = h_prime
    for a in range(n):
        bracket = poisson_bracket(constraints[a], h_prime)
        if bracket.is_zero():
            continue
        coeffs = express_in_span(bracket, constraints)
        if coeffs is None:
            raise ValueError(
                "constraint algebra does not close with constant coefficients"
            )
        for b in range(n):
            if coeffs[b] != 0:
                minimal_h = minimal_h + coeffs[b] * registry.sym(
                    ghost_names["C"][a]
                ) * registry.sym(ghost_names["Pbar"][b])

    if gauge is None:
        gauge_label = "none"
        fermion = registry.zero()
    else:
        if gauge == "unitary":
            gauge_label = "unitary"
            conditions = [c.expr.in_registry(registry) for c in emb.chain.constraints]
        else:
            gauge_label = "custom"
            conditions = [c.in_registry(registry) for c in gauge]
        if len(conditions) != n:
            raise ValueError(f"expected {n} gauge conditions, got {len(conditions)}")
        for chi in conditions:
            if chi.parity() is not Parity.EVEN or chi.ghost_number() != 0:
                raise ValueError("gauge conditions must be even with ghost number 0")
        fermion = registry.zero()
        for a in range(n):
            fermion = fermion + registry.sym(ghost_names["Cbar"][a]) * conditions[a]
            fermion = fermion + registry.sym(ghost_names["Pbar"][a]) * registry.sym(
                ghost_names["N"][a]
            )

    total_h = minimal_h - poisson_bracket(charge, fermion)

    if charge.parity() is not Parity.ODD or charge.ghost_number() != 1:
        raise ValueError("charge fails parity or ghost-number grading")
    if not fermion.is_zero() and (
        fermion.parity() is not Parity.ODD or fermion.ghost_number() != -1
    ):
        raise ValueError("gauge fermion fails parity or ghost-number grading")
    if total_h.parity() is not Parity.EVEN or total_h.ghost_number() != 0:
        raise ValueError("total Hamiltonian fails parity or ghost-number grading")

    return BRSTComplex(
        emb=emb,
        registry=registry,
        n=n,
        constraints=constraints,
        charge=charge,
        gauge_fermion=fermion,
        minimal_h=minimal_h,
        total_h=total_h,
        gauge_label=gauge_label,
        ghost_names=ghost_names,
        lam=lam_name,
    )


def check_brst_identities(cx: BRSTComplex) -> dict:
    """Nilpotency and invariance remainders; all must vanish identically."""
    q_squared = poisson_bracket(cx.charge, cx.charge)
    q_minimal = poisson_bracket(cx.charge, cx.minimal_h)
    q_total = poisson_bracket(cx.charge, cx.total_h)
    return {
        "q_squared": str(q_squared),
        "q_minimal": str(q_minimal),
        "q_total": str(q_total),
        "nilpotent": q_squared.is_zero(),
        "minimal_invariant": q_minimal.is_zero(),
        "total_invariant": q_total.is_zero(),
        "holds": q_squared.is_zero() and q_minimal.is_zero() and q_total.is_zero(),
    }


def brst_transform(cx: BRSTComplex, f: GradedExpr) -> GradedExpr:
    """Graded variation delta_B f = (-1)^|f| * lam * {f, Q}."""
    moved = f.in_registry(cx.registry)
    parity = moved.parity()
    if parity is None:
        raise ValueError("variation requires a parity-homogeneous argument")
    lam = cx.registry.sym(cx.lam)
    result = lam * poisson_bracket(moved, cx.charge)
    return -result if parity is Parity.ODD else result


def brst_table(cx: BRSTComplex) -> dict[str, GradedExpr]:
    """Variations of coordinates, ghosts, antighosts, and multipliers."""
    registry = cx.registry
    names: list[str] = [
        v.name
        for v in registry.variables()
        if v.kind in (VarKind.COORD, VarKind.AUX_COORD)
    ]
    names += cx.ghost_names["C"] + cx.ghost_names["Cbar"] + cx.ghost_names["B"]
    return {name: brst_transform(cx, registry.sym(name)) for name in names}


def ghost_extended_constraint(
    cx: BRSTComplex,
    leg: LegendreResult,
    relations: dict[str, GradedExpr] | None = None,
    index: int = 1,
) -> GradedExpr:
    """Velocity form of an extended constraint with its multiplier tail.

    The momenta in constraint `index` are replaced by the gauged model's
    defining relations; the auxiliary momentum of each embedding pair is
    replaced by -d(theta) - N with the multiplier choice N = 2*theta + B,
    which trades the auxiliary velocity for the even ghost-sector field.
    A custom `relations` map (momentum name -> expression) overrides all of
    this.  Constraints without momenta come back unchanged.
    """
    registry = cx.registry.copy()
    for var in leg.spec.registry.variables():
        if var.kind is VarKind.VELOCITY and var.name not in registry:
            registry.declare(var.name, Parity.EVEN, VarKind.VELOCITY, base=var.base)
    target = cx.constraints[index].in_registry(registry)

    if relations is None:
        relations = {
            name: expr.in_registry(registry) for name, expr in leg.momenta.items()
        }
        for j, (theta, pi) in enumerate(cx.emb.aux_pairs):
            b_name = cx.ghost_names["B"][2 * j + 1]
            n_choice = 2 * registry.sym(theta) + registry.sym(b_name)
            relations[pi] = -registry.sym(f"d({theta})") - n_choice
    else:
        relations = {k: v.in_registry(registry) for k, v in relations.items()}

    momentum_kinds = (VarKind.MOMENTUM, VarKind.AUX_MOMENTUM)
    for name in target.variables():
        if registry.var(name).kind in momentum_kinds and name not in relations:
            raise ValueError(f"missing momentum relation for {name!r}")
    return substitute(target, relations)
