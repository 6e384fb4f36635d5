"""Exact polynomial algebra on a graded phase space.

Everything downstream (constraint chains, Hamilton-Jacobi families,
embeddings, BRST charges) is built from one object: a polynomial with
Fraction coefficients in commuting (even) and anticommuting (odd)
variables. No floating point enters until a system is compiled for
numerical integration.

Conventions, fixed once and used everywhere:

* An odd monomial is stored as a word of distinct odd variables sorted
  by registry index; reordering picks up one minus sign per
  transposition, and a repeated odd variable kills the term.

* Left and right derivatives with respect to an odd variable remove it
  from the word with sign (-1)**k, where k counts the odd variables
  standing before it (left derivative) or after it (right derivative).
  For even variables both derivatives are the ordinary partial.

* The graded Poisson bracket of parity-homogeneous A and B is

      {A, B} = sum over pairs (x, p) of
               dR(A,x)*dL(B,p) - (-1)**(par(A)*par(B)) * dR(B,x)*dL(A,p)

  extended bilinearly to inhomogeneous arguments. With this choice
  {x, p} = +1 for every even pair and {c, pi} = {pi, c} = +1 for every
  odd pair, and the graded Leibniz rule
  {A, B*C} = {A, B}*C + (-1)**(par(A)*par(B)) * B*{A, C} holds.

* Monomials are ordered by total degree, then lexicographically with
  higher registry index more significant. normalize() rescales a
  polynomial so its coefficients are integers with content 1 and the
  leading coefficient is positive; constraints are stored and compared
  in that form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Scalar = int | Fraction

__all__ = [
    "Parity",
    "VarKind",
    "Variable",
    "VariableRegistry",
    "GradedExpr",
    "grad_derivative",
    "poisson_bracket",
    "extended_bracket",
    "substitute",
    "weak_reduction_map",
    "reduce_weak",
    "is_weakly_zero",
    "normalize",
    "mat_inverse",
    "mat_solve",
]


class Parity(enum.IntEnum):
    EVEN = 0
    ODD = 1


class VarKind(enum.Enum):
    COORD = "coord"
    MOMENTUM = "momentum"
    AUX_COORD = "aux_coord"
    AUX_MOMENTUM = "aux_momentum"
    VELOCITY = "velocity"
    TIME = "time"
    ENERGY = "energy"
    MULTIPLIER = "multiplier"
    GHOST = "ghost"
    FORMAL = "formal"


# Kinds that weak reduction prefers to solve for (momentum-like).
_PIVOT_KINDS = frozenset({VarKind.MOMENTUM, VarKind.AUX_MOMENTUM, VarKind.ENERGY})


@dataclass(frozen=True)
class Variable:
    name: str
    index: int
    parity: Parity
    kind: VarKind
    base: str | None = None
    ghost_number: int = 0


def _as_fraction(value: Scalar) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact scalar, got {type(value).__name__}")


class VariableRegistry:
    """Ordered table of variables plus their canonical bracket pairings.

    Declaration order defines the monomial order, so registries must be
    extended append-only. A pair (x, p) declared with extended=True
    participates only in the extended bracket (the time-energy pair of
    a Hamilton-Jacobi family); all other pairs enter both brackets.
    """

    def __init__(self) -> None:
        self._vars: dict[str, Variable] = {}
        self._order: list[str] = []
        self._pairs: list[tuple[str, str, bool]] = []

    def declare(
        self,
        name: str,
        parity: Parity,
        kind: VarKind,
        base: str | None = None,
        ghost_number: int = 0,
    ) -> Variable:
        if not name:
            raise ValueError("variable name must be nonempty")
        if name in self._vars:
            raise ValueError(f"variable {name!r} already declared")
        var = Variable(name, len(self._order), Parity(parity), kind, base, ghost_number)
        self._vars[name] = var
        self._order.append(name)
        return var

    def ensure(
        self,
        name: str,
        parity: Parity,
        kind: VarKind,
        base: str | None = None,
        ghost_number: int = 0,
    ) -> Variable:
        """Declare name if absent, otherwise return the existing variable."""
        existing = self._vars.get(name)
        if existing is not None:
            if existing.parity is not Parity(parity):
                raise ValueError(f"variable {name!r} exists with different parity")
            return existing
        return self.declare(name, parity, kind, base, ghost_number)

    def pair(self, position: str, momentum: str, extended: bool = False) -> None:
        pv, mv = self.var(position), self.var(momentum)
        if pv.parity is not mv.parity:
            raise ValueError(f"pair ({position}, {momentum}) mixes parities")
        for x, p, _ in self._pairs:
            if position in (x, p) or momentum in (x, p):
                raise ValueError(f"{position!r} or {momentum!r} already paired")
        self._pairs.append((position, momentum, extended))

    def declare_pair(
        self,
        position: str,
        momentum: str,
        parity: Parity,
        position_kind: VarKind = VarKind.COORD,
        momentum_kind: VarKind = VarKind.MOMENTUM,
        base: str | None = None,
        ghost_numbers: tuple[int, int] = (0, 0),
        extended: bool = False,
    ) -> tuple[Variable, Variable]:
        pv = self.declare(position, parity, position_kind, base, ghost_numbers[0])
        mv = self.declare(momentum, parity, momentum_kind, base or position, ghost_numbers[1])
        self.pair(position, momentum, extended)
        return pv, mv

    def var(self, name: str) -> Variable:
        try:
            return self._vars[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._vars

    def index(self, name: str) -> int:
        return self.var(name).index

    def names(self) -> list[str]:
        return list(self._order)

    def variables(self) -> list[Variable]:
        return [self._vars[n] for n in self._order]

    def bracket_pairs(self, extended: bool = False) -> list[tuple[str, str]]:
        return [(x, p) for x, p, ext in self._pairs if extended or not ext]

    def conjugate(self, name: str) -> str | None:
        """Bracket partner of name, or None if unpaired."""
        for x, p, _ in self._pairs:
            if name == x:
                return p
            if name == p:
                return x
        return None

    def copy(self) -> "VariableRegistry":
        other = VariableRegistry()
        other._vars = dict(self._vars)
        other._order = list(self._order)
        other._pairs = list(self._pairs)
        return other

    def sym(self, name: str) -> "GradedExpr":
        var = self.var(name)
        if var.parity is Parity.EVEN:
            key = (((name, 1),), ())
        else:
            key = ((), (name,))
        return GradedExpr(self, {key: Fraction(1)})

    def const(self, value: Scalar) -> "GradedExpr":
        c = _as_fraction(value)
        if c == 0:
            return GradedExpr(self, {})
        return GradedExpr(self, {((), ()): c})

    def zero(self) -> "GradedExpr":
        return GradedExpr(self, {})


# A monomial key: (((name, exponent), ...) for even factors sorted by
# registry index, (name, ...) for the odd word sorted likewise).
Key = tuple[tuple[tuple[str, int], ...], tuple[str, ...]]


def _sorted_odd(registry: VariableRegistry, word: Sequence[str]) -> tuple[tuple[str, ...] | None, int]:
    """Sort an odd word ascending by index, counting transposition signs.

    Returns (None, 0) when a variable repeats (the monomial vanishes).
    """
    items = list(word)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and registry.index(items[j - 1]) > registry.index(items[j]):
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(items, items[1:]):
        if a == b:
            return None, 0
    return tuple(items), sign


class GradedExpr:
    """A polynomial over Fraction in graded variables.

    Instances are immutable by convention: arithmetic returns fresh
    objects and nothing mutates .terms after construction. Two
    expressions are equal when they share a registry and have identical
    canonical term dictionaries, which is exact syntactic equality.
    """

    __slots__ = ("registry", "terms")

    def __init__(self, registry: VariableRegistry, terms: dict[Key, Fraction]) -> None:
        self.registry = registry
        self.terms = {k: c for k, c in terms.items() if c != 0}

    # -- construction helpers -------------------------------------------------

    def _coerce(self, other: "GradedExpr | Scalar") -> "GradedExpr":
        if isinstance(other, GradedExpr):
            if other.registry is not self.registry:
                raise ValueError("cannot mix expressions from different registries")
            return other
        return self.registry.const(other)

    # -- predicates ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(k == ((), ()) for k in self.terms)

    def as_fraction(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise ValueError(f"not a constant: {self}")
        return self.terms[((), ())]

    def constant_term(self) -> Fraction:
        return self.terms.get(((), ()), Fraction(0))

    def variables(self) -> set[str]:
        found: set[str] = set()
        for even, odd in self.terms:
            found.update(n for n, _ in even)
            found.update(odd)
        return found

    def degree(self) -> int:
        if self.is_zero():
            return 0
        return max(sum(e for _, e in even) + len(odd) for even, odd in self.terms)

    def degree_in(self, name: str) -> int:
        deg = 0
        for even, odd in self.terms:
            for n, e in even:
                if n == name:
                    deg = max(deg, e)
            if name in odd:
                deg = max(deg, 1)
        return deg

    def parity_parts(self) -> list[tuple["GradedExpr", Parity]]:
        buckets: dict[int, dict[Key, Fraction]] = {0: {}, 1: {}}
        for key, coeff in self.terms.items():
            buckets[len(key[1]) % 2][key] = coeff
        return [
            (GradedExpr(self.registry, terms), Parity(par))
            for par, terms in buckets.items()
            if terms
        ]

    def parity(self) -> Parity:
        """Parity of a homogeneous expression; zero counts as even."""
        parts = self.parity_parts()
        if not parts:
            return Parity.EVEN
        if len(parts) > 1:
            raise ValueError(f"expression has mixed parity: {self}")
        return parts[0][1]

    def ghost_number(self) -> int:
        """Ghost number of a homogeneous expression; zero counts as 0."""
        numbers = set()
        for even, odd in self.terms:
            total = sum(self.registry.var(n).ghost_number * e for n, e in even)
            total += sum(self.registry.var(n).ghost_number for n in odd)
            numbers.add(total)
        if not numbers:
            return 0
        if len(numbers) > 1:
            raise ValueError(f"expression has mixed ghost number: {self}")
        return numbers.pop()

    def key(self) -> tuple:
        """Hashable canonical form, for dictionaries and deduplication."""
        return tuple(sorted(self.terms.items()))

    # -- arithmetic --------------------------------------------------------------

    def __add__(self, other: "GradedExpr | Scalar") -> "GradedExpr":
        rhs = self._coerce(other)
        terms = dict(self.terms)
        for key, coeff in rhs.terms.items():
            terms[key] = terms.get(key, Fraction(0)) + coeff
        return GradedExpr(self.registry, terms)

    __radd__ = __add__

    def __neg__(self) -> "GradedExpr":
        return GradedExpr(self.registry, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "GradedExpr | Scalar") -> "GradedExpr":
        return self + (-self._coerce(other))

    def __rsub__(self, other: "GradedExpr | Scalar") -> "GradedExpr":
        return self._coerce(other) - self

    def __mul__(self, other: "GradedExpr | Scalar") -> "GradedExpr":
        rhs = self._coerce(other)
        registry = self.registry
        terms: dict[Key, Fraction] = {}
        for (even_a, odd_a), ca in self.terms.items():
            for (even_b, odd_b), cb in rhs.terms.items():
                word, sign = _sorted_odd(registry, odd_a + odd_b)
                if word is None:
                    continue
                exps: dict[str, int] = dict(even_a)
                for name, exp in even_b:
                    exps[name] = exps.get(name, 0) + exp
                even = tuple(sorted(exps.items(), key=lambda t: registry.index(t[0])))
                key = (even, word)
                terms[key] = terms.get(key, Fraction(0)) + ca * cb * sign
        return GradedExpr(registry, terms)

    def __rmul__(self, other: Scalar) -> "GradedExpr":
        # scalars commute with everything
        return self * other

    def __truediv__(self, other: Scalar) -> "GradedExpr":
        c = _as_fraction(other)
        if c == 0:
            raise ZeroDivisionError("division of expression by zero")
        return GradedExpr(self.registry, {k: v / c for k, v in self.terms.items()})

    def __pow__(self, exponent: int) -> "GradedExpr":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self.registry.const(1)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.registry.const(other)
        if not isinstance(other, GradedExpr):
            return NotImplemented
        return self.registry is other.registry and self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- structure ----------------------------------------------------------------

    def split_linear(self, name: str) -> tuple[Fraction, "GradedExpr"]:
        """Write self as coeff*name + rest with a constant coefficient.

        Raises ValueError when name enters nonlinearly or multiplied by
        other variables.
        """
        var_key: Key = (((name, 1),), ())
        coeff = Fraction(0)
        rest: dict[Key, Fraction] = {}
        for key, c in self.terms.items():
            even, odd = key
            involved = name in odd or any(n == name for n, _ in even)
            if not involved:
                rest[key] = c
            elif key == var_key:
                coeff = c
            else:
                raise ValueError(f"{name} does not enter {self} linearly with constant coefficient")
        return coeff, GradedExpr(self.registry, rest)

    def in_registry(self, registry: VariableRegistry) -> "GradedExpr":
        """Rebuild this expression over another registry holding the same names."""
        if registry is self.registry:
            return self
        terms: dict[Key, Fraction] = {}
        for (even, odd), coeff in self.terms.items():
            for n, _ in even:
                if registry.var(n).parity is not Parity.EVEN:
                    raise ValueError(f"{n!r} changes parity between registries")
            for n in odd:
                if registry.var(n).parity is not Parity.ODD:
                    raise ValueError(f"{n!r} changes parity between registries")
            word, sign = _sorted_odd(registry, odd)
            assert word is not None  # names in a stored word are distinct
            even_sorted = tuple(sorted(even, key=lambda t: registry.index(t[0])))
            key = (even_sorted, word)
            terms[key] = terms.get(key, Fraction(0)) + coeff * sign
        return GradedExpr(registry, terms)

    # -- rendering -------------------------------------------------------------------

    def _term_order_key(self, key: Key):
        even, odd = key
        factors = [(self.registry.index(n), e) for n, e in even]
        factors += [(self.registry.index(n), 1) for n in odd]
        degree = sum(e for _, e in factors)
        return (degree, tuple(sorted(factors, reverse=True)))

    def sorted_terms(self) -> list[tuple[Key, Fraction]]:
        """Terms in descending graded order, leading term first."""
        return sorted(self.terms.items(), key=lambda kv: self._term_order_key(kv[0]), reverse=True)

    def leading_coefficient(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        return self.sorted_terms()[0][1]

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        pieces: list[str] = []
        for (even, odd), coeff in self.sorted_terms():
            factors = [f"{n}^{e}" if e > 1 else n for n, e in even]
            factors += list(odd)
            mag = abs(coeff)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            if not pieces:
                pieces.append(body if coeff > 0 else f"-{body}")
            else:
                pieces.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"GradedExpr({self})"


# -- calculus ----------------------------------------------------------------------


def grad_derivative(f: GradedExpr, name: str, side: str = "left") -> GradedExpr:
    """Graded derivative of f with respect to one variable.

    side selects the left or the right derivative; they differ only for
    odd variables.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    var = f.registry.var(name)
    terms: dict[Key, Fraction] = {}
    for (even, odd), coeff in f.terms.items():
        if var.parity is Parity.EVEN:
            for i, (n, e) in enumerate(even):
                if n != name:
                    continue
                if e == 1:
                    reduced = even[:i] + even[i + 1 :]
                else:
                    reduced = even[:i] + ((n, e - 1),) + even[i + 1 :]
                key = (reduced, odd)
                terms[key] = terms.get(key, Fraction(0)) + coeff * e
                break
        else:
            for pos, n in enumerate(odd):
                if n != name:
                    continue
                k = pos if side == "left" else len(odd) - 1 - pos
                sign = -1 if k % 2 else 1
                key = (even, odd[:pos] + odd[pos + 1 :])
                terms[key] = terms.get(key, Fraction(0)) + coeff * sign
                break
    return GradedExpr(f.registry, terms)


def _bracket(a: GradedExpr, b: GradedExpr, extended: bool) -> GradedExpr:
    if a.registry is not b.registry:
        raise ValueError("bracket arguments live in different registries")
    registry = a.registry
    for side in (a, b):
        for name in side.variables():
            if registry.var(name).kind is VarKind.VELOCITY:
                raise ValueError(
                    f"velocity variable {name!r} in a bracket argument; brackets are phase-space only"
                )
    pairs = registry.bracket_pairs(extended)
    total = registry.zero()
    for part_a, par_a in a.parity_parts():
        for part_b, par_b in b.parity_parts():
            sign = -1 if (par_a and par_b) else 1
            for position, momentum in pairs:
                direct = grad_derivative(part_a, position, "right") * grad_derivative(
                    part_b, momentum, "left"
                )
                crossed = grad_derivative(part_b, position, "right") * grad_derivative(
                    part_a, momentum, "left"
                )
                total = total + direct - sign * crossed
    return total


def poisson_bracket(a: GradedExpr, b: GradedExpr) -> GradedExpr:
    """Graded Poisson bracket over the registry's canonical pairs."""
    return _bracket(a, b, extended=False)


def extended_bracket(a: GradedExpr, b: GradedExpr) -> GradedExpr:
    """Poisson bracket including pairs declared as extended (time-energy)."""
    return _bracket(a, b, extended=True)


def substitute(f: GradedExpr, mapping: Mapping[str, GradedExpr | Scalar]) -> GradedExpr:
    """Replace variables by expressions, respecting parity.

    A replacement must be parity-homogeneous of the same parity as the
    variable it replaces (zero is allowed for either parity).
    """
    registry = f.registry
    resolved: dict[str, GradedExpr] = {}
    for name, value in mapping.items():
        var = registry.var(name)
        expr = value if isinstance(value, GradedExpr) else registry.const(value)
        expr = expr.in_registry(registry)
        if not expr.is_zero() and expr.parity() is not var.parity:
            raise ValueError(f"replacement for {name!r} has the wrong parity")
        resolved[name] = expr
    if not resolved:
        return f
    total = registry.zero()
    for (even, odd), coeff in f.terms.items():
        acc = registry.const(coeff)
        for name, exp in even:
            factor = resolved.get(name, None)
            if factor is None:
                factor = registry.sym(name)
            acc = acc * factor**exp
            if acc.is_zero():
                break
        else:
            for name in odd:
                factor = resolved.get(name, None)
                if factor is None:
                    factor = registry.sym(name)
                acc = acc * factor
                if acc.is_zero():
                    break
        total = total + acc
    return total


# -- weak equality -------------------------------------------------------------------


def weak_reduction_map(constraints: Iterable[GradedExpr]) -> dict[str, GradedExpr]:
    """Triangular solve of affine constraints, as a substitution map.

    Processes constraints in order, reducing each by the pivots already
    solved, then solves it for one even variable that enters with a
    constant coefficient. Momentum-like variables are preferred as
    pivots, highest registry index first. Constraints must be affine
    (degree at most 1) and independent.
    """
    solved: dict[str, GradedExpr] = {}
    for constraint in constraints:
        if constraint.degree() > 1:
            raise ValueError(f"nonlinear constraint: {constraint}")
        reduced = _apply_solved(constraint, solved)
        if reduced.is_zero():
            raise ValueError(f"linearly dependent constraint: {constraint}")
        if reduced.is_constant():
            raise ValueError(f"inconsistent constraint: {constraint} reduces to {reduced}")
        registry = reduced.registry
        candidates = []
        for name in reduced.variables():
            var = registry.var(name)
            if var.parity is not Parity.EVEN:
                continue
            try:
                coeff, rest = reduced.split_linear(name)
            except ValueError:
                continue
            if coeff != 0:
                candidates.append((var.kind in _PIVOT_KINDS, var.index, name, coeff, rest))
        if not candidates:
            raise ValueError(f"no admissible pivot in constraint {reduced}")
        candidates.sort(key=lambda t: (t[0], t[1]), reverse=True)
        _, _, name, coeff, rest = candidates[0]
        solved[name] = -rest / coeff
    return solved


def _apply_solved(f: GradedExpr, solved: Mapping[str, GradedExpr]) -> GradedExpr:
    # solved right-hand sides may mention earlier pivots; iterate to a fixpoint
    for _ in range(len(solved) + 1):
        if not (f.variables() & solved.keys()):
            return f
        f = substitute(f, solved)
    raise RuntimeError("weak reduction did not terminate; cyclic pivot map")


def reduce_weak(f: GradedExpr, constraints: Iterable[GradedExpr]) -> GradedExpr:
    """Normal form of f modulo affine constraints (weak equality)."""
    return _apply_solved(f, weak_reduction_map(constraints))


def is_weakly_zero(f: GradedExpr, constraints: Iterable[GradedExpr]) -> bool:
    return reduce_weak(f, constraints).is_zero()


def normalize(f: GradedExpr) -> GradedExpr:
    """Scale to integer coefficients with content 1 and positive leading term."""
    if f.is_zero():
        return f
    denominator_lcm = math.lcm(*(c.denominator for c in f.terms.values()))
    numerator_gcd = math.gcd(*(abs(c.numerator) for c in f.terms.values()))
    scale = Fraction(denominator_lcm, numerator_gcd)
    scaled = f * scale
    if scaled.leading_coefficient() < 0:
        scaled = -scaled
    return scaled


# -- exact linear algebra ---------------------------------------------------------------


def mat_inverse(matrix: Sequence[Sequence[Scalar]]) -> list[list[Fraction]]:
    """Inverse of a square Fraction matrix by Gauss-Jordan elimination."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    work = [[_as_fraction(v) for v in row] for row in matrix]
    result = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot_row is None:
            raise ValueError("matrix is singular")
        if pivot_row != col:
            work[col], work[pivot_row] = work[pivot_row], work[col]
            result[col], result[pivot_row] = result[pivot_row], result[col]
        pivot = work[col][col]
        work[col] = [v / pivot for v in work[col]]
        result[col] = [v / pivot for v in result[col]]
        for row in range(n):
            if row == col or work[row][col] == 0:
                continue
            factor = work[row][col]
            work[row] = [a - factor * b for a, b in zip(work[row], work[col])]
            result[row] = [a - factor * b for a, b in zip(result[row], result[col])]
    return result


def mat_solve(matrix: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> list[Fraction]:
    """Solve matrix @ x = rhs exactly."""
    inverse = mat_inverse(matrix)
    vector = [_as_fraction(v) for v in rhs]
    return [sum((row[j] * vector[j] for j in range(len(vector))), Fraction(0)) for row in inverse]


def express_in_span(target: GradedExpr, basis: Sequence[GradedExpr]) -> list[Fraction] | None:
    """Constant coefficients c with target = sum(c[i] * basis[i]), or None.

    The system is solved exactly over the monomials appearing anywhere;
    underdetermined directions are set to zero.
    """
    keys = sorted({k for expr in basis for k in expr.terms} | set(target.terms))
    rows = [[expr.terms.get(key, Fraction(0)) for expr in basis] for key in keys]
    rhs = [target.terms.get(key, Fraction(0)) for key in keys]
    n_cols = len(basis)
    pivot_cols: list[int] = []
    row_at = 0
    for col in range(n_cols):
        pivot = next((r for r in range(row_at, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[row_at], rows[pivot] = rows[pivot], rows[row_at]
        rhs[row_at], rhs[pivot] = rhs[pivot], rhs[row_at]
        scale = rows[row_at][col]
        rows[row_at] = [v / scale for v in rows[row_at]]
        rhs[row_at] = rhs[row_at] / scale
        for r in range(len(rows)):
            if r == row_at or rows[r][col] == 0:
                continue
            factor = rows[r][col]
            rows[r] = [a - factor * b for a, b in zip(rows[r], rows[row_at])]
            rhs[r] = rhs[r] - factor * rhs[row_at]
        pivot_cols.append(col)
        row_at += 1
    for r in range(row_at, len(rows)):
        if rhs[r] != 0:
            return None
    solution = [Fraction(0)] * n_cols
    for r, col in enumerate(pivot_cols):
        solution[col] = rhs[r]
    return solution
