"""Model text format and structured report emission.

A model file declares a name, coordinates, optional auxiliary coordinates,
and a Lagrangian over those symbols and their velocities ``d(x)``:

    model nonholonomic
    coords q1 q2 q3
    lagrangian: 1/2*d(q1)^2 - 1/4*(d(q2) - d(q3))^2 + (q1 + q3)*d(q2)
                - q1 - q2 - q3^2

Tokens may be split across lines freely; ``#`` starts a comment.  The
Lagrangian must be polynomial with rational coefficients and at most
quadratic in velocities.  ``parse_model`` builds the full phase-space
registry (coordinates, momenta, velocities, and the time pair ``t0``/``p0``)
so downstream analyses share one symbol table.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

from hamsys.algebra import GradedExpr, Parity, VariableRegistry, VarKind

KEYWORDS = frozenset({"model", "coords", "aux", "lagrangian"})
RESERVED = KEYWORDS | {"d", "t0", "p0"}


class ParseError(ValueError):
    """Model-text syntax or semantics error with source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, INT, or a literal symbol
    text: str
    line: int
    column: int


_SYMBOLS = "+-*/^():"


def _tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
        elif ch in " \t\r":
            col += 1
            i += 1
        elif ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
        elif ch.isdigit():
            start = i
            while i < len(text) and text[i].isdigit():
                i += 1
            tokens.append(Token("INT", text[start:i], line, col))
            col += i - start
        elif ch.isalpha() or ch == "_":
            start = i
            while i < len(text) and (text[i].isalnum() or text[i] == "_"):
                i += 1
            tokens.append(Token("NAME", text[start:i], line, col))
            col += i - start
        elif ch in _SYMBOLS:
            tokens.append(Token(ch, ch, line, col))
            col += 1
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    return tokens


@dataclass(eq=False)
class ModelSpec:
    """A parsed model: declarations plus the Lagrangian and its registry."""

    name: str
    coordinates: tuple[str, ...]
    aux: tuple[str, ...]
    lagrangian: GradedExpr
    registry: VariableRegistry
    momentum_names: dict[str, str]
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def all_coordinates(self) -> tuple[str, ...]:
        return self.coordinates + self.aux

    def velocity_name(self, coordinate: str) -> str:
        return f"d({coordinate})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModelSpec):
            return NotImplemented
        return (
            self.name == other.name
            and self.coordinates == other.coordinates
            and self.aux == other.aux
            and self.lagrangian.key() == other.lagrangian.key()
            and self.metadata == other.metadata
        )


def momentum_name_for(coordinate: str, is_aux: bool) -> str:
    if is_aux:
        return f"pi_{coordinate}"
    if coordinate.startswith("q") and coordinate[1:].isdigit():
        return "p" + coordinate[1:]
    return f"p_{coordinate}"


def build_registry(
    coordinates: Sequence[str], aux: Sequence[str] = ()
) -> tuple[VariableRegistry, dict[str, str]]:
    """Phase-space registry for the given coordinates.

    Declaration order fixes the canonical term order everywhere downstream:
    coordinates, auxiliary coordinates, their momenta, velocities, then the
    time pair.  Returns the registry and the coordinate-to-momentum name map.
    """
    registry = VariableRegistry()
    momentum_names: dict[str, str] = {}
    for name in coordinates:
        registry.declare(name, Parity.EVEN, VarKind.COORD)
    for name in aux:
        registry.declare(name, Parity.EVEN, VarKind.AUX_COORD)
    taken = set(coordinates) | set(aux)
    for name, kind in [(c, VarKind.MOMENTUM) for c in coordinates] + [
        (a, VarKind.AUX_MOMENTUM) for a in aux
    ]:
        mom = momentum_name_for(name, kind is VarKind.AUX_MOMENTUM)
        if mom in taken:
            raise ValueError(f"momentum name {mom!r} collides with a declared symbol")
        taken.add(mom)
        momentum_names[name] = mom
        registry.declare(mom, Parity.EVEN, kind, base=name)
    for name in list(coordinates) + list(aux):
        registry.declare(f"d({name})", Parity.EVEN, VarKind.VELOCITY, base=name)
    registry.declare("t0", Parity.EVEN, VarKind.TIME)
    registry.declare("p0", Parity.EVEN, VarKind.ENERGY, base="t0")
    for name in list(coordinates) + list(aux):
        registry.pair(name, momentum_names[name])
    registry.pair("t0", "p0", extended=True)
    return registry, momentum_names


class _ExprParser:
    """Recursive-descent parser over a token slice, producing a GradedExpr."""

    def __init__(self, tokens: Sequence[Token], registry: VariableRegistry, end_line: int):
        self.tokens = tokens
        self.registry = registry
        self.pos = 0
        self.end_line = end_line

    def _peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self, expected: str | None = None) -> Token:
        tok = self._peek()
        if tok is None:
            raise ParseError("unexpected end of expression", self.end_line, 1)
        if expected is not None and tok.kind != expected:
            raise ParseError(f"expected {expected!r}, found {tok.text!r}", tok.line, tok.column)
        self.pos += 1
        return tok

    def parse(self) -> GradedExpr:
        expr = self._expr()
        tok = self._peek()
        if tok is not None:
            raise ParseError(f"unexpected token {tok.text!r}", tok.line, tok.column)
        return expr

    def _expr(self) -> GradedExpr:
        sign = 1
        tok = self._peek()
        if tok is not None and tok.kind == "-":
            self._next()
            sign = -1
        result = sign * self._term()
        while (tok := self._peek()) is not None and tok.kind in "+-":
            self._next()
            term = self._term()
            result = result + term if tok.kind == "+" else result - term
        return result

    def _term(self) -> GradedExpr:
        result = self._unary()
        while (tok := self._peek()) is not None and tok.kind == "*":
            self._next()
            result = result * self._unary()
        return result

    def _unary(self) -> GradedExpr:
        tok = self._peek()
        if tok is not None and tok.kind == "-":
            self._next()
            return -self._unary()
        return self._power()

    def _power(self) -> GradedExpr:
        base = self._atom()
        if (tok := self._peek()) is not None and tok.kind == "^":
            self._next()
            exp_tok = self._next("INT")
            return base ** int(exp_tok.text)
        return base

    def _atom(self) -> GradedExpr:
        tok = self._next()
        if tok.kind == "INT":
            value = Fraction(int(tok.text))
            if (nxt := self._peek()) is not None and nxt.kind == "/":
                self._next()
                denom = self._next("INT")
                if int(denom.text) == 0:
                    raise ParseError("zero denominator", denom.line, denom.column)
                value = Fraction(int(tok.text), int(denom.text))
            return self.registry.const(value)
        if tok.kind == "(":
            inner = self._expr()
            self._next(")")
            return inner
        if tok.kind == "NAME":
            if tok.text == "d":
                self._next("(")
                name_tok = self._next("NAME")
                self._next(")")
                velocity = f"d({name_tok.text})"
                if velocity not in self.registry:
                    raise ParseError(
                        f"velocity of undeclared coordinate {name_tok.text!r}",
                        name_tok.line,
                        name_tok.column,
                    )
                return self.registry.sym(velocity)
            if tok.text not in self.registry:
                raise ParseError(f"unknown symbol {tok.text!r}", tok.line, tok.column)
            var = self.registry.var(tok.text)
            if var.kind not in (VarKind.COORD, VarKind.AUX_COORD):
                raise ParseError(
                    f"{tok.text!r} is not a declared coordinate", tok.line, tok.column
                )
            return self.registry.sym(tok.text)
        raise ParseError(f"unexpected token {tok.text!r}", tok.line, tok.column)


def parse_model(text: str) -> ModelSpec:
    """Parse model text into a ModelSpec.

    Raises ParseError (with line/column) on syntax errors, undeclared or
    duplicate symbols, reserved names, and velocity degree above two.
    """
    tokens = _tokenize(text)
    end_line = tokens[-1].line if tokens else 1

    name: str | None = None
    coords: list[str] = []
    aux: list[str] = []
    lagrangian_tokens: list[Token] | None = None
    lagrangian_pos: tuple[int, int] = (end_line, 1)

    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.kind != "NAME" or tok.text not in KEYWORDS:
            raise ParseError(
                f"expected a statement keyword, found {tok.text!r}", tok.line, tok.column
            )
        if tok.text == "model":
            if name is not None:
                raise ParseError("duplicate model statement", tok.line, tok.column)
            i += 1
            if i >= len(tokens) or tokens[i].kind != "NAME":
                raise ParseError("model requires a name", tok.line, tok.column)
            name = tokens[i].text
            i += 1
        elif tok.text in ("coords", "aux"):
            target = coords if tok.text == "coords" else aux
            i += 1
            count = 0
            while i < len(tokens) and tokens[i].kind == "NAME" and tokens[i].text not in KEYWORDS:
                sym = tokens[i]
                if sym.text in RESERVED:
                    raise ParseError(f"{sym.text!r} is a reserved name", sym.line, sym.column)
                if sym.text in coords or sym.text in aux:
                    raise ParseError(
                        f"duplicate coordinate {sym.text!r}", sym.line, sym.column
                    )
                target.append(sym.text)
                count += 1
                i += 1
            if count == 0:
                raise ParseError(f"{tok.text} requires at least one name", tok.line, tok.column)
        else:  # lagrangian
            if lagrangian_tokens is not None:
                raise ParseError("duplicate lagrangian statement", tok.line, tok.column)
            lagrangian_pos = (tok.line, tok.column)
            i += 1
            if i >= len(tokens) or tokens[i].kind != ":":
                raise ParseError("lagrangian requires ':'", tok.line, tok.column)
            i += 1
            start = i
            while i < len(tokens) and not (
                tokens[i].kind == "NAME" and tokens[i].text in KEYWORDS
            ):
                i += 1
            lagrangian_tokens = list(tokens[start:i])

    if name is None:
        raise ParseError("missing model statement", 1, 1)
    if not coords:
        raise ParseError("missing coords statement", 1, 1)
    if lagrangian_tokens is None or not lagrangian_tokens:
        raise ParseError("missing lagrangian statement", *lagrangian_pos)

    try:
        registry, momentum_names = build_registry(coords, aux)
    except ValueError as exc:
        raise ParseError(str(exc), *lagrangian_pos) from exc
    lagrangian = _ExprParser(lagrangian_tokens, registry, end_line).parse()

    velocities = {f"d({c})" for c in coords + aux}
    for (evens, _odd) in lagrangian.terms:
        vel_degree = sum(exp for nm, exp in evens if nm in velocities)
        if vel_degree > 2:
            raise ParseError(
                f"velocity degree {vel_degree} exceeds 2", *lagrangian_pos
            )

    return ModelSpec(
        name=name,
        coordinates=tuple(coords),
        aux=tuple(aux),
        lagrangian=lagrangian,
        registry=registry,
        momentum_names=momentum_names,
    )


def render_model(spec: ModelSpec) -> str:
    """Canonical text for a spec; parse(render(spec)) == spec."""
    lines = [f"model {spec.name}", "coords " + " ".join(spec.coordinates)]
    if spec.aux:
        lines.append("aux " + " ".join(spec.aux))
    lines.append(f"lagrangian: {spec.lagrangian}")
    return "\n".join(lines) + "\n"


def model_hash(spec: ModelSpec) -> str:
    return hashlib.sha256(render_model(spec).encode()).hexdigest()


def emit_report(result: Any, spec: ModelSpec, analysis: str | None = None) -> dict:
    """Wrap an analysis result in the standard report envelope.

    ``result`` either provides ``to_report()`` (and an ``ANALYSIS`` label) or
    is a plain mapping, in which case ``analysis`` must be given.
    """
    from hamsys import __version__

    if hasattr(result, "to_report"):
        payload = result.to_report()
        label = analysis or getattr(result, "ANALYSIS", type(result).__name__.lower())
    elif isinstance(result, Mapping):
        if analysis is None:
            raise ValueError("plain-dict results require an analysis label")
        payload = dict(result)
        label = analysis
    else:
        raise TypeError(f"cannot serialize {type(result).__name__}")
    return {
        "engine": {"name": "hamsys", "version": __version__},
        "model": {
            "name": spec.name,
            "coordinates": list(spec.coordinates),
            "aux": list(spec.aux),
            "hash": model_hash(spec),
        },
        "analysis": label,
        "results": payload,
    }


def report_json(report: Mapping) -> str:
    return json.dumps(report, indent=2) + "\n"


def trajectory_csv(variables: Sequence[str], times, states, residuals) -> str:
    """Delimited trajectory: t, state columns, constraint residual columns."""
    n_res = len(residuals[0]) if len(residuals) else 0
    header = ",".join(["t", *variables, *(f"res{i + 1}" for i in range(n_res))])
    lines = [header]
    for k in range(len(times)):
        row = [times[k], *states[k], *(residuals[k] if n_res else ())]
        lines.append(",".join(f"{float(v):.17g}" for v in row))
    return "\n".join(lines) + "\n"


def parse_initial_conditions(text: str, variables: Sequence[str]) -> dict[str, float]:
    """Parse ``name=value`` pairs separated by commas, validating names."""
    values: dict[str, float] = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise ValueError(f"bad initial condition {chunk!r}, expected name=value")
        key, _, raw = chunk.partition("=")
        key = key.strip()
        if key not in variables:
            raise ValueError(f"unknown variable {key!r} in initial conditions")
        try:
            values[key] = float(Fraction(raw.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad value for {key!r}: {raw.strip()!r}") from exc
    return values
