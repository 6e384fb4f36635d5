"""Bundled example models."""

from __future__ import annotations

from hamsys.modelio import ModelSpec, parse_model

NONHOLONOMIC = """\
model nonholonomic
coords q1 q2 q3
lagrangian: 1/2*d(q1)^2 - 1/4*(d(q2) - d(q3))^2 + (q1 + q3)*d(q2)
            - q1 - q2 - q3^2
"""

# Same system after converting its second-class pair to gauge symmetry:
# one auxiliary coordinate, Wess-Zumino style couplings.
NONHOLONOMIC_GAUGED = """\
model nonholonomic_gauged
coords q1 q2 q3
aux theta
lagrangian: 1/2*d(q1)^2 - 1/4*(d(q2) - d(q3))^2 + (q1 + q3)*d(q2)
            - q1 - q2 - q3^2
            + (2*d(q1) - d(q2) - 2*d(theta) + 3)*theta - 1/2*d(theta)^2
"""

FREE_PARTICLE = """\
model free_particle
coords x
lagrangian: 1/2*d(x)^2
"""

BUNDLED: dict[str, str] = {
    "nonholonomic": NONHOLONOMIC,
    "nonholonomic_gauged": NONHOLONOMIC_GAUGED,
    "free_particle": FREE_PARTICLE,
}


def bundled_names() -> list[str]:
    return list(BUNDLED)


def load(name: str) -> ModelSpec:
    """Parse a bundled model by name; each call returns a fresh spec."""
    try:
        text = BUNDLED[name]
    except KeyError:
        raise KeyError(
            f"unknown bundled model {name!r}; available: {', '.join(BUNDLED)}"
        ) from None
    return parse_model(text)
