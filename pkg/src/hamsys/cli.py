"""Command line front end.

Exit codes: 0 on success, 1 when an analysis fails (inconsistent system,
non-finite integration, bad algebraic structure), 2 for usage problems
(unreadable or malformed model files, bad initial conditions).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from hamsys import brst as brst_mod
from hamsys import dirac, dynamics, embedding, legendre, models, verify
from hamsys import hamilton_jacobi as hj
from hamsys import modelio
from hamsys.modelio import ModelSpec


class _UsageError(Exception):
    pass


def _load_model(ref: str) -> ModelSpec:
    """Resolve a bundled model name or a model file path."""
    if ref in models.BUNDLED:
        return models.load(ref)
    try:
        text = Path(ref).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(
            f"{ref!r} is neither a bundled model ({', '.join(models.bundled_names())})"
            f" nor a readable file: {exc}"
        ) from exc
    try:
        return modelio.parse_model(text)
    except modelio.ParseError as exc:
        raise _UsageError(f"{ref}: {exc}") from exc


def _is_bundled_nonholonomic(spec: ModelSpec) -> bool:
    return modelio.model_hash(spec) == modelio.model_hash(models.load("nonholonomic"))


def _companion_gauged(args) -> ModelSpec | None:
    """The gauged partner model, if given or inferable."""
    if args.gauged is not None:
        return _load_model(args.gauged)
    if _is_bundled_nonholonomic(_load_model(args.model)):
        return models.load("nonholonomic_gauged")
    return None


def _print_report(report: dict) -> None:
    sys.stdout.write(modelio.report_json(report))


def _section(title: str) -> None:
    print(title)


def _kv(label: str, value) -> None:
    print(f"  {label} = {value}")


def cmd_analyze(args) -> int:
    spec = _load_model(args.model)
    leg = legendre.analyze(spec)
    chain = dirac.run_chain(leg)
    if args.format == "json":
        payload = {"legendre": leg.to_report(), "chain": chain.to_report()}
        _print_report(modelio.emit_report(payload, spec, analysis="constrained-analysis"))
        return 0
    print(f"model {spec.name}")
    _section("momenta:")
    for name, expr in leg.momenta.items():
        _kv(name, expr)
    print(f"hessian rank {leg.rank} of {len(spec.all_coordinates)}")
    _section("canonical hamiltonian:")
    _kv("H", leg.canonical_h)
    if not chain.constraints:
        print("no constraints: the Legendre transform is invertible")
        return 0
    _section(f"constraint chain ({chain.rounds} rounds):")
    for c in chain.constraints:
        print(f"  {c.label} [{c.cls.value}] generation {c.generation}: {c.expr}")
    _section("multipliers:")
    for name in chain.multiplier_names:
        value = chain.multipliers[name]
        _kv(name, "free" if value is None else value)
    _section("total hamiltonian:")
    _kv("H_T", chain.total_h)
    return 0


def cmd_hj(args) -> int:
    spec = _load_model(args.model)
    leg = legendre.analyze(spec)
    chain = dirac.run_chain(leg)
    system = hj.build_hj_system(leg)
    hj.integrability_closure(system)
    comparison = hj.compare_with_dirac(system, chain)
    odes = [
        hj.derive_parameter_ode(system, parameter)
        for parameter in system.fixings
    ]
    if args.format == "json":
        payload = dict(system.to_report())
        payload["parameter_odes"] = [ode.to_report() for ode in odes]
        payload["dirac_comparison"] = comparison
        _print_report(modelio.emit_report(payload, spec, analysis="hamilton-jacobi"))
        return 0
    print(f"model {spec.name}")
    _section("generators:")
    for label, expr in system.entries:
        _kv(label, expr)
    print(f"closure: {'closed' if system.closed else 'open'} after {system.rounds} rounds")
    if system.fixings:
        _section("velocity fixings:")
        for coord, value in system.fixings.items():
            _kv(system.dot_names[coord], value)
    _section("evolution table:")
    for var, row in system.eom_table.items():
        cells = ", ".join(f"d/d{p}: {expr}" for p, expr in row.items())
        print(f"  {var}: {cells}")
    for ode in odes:
        kind = "autonomous" if ode.autonomous else "non-autonomous"
        print(f"parameter equation [{kind}]: {ode.expression} = 0")
    print(f"dirac comparison: {'match' if comparison['match'] else 'MISMATCH'}")
    return 0


def cmd_embed(args) -> int:
    spec = _load_model(args.model)
    chain = dirac.run_chain(legendre.analyze(spec))
    emb = embedding.bft_embed(chain)
    gauss = embedding.check_gauss_algebra(emb)
    gauged = _companion_gauged(args)
    roundtrip = (
        embedding.roundtrip_lagrangian(emb, gauged) if gauged is not None else None
    )
    if args.format == "json":
        payload = dict(emb.to_report())
        payload["gauss_algebra"] = gauss
        if roundtrip is not None:
            payload["roundtrip"] = roundtrip
        _print_report(modelio.emit_report(payload, spec, analysis="embedding"))
        return 0
    print(f"model {spec.name}")
    _section("auxiliary pairs:")
    for theta, pi in emb.aux_pairs:
        print(f"  ({theta}, {pi})")
    _section("first-class constraints:")
    for i, expr in enumerate(emb.fc_constraints, start=1):
        _kv(f"Omega{i}~", expr)
    _section("invariant completions:")
    for name, expr in emb.tilde_map.items():
        _kv(f"{name}~", expr)
    _section("hamiltonians:")
    _kv("H~", emb.fc_hamiltonian)
    _kv("H~'", emb.fc_hamiltonian_prime)
    print(f"gauss algebra: {'holds' if gauss['holds'] else 'BROKEN'}")
    if roundtrip is not None:
        print(f"gauged roundtrip: {'match' if roundtrip['match'] else 'MISMATCH'}")
        for key in (
            "primary_matches",
            "secondary_matches",
            "all_first_class",
            "single_free_multiplier",
            "hamiltonian_weakly_equal",
        ):
            _kv(key, roundtrip[key])
    return 0


def cmd_brst(args) -> int:
    spec = _load_model(args.model)
    chain = dirac.run_chain(legendre.analyze(spec))
    emb = embedding.bft_embed(chain)
    gauge = None if args.gauge == "none" else args.gauge
    cx = brst_mod.build_complex(emb, gauge=gauge)
    identities = brst_mod.check_brst_identities(cx)
    table = brst_mod.brst_table(cx)
    gauged = _companion_gauged(args)
    extended = None
    if gauged is not None:
        extended = brst_mod.ghost_extended_constraint(
            cx, legendre.analyze(gauged)
        )
    if args.format == "json":
        payload = dict(cx.to_report())
        payload["identities"] = identities
        payload["transformations"] = {k: str(v) for k, v in table.items()}
        if extended is not None:
            payload["ghost_extended_constraint"] = str(extended)
        _print_report(modelio.emit_report(payload, spec, analysis="brst"))
        return 0
    print(f"model {spec.name} (gauge: {args.gauge})")
    _kv("Q", cx.charge)
    _kv("Psi", cx.gauge_fermion)
    _kv("H_m", cx.minimal_h)
    _kv("H_gf", cx.total_h)
    print(f"identities: {'hold' if identities['holds'] else 'BROKEN'}")
    for key in ("q_squared", "q_minimal", "q_total"):
        _kv(key, identities[key])
    _section("transformations:")
    for name, expr in table.items():
        _kv(f"delta({name})", expr)
    if extended is not None:
        _kv("ghost-extended constraint", extended)
    return 0


def cmd_simulate(args) -> int:
    spec = _load_model(args.model)
    if args.dt <= 0:
        raise _UsageError("dt must be positive")
    if args.t1 <= args.t0:
        raise _UsageError("t1 must be greater than t0")
    leg = legendre.analyze(spec)
    chain = dirac.run_chain(leg)
    system = dynamics.compile_rhs(dirac.hamilton_eom(chain))
    if args.ic is not None:
        try:
            initial = modelio.parse_initial_conditions(args.ic, system.variables)
        except ValueError as exc:
            raise _UsageError(str(exc)) from exc
        missing = [v for v in system.variables if v not in initial]
        if missing:
            raise _UsageError(f"initial conditions missing {missing}")
    elif _is_bundled_nonholonomic(spec):
        # reproducible default on the bundled model: a closed-form family member
        initial = dynamics.family_state(
            dynamics.FamilyConstants(a=1.0, b=0.0, c1=0.0, c2=0.0), args.t0
        )
    else:
        raise _UsageError("--ic is required for models other than the bundled nonholonomic one")
    trajectory = dynamics.integrate_rk4(
        system, initial, args.t0, args.t1, args.dt, constraints=chain.exprs()
    )
    sys.stdout.write(
        modelio.trajectory_csv(
            trajectory.variables, trajectory.times, trajectory.states, trajectory.residuals
        )
    )
    summary = trajectory.to_report()
    print(f"steps: {summary['steps']}", file=sys.stderr)
    print(f"span: t = {summary['t0']} .. {summary['t1']}", file=sys.stderr)
    print(f"max residuals: {summary['max_residuals']}", file=sys.stderr)
    if args.plot is not None:
        from hamsys import plotting

        paths = [
            plotting.plot_trajectory(trajectory, f"{args.plot}_trajectory.png"),
            plotting.plot_residuals(trajectory, f"{args.plot}_residuals.png"),
        ]
        print(f"plots: {' '.join(paths)}", file=sys.stderr)
    return 0


def cmd_verify_paper(args) -> int:
    results = verify.run_all()
    all_passed = all(r.passed for r in results)
    if args.format == "json":
        payload = {
            "criteria": [r.to_report() for r in results],
            "all_passed": all_passed,
        }
        spec = models.load("nonholonomic")
        _print_report(modelio.emit_report(payload, spec, analysis="verification"))
        return 0 if all_passed else 1
    for line in verify.format_lines(results):
        print(line)
    for r in results:
        for detail in r.details:
            if args.verbose or not r.passed or "discrepancy" in detail:
                print(f"    {detail}")
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed against the reference analysis")
    return 0 if all_passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hamsys",
        description="Constrained-Hamiltonian analysis of singular Lagrangian models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--model",
            default="nonholonomic",
            help="bundled model name or path to a model file (default: nonholonomic)",
        )

    def add_format(p: argparse.ArgumentParser, default: str = "json") -> None:
        p.add_argument(
            "--format", choices=["json", "text"], default=default,
            help=f"output format (default: {default})",
        )

    p = sub.add_parser("analyze", help="Legendre transform and constraint chain")
    add_model(p)
    add_format(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("hj", help="generator family and integrability closure")
    add_model(p)
    add_format(p)
    p.set_defaults(func=cmd_hj)

    p = sub.add_parser("embed", help="convert second-class constraints to first class")
    add_model(p)
    add_format(p)
    p.add_argument(
        "--gauged",
        help="gauged partner model for the roundtrip check "
        "(defaults to the bundled partner when the model is the bundled one)",
    )
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("brst", help="BRST charge, gauge fixing, and transformations")
    add_model(p)
    add_format(p)
    p.add_argument(
        "--gauge", choices=["unitary", "none"], default="unitary",
        help="gauge fermion choice (default: unitary)",
    )
    p.add_argument(
        "--gauged",
        help="gauged partner model for the ghost-extended constraint "
        "(defaults to the bundled partner when the model is the bundled one)",
    )
    p.set_defaults(func=cmd_brst)

    p = sub.add_parser("simulate", help="integrate the equations of motion (CSV on stdout)")
    add_model(p)
    p.add_argument("--t0", type=float, default=0.0, help="start time (default: 0)")
    p.add_argument("--t1", type=float, default=1.0, help="end time (default: 1)")
    p.add_argument("--dt", type=float, default=1e-3, help="step size (default: 1e-3)")
    p.add_argument(
        "--ic",
        help='initial conditions as "name=value, ..." '
        "(required unless the model is the bundled nonholonomic one)",
    )
    p.add_argument(
        "--plot",
        metavar="PREFIX",
        help="also write PREFIX_trajectory.png and PREFIX_residuals.png",
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "verify-paper",
        help="run the acceptance criteria against the reference analysis",
    )
    add_format(p, default="text")
    p.add_argument(
        "--verbose", action="store_true", help="print detail lines for passing criteria too"
    )
    p.set_defaults(func=cmd_verify_paper)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
