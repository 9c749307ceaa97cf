"""Command-line entry points.

    nolb simulate    one trajectory -> trajectory.csv, metrics.csv
    nolb montecarlo  many realizations -> quantiles.csv, tau.csv
    nolb sweep       stopping-time statistics across critical radii -> sweep.csv
    nolb interpolate bc/nolb/rnolb on one start -> metrics_<model>.csv

Every command writes manifest.json recording resolved parameters, the
root seed, and digests of the produced files.  Exit codes: 0 success,
2 invalid flags or scenario files, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .dynamics import InteractionFunction, Model, NumericalError
from .geometry import ProjectionError
from .harness import (
    MonteCarloSpec,
    ScenarioError,
    run_interpolation_comparison,
    run_monte_carlo,
    run_scenario,
    scenario_counterexample_rstar1,
    scenario_hexagon,
    scenario_uniform,
    sweep_rstar,
)
from .io import (
    ParseError,
    parse_scenario_file,
    utc_now,
    write_graph_snapshots,
    write_manifest,
    write_metrics_csv,
    write_quantiles_csv,
    write_sweep_csv,
    write_tau_csv,
    write_trajectory_csv,
)

MODEL_NAMES = [m.value for m in Model]
SCENARIO_NAMES = ["uniform", "counterexample-r1", "hexagon"]


class UsageError(ValueError):
    """Invalid flag combination; maps to exit code 2."""


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=MODEL_NAMES, default=None)
    p.add_argument("--rstar", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--record-every", type=int, default=None)
    p.add_argument("--out-dir", required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nolb",
        description="Bounded-confidence opinion dynamics with "
                    "connectivity-preserving controls")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one trajectory")
    _add_run_flags(sim)
    sim.add_argument("--scenario", choices=SCENARIO_NAMES, default=None)
    sim.add_argument("--scenario-file", default=None)
    sim.add_argument("--n", type=int, default=None)
    sim.add_argument("--dim", type=int, default=None)
    sim.add_argument("--domain-length", type=float, default=None)
    sim.add_argument("--no-require-connected", action="store_true")
    sim.add_argument("--emit-graphs", action="store_true")
    sim.add_argument("--phi-breakpoints", default=None,
                     help="comma-separated breakpoints from 0 to 1")
    sim.add_argument("--phi-values", default=None,
                     help="comma-separated positive weights per interval")
    sim.set_defaults(handler=cmd_simulate)

    mc = sub.add_parser("montecarlo", help="run independent realizations")
    _add_run_flags(mc)
    mc.add_argument("--realizations", type=int, required=True)
    mc.add_argument("--quantiles", default="0,0.05,0.5,0.95,1")
    mc.add_argument("--jobs", type=int, default=1)
    mc.add_argument("--n", type=int, default=None)
    mc.add_argument("--dim", type=int, default=None)
    mc.add_argument("--domain-length", type=float, default=None)
    mc.add_argument("--no-require-connected", action="store_true")
    mc.set_defaults(handler=cmd_montecarlo)

    sw = sub.add_parser("sweep", help="stopping times across critical radii")
    _add_run_flags(sw)
    sw.add_argument("--rstar-values", required=True,
                    help="comma-separated radii strictly inside (0, 1)")
    sw.add_argument("--realizations", type=int, required=True)
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--n", type=int, default=None)
    sw.add_argument("--domain-length", type=float, default=None)
    sw.set_defaults(handler=cmd_sweep)

    it = sub.add_parser("interpolate",
                        help="bc, nolb and rnolb from one shared start")
    _add_run_flags(it)
    it.add_argument("--n", type=int, default=None)
    it.add_argument("--domain-length", type=float, default=None)
    it.set_defaults(handler=cmd_interpolate)

    return parser


def _given(args, name, default):
    value = getattr(args, name)
    return default if value is None else value


def _build_phi(args) -> InteractionFunction | None:
    has_bp = args.phi_breakpoints is not None
    has_vals = args.phi_values is not None
    if has_bp != has_vals:
        raise UsageError("--phi-breakpoints and --phi-values must be given together")
    if not has_bp:
        return None
    try:
        bp = [float(x) for x in args.phi_breakpoints.split(",")]
        vals = [float(x) for x in args.phi_values.split(",")]
        return InteractionFunction.piecewise_constant(bp, vals)
    except ValueError as exc:
        raise UsageError(f"invalid interaction function table: {exc}") from None


def _resolve_simulate_spec(args):
    if args.scenario_file is not None:
        if args.scenario is not None:
            raise UsageError("--scenario and --scenario-file are mutually exclusive")
        spec = parse_scenario_file(args.scenario_file)
        scenario = "file"
    else:
        scenario = args.scenario or "uniform"
        if scenario == "uniform":
            spec = scenario_uniform(
                n=_given(args, "n", 50),
                domain_length=_given(args, "domain_length", 10.0),
                dimension=_given(args, "dim", 1),
                seed=_given(args, "seed", 0),
                require_connected=not args.no_require_connected,
                model=Model(_given(args, "model", Model.NOLB.value)),
            )
        else:
            for flag in ("n", "dim", "domain_length"):
                if getattr(args, flag) is not None:
                    raise UsageError(
                        f"--{flag.replace('_', '-')} applies only to the uniform scenario")
            if scenario == "counterexample-r1":
                spec = scenario_counterexample_rstar1()
            else:
                spec = scenario_hexagon(_given(args, "rstar", 0.05))

    params = spec.params
    updates = {}
    if args.model is not None:
        updates["model"] = Model(args.model)
    if args.rstar is not None:
        updates["r_star"] = args.rstar
    if args.dt is not None:
        updates["dt"] = args.dt
    if args.t_end is not None:
        updates["t_end"] = args.t_end
    if args.seed is not None:
        updates["seed"] = args.seed
    if updates:
        try:
            params = replace(params, **updates)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    spec = replace(spec, params=params)
    if args.record_every is not None:
        spec = replace(spec, record_every=args.record_every)
    return spec, scenario


def _params_dict(spec, extra=None) -> dict:
    out = {
        "model": spec.params.model.value,
        "rstar": spec.params.r_star,
        "dt": spec.params.dt,
        "t_end": spec.params.t_end,
        "seed": spec.params.seed,
        "projection_tol": spec.params.projection_tol,
        "geometry_eps": spec.params.geometry_eps,
        "record_every": spec.record_every,
        "domain_length": spec.domain_length,
        "scenario": spec.name,
    }
    if spec.recipe is not None:
        out.update(n=spec.recipe.n, dim=spec.recipe.dimension,
                   require_connected=spec.recipe.require_connected)
    else:
        out.update(n=spec.initial.n_agents, dim=spec.initial.dimension)
    if extra:
        out.update(extra)
    return out


def cmd_simulate(args) -> int:
    spec, _ = _resolve_simulate_spec(args)
    phi = _build_phi(args)
    if phi is not None:
        spec = replace(spec, phi=phi)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = utc_now()
    trajectory = run_scenario(spec)
    outputs = []
    path = out_dir / "trajectory.csv"
    write_trajectory_csv(path, trajectory)
    outputs.append(path)
    path = out_dir / "metrics.csv"
    write_metrics_csv(path, trajectory.metrics)
    outputs.append(path)
    if args.emit_graphs:
        outputs.extend(write_graph_snapshots(out_dir / "graphs", trajectory,
                                             spec.phi))
    write_manifest(out_dir / "manifest.json", "simulate",
                   _params_dict(spec, {"emit_graphs": bool(args.emit_graphs)}),
                   spec.params.seed, started, utc_now(), outputs)
    print(f"wrote {out_dir}/trajectory.csv, metrics.csv, manifest.json")
    return 0


def _parse_quantiles(raw: str) -> tuple:
    try:
        levels = tuple(float(x) for x in raw.split(","))
    except ValueError:
        raise UsageError(f"--quantiles must be comma-separated numbers: {raw!r}") from None
    if any(not 0.0 <= q <= 1.0 for q in levels):
        raise UsageError("--quantiles entries must lie in [0, 1]")
    if list(levels) != sorted(levels):
        raise UsageError("--quantiles must be sorted ascending")
    return levels


def _mc_spec_from_args(args, model_default=Model.NOLB.value) -> MonteCarloSpec:
    scenario = scenario_uniform(
        n=_given(args, "n", 50),
        domain_length=_given(args, "domain_length", 10.0),
        dimension=_given(args, "dim", 1) if hasattr(args, "dim") else 1,
        seed=_given(args, "seed", 0),
        model=Model(_given(args, "model", model_default)),
        r_star=_given(args, "rstar", 0.5),
        dt=_given(args, "dt", 0.01),
        t_end=_given(args, "t_end", 200.0),
        record_every=_given(args, "record_every", 100),
    )
    require_connected = not getattr(args, "no_require_connected", False)
    quantiles = _parse_quantiles(args.quantiles) if hasattr(args, "quantiles") \
        else (0.0, 0.05, 0.5, 0.95, 1.0)
    try:
        return MonteCarloSpec(realizations=args.realizations,
                              scenario=scenario, quantiles=quantiles,
                              require_connected_start=require_connected)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_montecarlo(args) -> int:
    spec = _mc_spec_from_args(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = utc_now()
    result = run_monte_carlo(spec, jobs=max(1, args.jobs))
    q_path = out_dir / "quantiles.csv"
    write_quantiles_csv(q_path, result)
    t_path = out_dir / "tau.csv"
    write_tau_csv(t_path, result)
    write_manifest(out_dir / "manifest.json", "montecarlo",
                   _params_dict(spec.scenario, {
                       "realizations": spec.realizations,
                       "quantiles": list(spec.quantiles),
                       "require_connected_start": spec.require_connected_start,
                       "jobs": args.jobs,
                   }),
                   spec.scenario.params.seed, started, utc_now(),
                   [q_path, t_path])
    print(f"wrote {out_dir}/quantiles.csv, tau.csv, manifest.json")
    return 0


def cmd_sweep(args) -> int:
    try:
        r_values = [float(x) for x in args.rstar_values.split(",")]
    except ValueError:
        raise UsageError(
            f"--rstar-values must be comma-separated numbers: {args.rstar_values!r}"
        ) from None
    if any(not 0.0 < r < 1.0 for r in r_values):
        raise UsageError("--rstar-values must lie strictly inside (0, 1)")
    args.quantiles = "0,0.05,0.5,0.95,1"
    spec = _mc_spec_from_args(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = utc_now()
    rows = sweep_rstar(spec, r_values, jobs=max(1, args.jobs))
    path = out_dir / "sweep.csv"
    write_sweep_csv(path, rows)
    write_manifest(out_dir / "manifest.json", "sweep",
                   _params_dict(spec.scenario, {
                       "realizations": spec.realizations,
                       "rstar_values": r_values,
                       "jobs": args.jobs,
                   }),
                   spec.scenario.params.seed, started, utc_now(), [path])
    print(f"wrote {out_dir}/sweep.csv, manifest.json")
    return 0


def cmd_interpolate(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = utc_now()
    seed = _given(args, "seed", 1)
    trajectories = run_interpolation_comparison(
        seed=seed,
        n=_given(args, "n", 50),
        domain_length=_given(args, "domain_length", 10.0),
        r_star=_given(args, "rstar", 0.5),
        dt=_given(args, "dt", 0.01),
        t_end=_given(args, "t_end", 500.0),
        record_every=_given(args, "record_every", 25),
    )
    outputs = []
    for name, trajectory in trajectories.items():
        path = out_dir / f"metrics_{name.replace('-', '_')}.csv"
        write_metrics_csv(path, trajectory.metrics)
        outputs.append(path)
    write_manifest(out_dir / "manifest.json", "interpolate",
                   {"seed": seed, "n": _given(args, "n", 50),
                    "domain_length": _given(args, "domain_length", 10.0),
                    "rstar": _given(args, "rstar", 0.5),
                    "dt": _given(args, "dt", 0.01),
                    "t_end": _given(args, "t_end", 500.0),
                    "record_every": _given(args, "record_every", 25)},
                   seed, started, utc_now(), outputs)
    print(f"wrote {out_dir}/metrics_bc.csv, metrics_nolb.csv, "
          f"metrics_rnolb.csv, manifest.json")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except (UsageError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ProjectionError, NumericalError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
