"""Bit-stable output files, run manifests, and the scenario file format.

All CSV numbers are written with 17 significant digits, '.' decimal
separator and '\n' line endings, so identical runs produce byte-identical
files on any platform.  Manifests record the resolved parameters, the
root seed with its substream labels, wall times, and a sha256 digest of
every output file.
"""

from __future__ import annotations

import hashlib
import json
import datetime
from dataclasses import replace
from pathlib import Path

from . import __version__
from . import rng as streams
from .dynamics import InteractionFunction, Model, Trajectory
from .harness import (
    MonteCarloResult,
    ScenarioSpec,
    SweepRow,
    UniformRecipe,
    scenario_counterexample_rstar1,
    scenario_hexagon,
    scenario_uniform,
)
from .metrics import MetricsSeries


class ParseError(ValueError):
    """Scenario file error, carrying the offending line or key."""


def format_number(x) -> str:
    return format(float(x), ".17g")


def _write_lines(path, header: list, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_trajectory_csv(path, trajectory: Trajectory) -> None:
    dim = trajectory.positions[0].shape[1]
    header = ["time", "agent"] + [f"coord_{k}" for k in range(dim)]
    def rows():
        for t, snap in zip(trajectory.times, trajectory.positions):
            ts = format_number(t)
            for agent, coords in enumerate(snap):
                yield [ts, str(agent)] + [format_number(c) for c in coords]
    _write_lines(path, header, rows())


def write_metrics_csv(path, metrics: MetricsSeries) -> None:
    header = ["time", "diameter", "variance", "clustering_number",
              "clustering_number_self_inclusive", "connected"]
    def rows():
        for k in range(len(metrics.times)):
            yield [format_number(metrics.times[k]),
                   format_number(metrics.diameter[k]),
                   format_number(metrics.variance[k]),
                   format_number(metrics.clustering_number[k]),
                   format_number(metrics.clustering_number_self_inclusive[k]),
                   "1" if metrics.connected[k] else "0"]
    _write_lines(path, header, rows())


def quantile_column(level: float) -> str:
    pct = 100.0 * level
    if abs(pct - round(pct)) < 1e-9:
        return f"q{int(round(pct)):02d}"
    return "q" + format(pct, "g")


def write_quantiles_csv(path, result: MonteCarloResult) -> None:
    header = ["time"] + [quantile_column(q) for q in result.quantile_levels]
    def rows():
        for k, t in enumerate(result.times):
            yield [format_number(t)] + [format_number(v)
                                        for v in result.quantile_table[k]]
    _write_lines(path, header, rows())


def write_tau_csv(path, result: MonteCarloResult) -> None:
    header = ["realization", "seed", "tau"]
    def rows():
        for k, (seed, tau) in enumerate(zip(result.seeds, result.taus)):
            yield [str(k), str(seed), "" if tau is None else format_number(tau)]
    _write_lines(path, header, rows())


def write_sweep_csv(path, rows: list[SweepRow]) -> None:
    header = ["rstar", "realizations", "n_censored", "tau_mean", "tau_median",
              "tau_q05", "tau_q95", "tau_min", "tau_max"]
    def lines():
        for r in rows:
            yield [format_number(r.r_star), str(r.realizations),
                   str(r.n_censored), format_number(r.tau_mean),
                   format_number(r.tau_median), format_number(r.tau_q05),
                   format_number(r.tau_q95), format_number(r.tau_min),
                   format_number(r.tau_max)]
    _write_lines(path, header, lines())


def write_graph_snapshots(out_dir, trajectory: Trajectory,
                          phi: InteractionFunction | None = None) -> list:
    """Edge-list CSV per recorded step: columns kind,i,j with kind one of
    interaction|behind."""
    from .dynamics import interaction_weights, local_average, AgentConfiguration
    from .graphs import behind_graph, interaction_graph

    if phi is None:
        phi = InteractionFunction.indicator()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    eps = trajectory.params.geometry_eps
    for step, (t, snap) in enumerate(zip(trajectory.times, trajectory.positions)):
        config = AgentConfiguration(snap)
        averages = local_average(config, interaction_weights(config, phi))
        inter = interaction_graph(config, eps)
        behind = behind_graph(config, averages, trajectory.params.r_star, eps)
        path = out_dir / f"step_{step:06d}.csv"
        def rows():
            for i, j in sorted(inter.edges):
                yield ["interaction", str(i), str(j)]
            for i, j in sorted(behind.edges):
                yield ["behind", str(i), str(j)]
        _write_lines(path, ["kind", "i", "j"], rows())
        written.append(path)
    return written


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, command: str, parameters: dict, root_seed: int,
                   started: str, finished: str, output_paths: list) -> None:
    base = Path(path).parent
    outputs = {}
    for p in output_paths:
        p = Path(p)
        outputs[str(p.relative_to(base))] = {
            "sha256": file_digest(p),
            "bytes": p.stat().st_size,
        }
    manifest = {
        "tool": "nolb",
        "version": __version__,
        "command": command,
        "parameters": parameters,
        "root_seed": int(root_seed),
        "substreams": {label: {"spawn_key_prefix": code}
                       for code, label in streams.STREAM_LABELS.items()},
        "started_utc": started,
        "finished_utc": finished,
        "outputs": outputs,
    }
    with open(path, "w", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def verify_manifest(path) -> list:
    """Return a list of problems (empty when every referenced output
    exists and matches its recorded digest)."""
    base = Path(path).parent
    with open(path) as fh:
        manifest = json.load(fh)
    problems = []
    for name, meta in manifest.get("outputs", {}).items():
        p = base / name
        if not p.exists():
            problems.append(f"missing output file: {name}")
        elif file_digest(p) != meta["sha256"]:
            problems.append(f"digest mismatch: {name}")
    return problems


def utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


# --- scenario files -------------------------------------------------------
#
# Flat `key = value` lines, one per line; '#' starts a comment; blank
# lines are ignored; keys may appear once.  Unknown keys are an error.

_SCENARIOS = ("uniform", "counterexample-r1", "hexagon")
_MODELS = tuple(m.value for m in Model)

_KEY_TYPES = {
    "name": str,
    "scenario": str,
    "model": str,
    "n": int,
    "dim": int,
    "domain_length": float,
    "rstar": float,
    "dt": float,
    "t_end": float,
    "seed": int,
    "record_every": int,
    "require_connected": bool,
    "projection_tol": float,
    "geometry_eps": float,
    "phi_breakpoints": str,
    "phi_values": str,
}

_UNIFORM_ONLY_KEYS = ("n", "dim", "domain_length", "require_connected")

_RANGES = {
    "n": (lambda v: v >= 1, "must be at least 1"),
    "dim": (lambda v: v >= 1, "must be at least 1"),
    "domain_length": (lambda v: v > 0, "must be positive"),
    "rstar": (lambda v: 0.0 <= v <= 1.0, "must lie in [0, 1]"),
    "dt": (lambda v: 0.0 < v <= 0.1, "must lie in (0, 0.1]"),
    "t_end": (lambda v: v >= 0.0, "must be nonnegative"),
    "record_every": (lambda v: v >= 1, "must be at least 1"),
    "projection_tol": (lambda v: v > 0, "must be positive"),
    "geometry_eps": (lambda v: v > 0, "must be positive"),
}


def _parse_value(key: str, raw: str, lineno: int):
    typ = _KEY_TYPES[key]
    try:
        if typ is bool:
            low = raw.lower()
            if low in ("true", "1", "yes"):
                return True
            if low in ("false", "0", "no"):
                return False
            raise ValueError
        return typ(raw)
    except ValueError:
        raise ParseError(
            f"line {lineno}: value for '{key}' must be {typ.__name__}: {raw!r}"
        ) from None


def parse_scenario_file(path) -> ScenarioSpec:
    """Parse a flat key = value scenario description into a ScenarioSpec."""
    entries: dict[str, object] = {}
    with open(path) as fh:
        for lineno, raw_line in enumerate(fh, start=1):
            line = raw_line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"line {lineno}: expected 'key = value', got {raw_line.rstrip()!r}")
            key, _, raw = line.partition("=")
            key = key.strip()
            raw = raw.strip()
            if key not in _KEY_TYPES:
                raise ParseError(f"line {lineno}: unknown key '{key}'")
            if key in entries:
                raise ParseError(f"line {lineno}: duplicate key '{key}'")
            value = _parse_value(key, raw, lineno)
            if key in _RANGES:
                ok, msg = _RANGES[key]
                if not ok(value):
                    raise ParseError(f"line {lineno}: {key} {msg} (got {raw})")
            entries[key] = value
    return build_scenario(entries)


def _build_phi(entries: dict) -> InteractionFunction | None:
    has_bp = "phi_breakpoints" in entries
    has_vals = "phi_values" in entries
    if has_bp != has_vals:
        raise ParseError("phi_breakpoints and phi_values must be given together")
    if not has_bp:
        return None
    try:
        bp = [float(x) for x in str(entries["phi_breakpoints"]).split(",")]
        vals = [float(x) for x in str(entries["phi_values"]).split(",")]
        return InteractionFunction.piecewise_constant(bp, vals)
    except ValueError as exc:
        raise ParseError(f"invalid interaction function table: {exc}") from None


def build_scenario(entries: dict) -> ScenarioSpec:
    """Assemble a ScenarioSpec from parsed key/value entries."""
    scenario = entries.get("scenario", "uniform")
    if scenario not in _SCENARIOS:
        raise ParseError(f"scenario must be one of {', '.join(_SCENARIOS)}")
    model_name = entries.get("model")
    if model_name is not None and model_name not in _MODELS:
        raise ParseError(f"model must be one of {', '.join(_MODELS)}")
    if scenario != "uniform":
        for key in _UNIFORM_ONLY_KEYS:
            if key in entries:
                raise ParseError(f"key '{key}' applies only to the uniform scenario")

    try:
        if scenario == "uniform":
            spec = scenario_uniform(
                n=entries.get("n", 50),
                domain_length=entries.get("domain_length", 10.0),
                dimension=entries.get("dim", 1),
                seed=entries.get("seed", 0),
                require_connected=entries.get("require_connected", True),
            )
        elif scenario == "counterexample-r1":
            spec = scenario_counterexample_rstar1()
        else:
            spec = scenario_hexagon(entries.get("rstar", 0.05))
    except ValueError as exc:
        raise ParseError(str(exc)) from None

    params = spec.params
    updates = {}
    for key, attr in (("model", "model"), ("rstar", "r_star"), ("dt", "dt"),
                      ("t_end", "t_end"), ("seed", "seed"),
                      ("projection_tol", "projection_tol"),
                      ("geometry_eps", "geometry_eps")):
        if key in entries:
            updates[attr] = (Model(entries[key]) if key == "model"
                             else entries[key])
    if updates:
        params = replace(params, **updates)
    spec = replace(spec, params=params)
    if "record_every" in entries:
        spec = replace(spec, record_every=entries["record_every"])
    if "name" in entries:
        spec = replace(spec, name=entries["name"])
    if scenario == "uniform" and "domain_length" in entries:
        spec = replace(spec, domain_length=entries["domain_length"])
    phi = _build_phi(entries)
    if phi is not None:
        spec = replace(spec, phi=phi)
    return spec


def write_scenario_file(path, spec: ScenarioSpec) -> None:
    """Write a spec back to the flat format; parse(write(s)) == s."""
    if spec.recipe is not None:
        scenario = "uniform"
    elif spec.name in ("counterexample-r1", "hexagon"):
        scenario = spec.name
    else:
        raise ValueError("only recipe-backed or preset scenarios can be written")
    lines = [
        f"name = {spec.name}",
        f"scenario = {scenario}",
        f"model = {spec.params.model.value}",
        f"rstar = {format_number(spec.params.r_star)}",
        f"dt = {format_number(spec.params.dt)}",
        f"t_end = {format_number(spec.params.t_end)}",
        f"seed = {spec.params.seed}",
        f"record_every = {spec.record_every}",
        f"projection_tol = {format_number(spec.params.projection_tol)}",
        f"geometry_eps = {format_number(spec.params.geometry_eps)}",
    ]
    if spec.recipe is not None:
        lines += [
            f"n = {spec.recipe.n}",
            f"dim = {spec.recipe.dimension}",
            f"domain_length = {format_number(spec.recipe.domain_length)}",
            f"require_connected = {'true' if spec.recipe.require_connected else 'false'}",
        ]
    if spec.phi is not None:
        bp = ",".join(format_number(x) for x in spec.phi.breakpoints)
        vals = ",".join(format_number(x) for x in spec.phi.values)
        lines += [f"phi_breakpoints = {bp}", f"phi_values = {vals}"]
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
