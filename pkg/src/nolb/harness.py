"""Scenario constructors and experiment drivers.

Scenarios bundle an initial configuration (explicit or a seeded uniform
recipe) with model parameters.  The Monte Carlo driver runs independent
realizations on a shared recording grid, each under a derived per-
realization seed, and aggregates diameter quantiles and stopping times.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import rng as streams
from .dynamics import (
    AgentConfiguration,
    InteractionFunction,
    Model,
    ModelParams,
    Trajectory,
    simulate,
)
from .graphs import adjacency_from_distances, connected_from_adjacency, pairwise_distances
from .metrics import MetricsSeries, stopping_time

MAX_CONNECTED_ATTEMPTS = 1000

# Deterministic sub-nanometer offsets keep coincident cluster members
# distinct so annulus membership is well-defined.
CLUSTER_JITTER = 1e-9
_GOLDEN_ANGLE = 2.399963229728653


class ScenarioError(RuntimeError):
    """Raised when a scenario cannot be constructed as requested."""


@dataclass(frozen=True)
class UniformRecipe:
    """I.i.d. uniform positions on [0, L]^d, fully determined by the seed."""

    n: int
    dimension: int = 1
    domain_length: float = 10.0
    require_connected: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.dimension < 1:
            raise ValueError("dimension must be at least 1")
        if self.domain_length <= 0:
            raise ValueError("domain_length must be positive")


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    params: ModelParams
    record_every: int = 1
    domain_length: float = 10.0
    initial: AgentConfiguration | None = None
    recipe: UniformRecipe | None = None
    phi: InteractionFunction | None = None

    def __post_init__(self):
        if (self.initial is None) == (self.recipe is None):
            raise ValueError("exactly one of initial or recipe must be given")
        if self.record_every < 1:
            raise ValueError("record_every must be at least 1")


@dataclass(frozen=True)
class MonteCarloSpec:
    realizations: int
    scenario: ScenarioSpec
    quantiles: tuple = (0.0, 0.05, 0.5, 0.95, 1.0)
    require_connected_start: bool = True

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError("realizations must be at least 1")
        if list(self.quantiles) != sorted(self.quantiles):
            raise ValueError("quantiles must be sorted")
        if self.scenario.recipe is None and self.realizations > 1:
            raise ValueError("Monte Carlo over a fixed initial configuration "
                             "needs a generator recipe")


@dataclass(frozen=True)
class MonteCarloResult:
    times: np.ndarray
    diameters: np.ndarray          # realizations x times
    quantile_levels: tuple
    quantile_table: np.ndarray     # times x quantile levels
    taus: list                     # stopping time or None per realization
    seeds: list                    # derived per-realization root seeds
    series: list                   # full MetricsSeries per realization


@dataclass(frozen=True)
class SweepRow:
    r_star: float
    realizations: int
    n_censored: int
    tau_mean: float
    tau_median: float
    tau_q05: float
    tau_q95: float
    tau_min: float
    tau_max: float


def scenario_counterexample_rstar1() -> ScenarioSpec:
    """1-D agents at 1, 2, 3, 4 with r* = 1 under the projected dynamics.

    The outer agents converge onto the inner pair, which can never move
    because each keeps its outer neighbor in its critical region.
    """
    return ScenarioSpec(
        name="counterexample-r1",
        params=ModelParams(model=Model.NOLB, r_star=1.0, dt=0.01,
                           t_end=50.0, seed=0),
        record_every=100,
        domain_length=10.0,
        initial=AgentConfiguration([1.0, 2.0, 3.0, 4.0]),
    )


def hexagon_positions(r_star: float = 0.05,
                      jitter: float = CLUSTER_JITTER) -> np.ndarray:
    """Clusters of sizes (1, 10, 100, 100, 10, 1) on a regular hexagon.

    The side length 1 - r*/2 puts every adjacent cluster inside the
    critical band of its neighbors, so the freeze rule locks the whole
    configuration while the projected dynamics keep it moving.
    """
    side = 1.0 - r_star / 2.0
    multiplicities = (1, 10, 100, 100, 10, 1)
    points = []
    for k, mult in enumerate(multiplicities):
        vx = side * np.cos(k * np.pi / 3.0)
        vy = side * np.sin(k * np.pi / 3.0)
        for a in range(mult):
            ang = _GOLDEN_ANGLE * (a + 1)
            points.append((vx + jitter * np.cos(ang), vy + jitter * np.sin(ang)))
    return np.asarray(points)


def scenario_hexagon(r_star: float = 0.05) -> ScenarioSpec:
    if not 0.0 < r_star < 1.0:
        raise ValueError("hexagon scenario needs 0 < r_star < 1")
    return ScenarioSpec(
        name="hexagon",
        params=ModelParams(model=Model.NOLB, r_star=r_star, dt=0.05,
                           t_end=500.0, seed=0),
        record_every=100,
        domain_length=10.0,
        initial=AgentConfiguration(hexagon_positions(r_star)),
    )


def scenario_uniform(n: int, domain_length: float = 10.0, dimension: int = 1,
                     seed: int = 0, require_connected: bool = True,
                     model: Model = Model.NOLB, r_star: float = 0.5,
                     dt: float = 0.01, t_end: float = 200.0,
                     record_every: int = 100) -> ScenarioSpec:
    return ScenarioSpec(
        name="uniform",
        params=ModelParams(model=model, r_star=r_star, dt=dt, t_end=t_end,
                           seed=seed),
        record_every=record_every,
        domain_length=domain_length,
        recipe=UniformRecipe(n=n, dimension=dimension,
                             domain_length=domain_length,
                             require_connected=require_connected),
    )


def build_initial(spec: ScenarioSpec) -> AgentConfiguration:
    """Materialize the initial configuration of a scenario.

    Uniform recipes draw from the initial-conditions substream of the
    scenario seed and, when a connected start is required, redraw until
    the interaction graph is connected (capped)."""
    if spec.initial is not None:
        return spec.initial
    recipe = spec.recipe
    gen = streams.substream(spec.params.seed, streams.INITIAL, 0)
    for _ in range(MAX_CONNECTED_ATTEMPTS):
        positions = gen.uniform(0.0, recipe.domain_length,
                                size=(recipe.n, recipe.dimension))
        if not recipe.require_connected:
            return AgentConfiguration(positions)
        dist, _ = pairwise_distances(positions)
        if connected_from_adjacency(
                adjacency_from_distances(dist, spec.params.geometry_eps)):
            return AgentConfiguration(positions)
    raise ScenarioError(
        f"no connected configuration found in {MAX_CONNECTED_ATTEMPTS} draws "
        f"(n={recipe.n}, L={recipe.domain_length}, d={recipe.dimension}, "
        f"seed={spec.params.seed})")


def run_scenario(spec: ScenarioSpec) -> Trajectory:
    initial = build_initial(spec)
    return simulate(initial, spec.params, record_every=spec.record_every,
                    phi=spec.phi, domain_length=spec.domain_length)


def _realization_spec(spec: MonteCarloSpec, index: int) -> ScenarioSpec:
    derived = streams.realization_seed(spec.scenario.params.seed, index)
    scenario = spec.scenario
    params = replace(scenario.params, seed=derived)
    recipe = scenario.recipe
    if recipe is not None:
        recipe = replace(recipe, require_connected=spec.require_connected_start)
    return replace(scenario, params=params, recipe=recipe)


def _run_realization(args) -> tuple[int, int, MetricsSeries]:
    spec, index = args
    one = _realization_spec(spec, index)
    try:
        trajectory = run_scenario(one)
    except Exception as exc:
        raise RuntimeError(
            f"realization {index} (seed {one.params.seed}) failed: {exc}"
        ) from exc
    return index, one.params.seed, trajectory.metrics


def run_monte_carlo(spec: MonteCarloSpec, jobs: int = 1) -> MonteCarloResult:
    """Run all realizations and aggregate on the shared recording grid.

    Realizations are independent tasks merged by index, so results do
    not depend on execution order or on the number of workers.
    """
    tasks = [(spec, k) for k in range(spec.realizations)]
    if jobs > 1 and spec.realizations > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_realization, tasks))
    else:
        outcomes = [_run_realization(t) for t in tasks]
    outcomes.sort(key=lambda item: item[0])
    seeds = [seed for _, seed, _ in outcomes]
    series = [m for _, _, m in outcomes]
    times = series[0].times
    diameters = np.vstack([m.diameter for m in series])
    levels = tuple(spec.quantiles)
    table = np.quantile(diameters, levels, axis=0).T
    taus = [stopping_time(m) for m in series]
    return MonteCarloResult(times=times, diameters=diameters,
                            quantile_levels=levels, quantile_table=table,
                            taus=taus, seeds=seeds, series=series)


def _tau_stats(r_star: float, result: MonteCarloResult) -> SweepRow:
    finite = np.asarray([t for t in result.taus if t is not None], dtype=float)
    censored = len(result.taus) - finite.size
    if finite.size == 0:
        nan = float("nan")
        return SweepRow(r_star, len(result.taus), censored,
                        nan, nan, nan, nan, nan, nan)
    return SweepRow(
        r_star=r_star, realizations=len(result.taus), n_censored=censored,
        tau_mean=float(finite.mean()),
        tau_median=float(np.median(finite)),
        tau_q05=float(np.quantile(finite, 0.05)),
        tau_q95=float(np.quantile(finite, 0.95)),
        tau_min=float(finite.min()),
        tau_max=float(finite.max()),
    )


def sweep_rstar(base: MonteCarloSpec, r_values, jobs: int = 1) -> list[SweepRow]:
    """Monte Carlo stopping-time statistics for each critical-band radius."""
    rows = []
    for r_star in r_values:
        if not 0.0 < r_star < 1.0:
            raise ValueError("sweep radii must lie strictly inside (0, 1)")
        scenario = replace(base.scenario,
                           params=replace(base.scenario.params, r_star=r_star))
        rows.append(_tau_stats(r_star, run_monte_carlo(
            replace(base, scenario=scenario), jobs=jobs)))
    return rows


def run_interpolation_comparison(seed: int, n: int = 50,
                                 domain_length: float = 10.0,
                                 r_star: float = 0.5, dt: float = 0.01,
                                 t_end: float = 500.0,
                                 record_every: int = 25,
                                 jobs: int = 1) -> dict[str, Trajectory]:
    """One shared initial configuration run under bc, nolb and rnolb."""
    base = scenario_uniform(n=n, domain_length=domain_length, seed=seed,
                            r_star=r_star, dt=dt, t_end=t_end,
                            record_every=record_every)
    initial = build_initial(base)
    out: dict[str, Trajectory] = {}
    for model in (Model.BOUNDED_CONFIDENCE, Model.NOLB, Model.RNOLB):
        params = replace(base.params, model=model)
        out[model.value] = simulate(initial, params,
                                    record_every=record_every,
                                    domain_length=domain_length)
    return out
