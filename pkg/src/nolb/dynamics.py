"""Opinion dynamics: interaction weights, critical regions, steppers.

Agents move toward the weighted average of everyone within unit distance.
Three controls modify that motion to preserve connectivity: a freeze rule
(an agent with anyone in its critical region stops), projection of the
desired velocity onto the cone spanned by behind-neighbors, and the same
projection against a relaxed behind graph recomputed each step under a
random owner order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import rng as streams
from .geometry import (
    DEFAULT_GEOMETRY_EPS,
    DEFAULT_PROJECTION_TOL,
    project_vector,
)
from .graphs import (
    TINY_NORM,
    adjacency_from_distances,
    behind_mask,
    connected_from_adjacency,
    pairwise_distances,
    relax_mask,
)
from .metrics import MetricsSeries

# A guarded step may be halved at most this many times before acceptance.
MAX_HALVINGS = 20


class NumericalError(RuntimeError):
    """Raised when a simulation produces non-finite coordinates."""


class Model(str, Enum):
    BOUNDED_CONFIDENCE = "bc"
    NOLB_FREEZE = "nolb-freeze"
    NOLB = "nolb"
    RNOLB = "rnolb"


@dataclass(frozen=True, eq=False)
class AgentConfiguration:
    """N opinion vectors in R^d at one instant."""

    positions: np.ndarray

    def __init__(self, positions):
        arr = np.asarray(positions, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("positions must be an N x d array with N, d >= 1")
        if not np.isfinite(arr).all():
            raise ValueError("positions must be finite")
        object.__setattr__(self, "positions", arr.copy())

    def __eq__(self, other):
        if not isinstance(other, AgentConfiguration):
            return NotImplemented
        return np.array_equal(self.positions, other.positions)

    @property
    def n_agents(self) -> int:
        return self.positions.shape[0]

    @property
    def dimension(self) -> int:
        return self.positions.shape[1]


@dataclass(frozen=True, eq=False)
class InteractionFunction:
    """Piecewise-constant interaction weight with compact support on [0, 1].

    values[k] applies on [breakpoints[k], breakpoints[k+1]); the final
    interval is closed at 1.  Beyond distance 1 the weight is zero.  The
    extrema m and M are taken over the support.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    m: float
    M: float

    def __eq__(self, other):
        if not isinstance(other, InteractionFunction):
            return NotImplemented
        return (np.array_equal(self.breakpoints, other.breakpoints)
                and np.array_equal(self.values, other.values))

    @classmethod
    def piecewise_constant(cls, breakpoints, values) -> "InteractionFunction":
        bp = np.asarray(breakpoints, dtype=float)
        vals = np.asarray(values, dtype=float)
        if bp.ndim != 1 or vals.ndim != 1 or len(bp) != len(vals) + 1:
            raise ValueError("need K+1 breakpoints for K values")
        if bp[0] != 0.0 or bp[-1] != 1.0 or (np.diff(bp) <= 0).any():
            raise ValueError("breakpoints must increase from 0 to 1")
        if (vals <= 0).any():
            raise ValueError("interaction weights must be positive on the support")
        return cls(breakpoints=bp, values=vals,
                   m=float(vals.min()), M=float(vals.max()))

    @classmethod
    def indicator(cls) -> "InteractionFunction":
        """Weight 1 on [0, 1], 0 beyond: the prototypical choice."""
        return cls.piecewise_constant([0.0, 1.0], [1.0])

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        if len(self.values) == 1:
            return np.where(r <= 1.0, self.values[0], 0.0)
        idx = np.searchsorted(self.breakpoints, r, side="right") - 1
        idx = np.clip(idx, 0, len(self.values) - 1)
        return np.where(r <= 1.0, self.values[idx], 0.0)


@dataclass(frozen=True)
class ModelParams:
    model: Model
    r_star: float = 0.5
    dt: float = 0.01
    t_end: float = 100.0
    seed: int = 0
    projection_tol: float = DEFAULT_PROJECTION_TOL
    geometry_eps: float = DEFAULT_GEOMETRY_EPS

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if not 0.0 <= self.r_star <= 1.0:
            raise ValueError("r_star must lie in [0, 1]")
        if not 0.0 < self.dt <= 0.1:
            raise ValueError("dt must lie in (0, 0.1]")
        if self.t_end < 0.0:
            raise ValueError("t_end must be nonnegative")
        if self.projection_tol <= 0 or self.geometry_eps <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class WeightMatrix:
    """Row-stochastic influence weights; support is symmetric and the
    diagonal is positive because every agent interacts with itself."""

    entries: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    """Recorded snapshots of one run plus per-snapshot metrics."""

    times: np.ndarray
    positions: list
    metrics: MetricsSeries
    params: ModelParams
    record_every: int
    domain_length: float

    @property
    def final(self) -> AgentConfiguration:
        return AgentConfiguration(self.positions[-1])


def _weights_raw(dist: np.ndarray, phi: InteractionFunction) -> np.ndarray:
    raw = phi.evaluate(dist)
    return raw / raw.sum(axis=1)[:, None]


def interaction_weights(config: AgentConfiguration,
                        phi: InteractionFunction) -> WeightMatrix:
    """Influence of j on i: phi(|x_j - x_i|), normalized over each row.

    The self-term keeps every row sum positive, so the matrix is always
    defined.
    """
    dist, _ = pairwise_distances(config.positions)
    return WeightMatrix(entries=_weights_raw(dist, phi))


def local_average(config: AgentConfiguration, w: WeightMatrix) -> np.ndarray:
    """Weighted average opinion seen by each agent (N x d)."""
    return w.entries @ config.positions


def critical_region_members(i: int, config: AgentConfiguration,
                            averages: np.ndarray, r_star: float,
                            geometry_eps: float = DEFAULT_GEOMETRY_EPS) -> set:
    """Agents j in the critical region of agent i.

    Scalar reference implementation of the same membership rule the
    vectorized behind mask applies; kept independent for cross-checking.
    """
    positions = config.positions
    xi = positions[i]
    w = np.asarray(averages, dtype=float)[i] - xi
    members = set()
    for j in range(config.n_agents):
        if j == i:
            continue
        offset = positions[j] - xi
        d = float(np.linalg.norm(offset))
        if d < 1.0 - r_star - geometry_eps or d > 1.0 + geometry_eps:
            continue
        if float(w @ offset) <= 0.0:
            members.add(j)
    return members


def _project_velocities(desired: np.ndarray, diffs: np.ndarray,
                        mask: np.ndarray, projection_tol: float) -> np.ndarray:
    """Per-agent projection of desired velocities onto behind cones."""
    d = desired.shape[1]
    if d == 1:
        sd = diffs[:, :, 0]
        has_pos = (mask & (sd > TINY_NORM)).any(axis=1)
        has_neg = (mask & (sd < -TINY_NORM)).any(axis=1)
        v = desired[:, 0]
        out = np.where(has_pos & has_neg, 0.0,
                       np.where(has_pos, np.maximum(v, 0.0),
                                np.where(has_neg, np.minimum(v, 0.0), v)))
        return out[:, None]
    vel = desired.copy()
    for i in np.nonzero(mask.any(axis=1))[0]:
        u = diffs[i][mask[i]]
        norms = np.linalg.norm(u, axis=1)
        u = u[norms > TINY_NORM]
        if u.shape[0]:
            vel[i] = project_vector(desired[i], u, tol=projection_tol)
    return vel


def _model_velocities(positions: np.ndarray, dist: np.ndarray,
                      diffs: np.ndarray, phi: InteractionFunction,
                      model: Model, r_star: float, projection_tol: float,
                      geometry_eps: float,
                      permutation: np.ndarray | None = None) -> np.ndarray:
    weights = _weights_raw(dist, phi)
    desired = weights @ positions - positions
    if model is Model.BOUNDED_CONFIDENCE:
        return desired
    mask = behind_mask(dist, diffs, desired, r_star, geometry_eps)
    if model is Model.NOLB_FREEZE:
        vel = desired.copy()
        vel[mask.any(axis=1)] = 0.0
        return vel
    if model is Model.RNOLB:
        if permutation is None:
            raise ValueError("relaxed dynamics need an owner permutation")
        adj = adjacency_from_distances(dist, geometry_eps)
        mask = relax_mask(adj, mask, permutation)
    return _project_velocities(desired, diffs, mask, projection_tol)


def _step_positions(positions, phi, model, r_star, dt, projection_tol,
                    geometry_eps, permutation=None) -> np.ndarray:
    if dt <= 0:
        raise ValueError("dt must be positive")
    dist, diffs = pairwise_distances(positions)
    vel = _model_velocities(positions, dist, diffs, phi, model, r_star,
                            projection_tol, geometry_eps, permutation)
    return positions + dt * vel


def step_bounded_confidence(config: AgentConfiguration,
                            phi: InteractionFunction,
                            dt: float) -> AgentConfiguration:
    """One forward-Euler step of the uncontrolled dynamics."""
    return AgentConfiguration(_step_positions(
        config.positions, phi, Model.BOUNDED_CONFIDENCE, 0.0, dt,
        DEFAULT_PROJECTION_TOL, DEFAULT_GEOMETRY_EPS))


def step_nolb_freeze(config: AgentConfiguration, phi: InteractionFunction,
                     r_star: float, dt: float,
                     geometry_eps: float = DEFAULT_GEOMETRY_EPS) -> AgentConfiguration:
    """Freeze rule: an agent with anyone in its critical region stops.

    Stated in one dimension, applied verbatim in any dimension; above 1-D
    it serves as a demonstration (it can lock configurations in place).
    """
    return AgentConfiguration(_step_positions(
        config.positions, phi, Model.NOLB_FREEZE, r_star, dt,
        DEFAULT_PROJECTION_TOL, geometry_eps))


def step_nolb(config: AgentConfiguration, phi: InteractionFunction,
              r_star: float, dt: float,
              projection_tol: float = DEFAULT_PROJECTION_TOL,
              geometry_eps: float = DEFAULT_GEOMETRY_EPS) -> AgentConfiguration:
    """Projection rule: velocities stay compatible with behind-neighbors."""
    return AgentConfiguration(_step_positions(
        config.positions, phi, Model.NOLB, r_star, dt,
        projection_tol, geometry_eps))


def step_rnolb(config: AgentConfiguration, phi: InteractionFunction,
               r_star: float, dt: float, rng: np.random.Generator,
               projection_tol: float = DEFAULT_PROJECTION_TOL,
               geometry_eps: float = DEFAULT_GEOMETRY_EPS) -> AgentConfiguration:
    """Projection against a relaxed behind graph under a fresh random order."""
    permutation = rng.permutation(config.n_agents)
    return AgentConfiguration(_step_positions(
        config.positions, phi, Model.RNOLB, r_star, dt,
        projection_tol, geometry_eps, permutation))


def _guard_violated(model: Model, dist: np.ndarray, cand_dist: np.ndarray,
                    was_connected: bool, geometry_eps: float) -> bool:
    """Whether a candidate step breaks the connectivity the model promises.

    The projected dynamics keep interacting pairs within unit distance in
    continuous time; a discrete step can overshoot by O(dt^2), so steps
    that would push a currently-interacting pair beyond 1 are rejected
    and retried at half size.  The relaxed dynamics promise only global
    connectivity, so only that is enforced.
    """
    thr = 1.0 + geometry_eps
    if model is Model.NOLB:
        return bool(((dist <= thr) & (cand_dist > thr)).any())
    if model is Model.RNOLB:
        if not was_connected:
            return False
        return not connected_from_adjacency(adjacency_from_distances(cand_dist, geometry_eps))
    return False


def _record_metrics(positions, dist, domain_length, geometry_eps, out):
    n = positions.shape[0]
    radius = domain_length / n
    counts = (dist <= radius).sum(axis=1)
    centered = positions - positions.mean(axis=0)
    out["diameter"].append(float(dist.max(initial=0.0)))
    out["variance"].append(float(np.einsum("ij,ij->", centered, centered) / n))
    out["clustering_number"].append(float((counts - 1).mean()))
    out["clustering_number_self_inclusive"].append(float(counts.mean()))
    out["connected"].append(connected_from_adjacency(
        adjacency_from_distances(dist, geometry_eps)))


def simulate(initial: AgentConfiguration, params: ModelParams,
             record_every: int = 1, phi: InteractionFunction | None = None,
             domain_length: float = 10.0) -> Trajectory:
    """Run one trajectory on the grid t_k = k * dt, recording every
    record_every steps plus the final state.

    Deterministic given (initial, params): the relaxed dynamics draw
    their per-step owner permutations from the step-permutation
    substream of params.seed.  Each nominal step advances positions by
    (1 - exp(-h)) * v over substeps h that sum to dt; the factor
    integrates the relaxation toward the local average exactly on
    configurations where that attraction is the whole dynamics, and the
    connectivity guard halves h (at most MAX_HALVINGS times) when a
    substep would break a promised connection.  Aborts if coordinates
    become non-finite.
    """
    if record_every < 1:
        raise ValueError("record_every must be at least 1")
    if phi is None:
        phi = InteractionFunction.indicator()
    model = params.model
    positions = initial.positions.copy()
    n = positions.shape[0]
    perm_rng = (streams.substream(params.seed, streams.PERMUTATION, 0)
                if model is Model.RNOLB else None)
    n_steps = int(round(params.t_end / params.dt)) if params.t_end > 0 else 0
    min_h = params.dt / 2 ** MAX_HALVINGS

    dist, diffs = pairwise_distances(positions)
    times = [0.0]
    snapshots = [positions.copy()]
    series: dict[str, list] = {k: [] for k in (
        "diameter", "variance", "clustering_number",
        "clustering_number_self_inclusive", "connected")}
    _record_metrics(positions, dist, domain_length, params.geometry_eps, series)

    for k in range(1, n_steps + 1):
        remaining = params.dt
        while remaining > 0.0:
            permutation = perm_rng.permutation(n) if perm_rng is not None else None
            vel = _model_velocities(positions, dist, diffs, phi, model,
                                    params.r_star, params.projection_tol,
                                    params.geometry_eps, permutation)
            was_connected = (connected_from_adjacency(
                adjacency_from_distances(dist, params.geometry_eps))
                if model is Model.RNOLB else True)
            if not np.isfinite(vel).all():
                raise NumericalError(
                    f"non-finite velocities at t={k * params.dt:.6g}")
            h = remaining
            while True:
                candidate = positions + (-math.expm1(-h)) * vel
                cand_dist, cand_diffs = pairwise_distances(candidate)
                if (h <= min_h or not _guard_violated(
                        model, dist, cand_dist, was_connected,
                        params.geometry_eps)):
                    break
                h *= 0.5
            if not np.isfinite(candidate).all():
                raise NumericalError(
                    f"non-finite coordinates at t={k * params.dt:.6g}")
            positions, dist, diffs = candidate, cand_dist, cand_diffs
            remaining -= h
        if k % record_every == 0 or k == n_steps:
            times.append(k * params.dt)
            snapshots.append(positions.copy())
            _record_metrics(positions, dist, domain_length,
                            params.geometry_eps, series)

    metrics = MetricsSeries(
        times=np.asarray(times),
        diameter=np.asarray(series["diameter"]),
        variance=np.asarray(series["variance"]),
        clustering_number=np.asarray(series["clustering_number"]),
        clustering_number_self_inclusive=np.asarray(
            series["clustering_number_self_inclusive"]),
        connected=np.asarray(series["connected"], dtype=bool),
    )
    return Trajectory(times=np.asarray(times), positions=snapshots,
                      metrics=metrics, params=params,
                      record_every=record_every, domain_length=domain_length)
