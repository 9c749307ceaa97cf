"""Scalar observables of configurations and recorded series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import pairwise_distances


def _positions_of(config) -> np.ndarray:
    pos = getattr(config, "positions", config)
    return np.asarray(pos, dtype=float)


@dataclass(frozen=True)
class MetricsSeries:
    """Per-recording-time observables of one trajectory."""

    times: np.ndarray
    diameter: np.ndarray
    variance: np.ndarray
    clustering_number: np.ndarray
    clustering_number_self_inclusive: np.ndarray
    connected: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        for name in ("diameter", "variance", "clustering_number",
                     "clustering_number_self_inclusive", "connected"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length does not match times")
        if n > 1 and not (np.diff(self.times) > 0).all():
            raise ValueError("times must be strictly increasing")


def diameter(config) -> float:
    """Maximum pairwise Euclidean distance (0 for a single agent)."""
    positions = _positions_of(config)
    dist, _ = pairwise_distances(positions)
    return float(dist.max(initial=0.0))


def variance(config) -> float:
    """Mean squared distance from the configuration centroid."""
    positions = _positions_of(config)
    centered = positions - positions.mean(axis=0)
    return float(np.einsum("ij,ij->", centered, centered) / positions.shape[0])


def clustering_number(config, domain_length: float,
                      include_self: bool = False) -> float:
    """Mean number of agents within R = L/N of an agent.

    Self is excluded by default, so the value ranges over [0, N-1] and
    attains N-1 at consensus; include_self=True shifts the count by one
    (maximum N).  L is a scenario parameter, not inferred from the data.
    """
    if domain_length <= 0:
        raise ValueError("domain_length must be positive")
    positions = _positions_of(config)
    n = positions.shape[0]
    radius = domain_length / n
    dist, _ = pairwise_distances(positions)
    counts = (dist <= radius).sum(axis=1)
    if not include_self:
        counts = counts - 1
    return float(counts.mean())


def consensus_reached(config, tol: float) -> bool:
    """True iff the configuration diameter is at most tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return diameter(config) <= tol


def stopping_time(series: MetricsSeries) -> float | None:
    """First recorded time with diameter <= 1, or None if never reached."""
    hits = np.nonzero(np.asarray(series.diameter) <= 1.0)[0]
    if hits.size == 0:
        return None
    return float(series.times[hits[0]])
