"""Configuration and series observables."""

import numpy as np
import pytest

from nolb.dynamics import AgentConfiguration
from nolb.metrics import (
    MetricsSeries,
    clustering_number,
    consensus_reached,
    diameter,
    stopping_time,
    variance,
)


def series(times, diameters):
    n = len(times)
    zeros = np.zeros(n)
    return MetricsSeries(times=np.asarray(times, dtype=float),
                         diameter=np.asarray(diameters, dtype=float),
                         variance=zeros, clustering_number=zeros,
                         clustering_number_self_inclusive=zeros,
                         connected=np.ones(n, dtype=bool))


class TestDiameter:
    def test_single_agent(self):
        assert diameter(AgentConfiguration([[3.0]])) == 0.0

    def test_pair(self):
        assert diameter(AgentConfiguration([0.0, 3.0])) == 3.0

    def test_unit_square(self):
        cfg = AgentConfiguration([(0, 0), (1, 0), (0, 1), (1, 1)])
        assert diameter(cfg) == pytest.approx(np.sqrt(2))

    def test_rigid_motion_invariance(self, rng):
        pts = rng.normal(size=(8, 2))
        theta = 0.7
        rot = np.array([[np.cos(theta), -np.sin(theta)],
                        [np.sin(theta), np.cos(theta)]])
        moved = pts @ rot.T + np.array([5.0, -2.0])
        assert diameter(AgentConfiguration(moved)) == pytest.approx(
            diameter(AgentConfiguration(pts)))


class TestVariance:
    def test_coincident(self):
        assert variance(AgentConfiguration([[1.0], [1.0]])) == 0.0

    def test_symmetric_pair(self):
        assert variance(AgentConfiguration([-1.0, 1.0])) == 1.0

    def test_translation_invariance(self, rng):
        pts = rng.normal(size=(6, 3))
        shifted = pts + np.array([2.0, -7.0, 0.5])
        assert variance(AgentConfiguration(shifted)) == pytest.approx(
            variance(AgentConfiguration(pts)))


class TestClusteringNumber:
    def test_consensus_attains_maximum(self):
        n = 7
        cfg = AgentConfiguration(np.zeros((n, 1)))
        assert clustering_number(cfg, 10.0) == n - 1
        assert clustering_number(cfg, 10.0, include_self=True) == n

    def test_uniform_spacing_close_to_two(self):
        n, length = 20, 10.0
        # interior placement: spacing L/(N+1) < R = L/N
        pos = np.arange(1, n + 1) * length / (n + 1)
        cfg = AgentConfiguration(pos)
        value = clustering_number(cfg, length)
        assert value == pytest.approx(2.0 - 2.0 / n)

    def test_far_pair_is_zero(self):
        cfg = AgentConfiguration([0.0, 9.0])
        assert clustering_number(cfg, 10.0) == 0.0

    def test_translation_invariance(self, rng):
        pts = rng.uniform(0, 10, size=(12, 1))
        assert clustering_number(AgentConfiguration(pts + 3.0), 10.0) == \
            pytest.approx(clustering_number(AgentConfiguration(pts), 10.0))

    def test_bounds(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 15))
            cfg = AgentConfiguration(rng.uniform(0, 10, size=(n, 1)))
            value = clustering_number(cfg, 10.0)
            assert 0.0 <= value <= n - 1

    def test_rejects_bad_domain(self):
        with pytest.raises(ValueError):
            clustering_number(AgentConfiguration([0.0]), 0.0)


class TestConsensusReached:
    def test_single_agent(self):
        assert consensus_reached(AgentConfiguration([[4.0]]), 1e-3)

    def test_wide_pair(self):
        assert not consensus_reached(AgentConfiguration([0.0, 0.5]), 1e-3)

    def test_tight_cluster(self):
        cfg = AgentConfiguration([0.0, 5e-5, 1e-4])
        assert consensus_reached(cfg, 1e-3)


class TestStoppingTime:
    def test_immediately_small(self):
        assert stopping_time(series([0.0, 1.0], [0.5, 0.4])) == 0.0

    def test_never_reached(self):
        assert stopping_time(series([0.0, 1.0], [3.0, 2.0])) is None

    def test_first_crossing(self):
        assert stopping_time(series([0.0, 1.0, 2.0], [3.0, 2.0, 0.9])) == 2.0


class TestMetricsSeries:
    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            MetricsSeries(times=np.array([0.0, 1.0]),
                          diameter=np.array([1.0]),
                          variance=np.zeros(2),
                          clustering_number=np.zeros(2),
                          clustering_number_self_inclusive=np.zeros(2),
                          connected=np.ones(2, dtype=bool))

    def test_times_must_increase(self):
        with pytest.raises(ValueError):
            series([0.0, 0.0], [1.0, 1.0])
