import numpy as np
import pytest

from swaysim.generator import (
    GenerationError,
    LfrParams,
    ParameterError,
    assign_weights,
    build_topology,
    generate_lfr,
    sample_community_sizes,
    sample_degree_sequence,
)
from swaysim.graph import network_stats

from conftest import build_graph


def weighted_modularity(g):
    """Newman modularity of the planted partition with edge weights."""
    w = g.edge_w
    tot = w.sum()
    comm = g.communities
    internal = comm[g.edge_u] == comm[g.edge_v]
    q = w[internal].sum() / tot
    strength = g.strengths
    for c in np.unique(comm):
        q -= (strength[comm == c].sum() / (2 * tot)) ** 2
    return q


@pytest.fixture(scope="module")
def default_instance():
    return generate_lfr(LfrParams(n=1000, seed=1))


class TestLfrParams:
    def test_defaults_valid(self):
        LfrParams(n=1000)

    @pytest.mark.parametrize("kwargs", [
        dict(n=100, k_min=10, k_mean=5, k_max=20),
        dict(n=100, k_max=100),
        dict(n=100, c_min=50, c_max=20),
        dict(n=100, mu_topo=1.5),
        dict(n=100, beta=0.0),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ParameterError):
            LfrParams(**kwargs)


class TestDegreeSequence:
    def test_degenerate_window(self):
        p = LfrParams(n=50, k_mean=6, k_min=6, k_max=6, c_min=10, c_max=25)
        degs = sample_degree_sequence(p, np.random.default_rng(0))
        assert np.all(degs == 6)

    def test_mean_hits_target(self):
        p = LfrParams(n=1000)
        pooled = np.concatenate([
            sample_degree_sequence(p, np.random.default_rng(s)) for s in range(10)
        ])
        assert 19 <= pooled.mean() <= 21

    def test_bounds_and_parity(self):
        p = LfrParams(n=500)
        for s in range(5):
            degs = sample_degree_sequence(p, np.random.default_rng(s))
            assert degs.min() >= p.k_min and degs.max() <= p.k_max
            assert degs.sum() % 2 == 0

    def test_infeasible_mean(self):
        with pytest.raises(ParameterError):
            p = LfrParams(n=300, k_mean=101, k_min=100, k_max=200, tau_degree=5.0)
            sample_degree_sequence(p, np.random.default_rng(0))


class TestCommunitySizes:
    def test_exact_split(self):
        p = LfrParams(n=40, k_mean=6, k_min=3, k_max=12, c_min=20, c_max=20)
        assert sample_community_sizes(p, np.random.default_rng(0)) == [20, 20]

    def test_bounds_and_total(self):
        p = LfrParams(n=1000)
        for s in range(10):
            sizes = sample_community_sizes(p, np.random.default_rng(s))
            assert sum(sizes) == 1000
            assert all(20 <= c <= 50 for c in sizes)
            assert 20 <= len(sizes) <= 50  # pigeonhole on bounds

    def test_too_small(self):
        with pytest.raises(ParameterError):
            p = LfrParams(n=10, k_mean=3, k_min=2, k_max=8, c_min=20, c_max=30)
            sample_community_sizes(p, np.random.default_rng(0))


class TestBuildTopology:
    def test_single_community_all_internal(self):
        rng = np.random.default_rng(3)
        degrees = np.full(30, 6)
        g = build_topology(degrees, [30], mu_topo=0.0, rng=rng)
        assert g.edge_count == 90
        assert np.array_equal(g.degrees, degrees)
        assert np.all(g.communities == 0)

    def test_two_communities_mixing(self):
        rng = np.random.default_rng(5)
        fracs = []
        for s in range(5):
            rng = np.random.default_rng(s)
            g = build_topology(np.full(40, 6), [20, 20], mu_topo=0.1, rng=rng)
            comm = g.communities
            external = comm[g.edge_u] != comm[g.edge_v]
            k_ext = (np.bincount(g.edge_u[external], minlength=40)
                     + np.bincount(g.edge_v[external], minlength=40))
            fracs.append(float(np.mean(k_ext / g.degrees)))
        assert abs(np.mean(fracs) - 0.1) <= 0.05

    def test_degrees_preserved_at_scale(self):
        rng = np.random.default_rng(7)
        p = LfrParams(n=1000, seed=7)
        degrees = sample_degree_sequence(p, rng)
        sizes = sample_community_sizes(p, rng)
        g = build_topology(degrees, sizes, p.mu_topo, rng)
        assert np.array_equal(np.sort(g.degrees), np.sort(degrees))

    def test_odd_degree_sum_rejected(self):
        with pytest.raises(ParameterError):
            build_topology(np.array([3, 2, 2]), [3], 0.0, np.random.default_rng(0))

    def test_modularity_of_planted_partition(self, default_instance):
        assert weighted_modularity(default_instance) > 0.6


class TestAssignWeights:
    def test_regular_single_community_exact_units(self):
        rng = np.random.default_rng(11)
        g = build_topology(np.full(30, 6), [30], mu_topo=0.0, rng=rng)
        g = assign_weights(g, beta=1.0, mu_w=0.0, dispersion=0.0)
        assert np.allclose(g.edge_w, 1.0)

    def test_strength_law_slope(self, default_instance):
        g = default_instance
        logk = np.log(g.degrees.astype(float))
        logs = np.log(g.strengths)
        slope = np.polyfit(logk, logs, 1)[0]
        assert abs(slope - 1.5) <= 0.15

    def test_internal_strength_fraction(self, default_instance):
        g = default_instance
        comm = g.communities
        internal = comm[g.edge_u] == comm[g.edge_v]
        s_in = (np.bincount(g.edge_u, weights=g.edge_w * internal, minlength=g.node_count)
                + np.bincount(g.edge_v, weights=g.edge_w * internal, minlength=g.node_count))
        assert abs(np.mean(s_in / g.strengths) - 0.9) <= 0.05

    def test_median_strength_error(self, default_instance):
        g = default_instance
        target = g.degrees.astype(float) ** 1.5
        assert np.median(np.abs(g.strengths - target) / target) <= 0.1

    def test_external_target_folds_when_no_external_edges(self, caplog):
        # one community is fully internal; mu_w > 0 must fold, not crash
        rng = np.random.default_rng(13)
        g = build_topology(np.full(20, 4), [20], mu_topo=0.0, rng=rng)
        weighted = assign_weights(g, beta=1.2, mu_w=0.1, dispersion=0.0)
        target = g.degrees.astype(float) ** 1.2
        assert np.median(np.abs(weighted.strengths - target) / target) <= 0.1

    def test_requires_communities(self, p3):
        with pytest.raises(ValueError):
            assign_weights(p3, 1.5, 0.1)


class TestGenerateLfr:
    def test_deterministic(self):
        p = LfrParams(n=300, k_mean=8, k_min=4, k_max=60, c_min=20, c_max=40,
                      tau_degree=3.0, seed=5)
        a = generate_lfr(p)
        b = generate_lfr(p)
        assert a.same_structure(b)
        assert np.array_equal(a.communities, b.communities)

    def test_invariants_across_seeds(self):
        for s in range(20):
            p = LfrParams(n=120, k_mean=6, k_min=3, k_max=30, c_min=20, c_max=40,
                          tau_degree=3.0, seed=s)
            g = generate_lfr(p)  # WeightedGraph.build validates everything
            assert g.node_count == 120
            assert np.all(g.edge_w > 0)
            assert g.communities is not None

    def test_default_envelope(self, default_instance):
        st = network_stats(default_instance)
        assert 18 <= st.k_mean <= 23
        assert -0.85 <= st.assortativity <= -0.5
        assert 0.15 <= st.clustering <= 0.30
        assert st.k_min >= 6
        assert st.k_max <= 200

    @pytest.mark.slow
    def test_n2000_mean_degree(self):
        g = generate_lfr(LfrParams(n=2000, seed=3))
        assert 19 <= network_stats(g).k_mean <= 22
