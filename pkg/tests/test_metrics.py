import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swaysim.metrics import (
    count_clusters,
    density_matrix,
    fraction_near,
    histogram,
    mean_opinion,
    summarize,
)


class TestMeanOpinion:
    def test_constant(self):
        assert mean_opinion([0.5] * 10) == 0.5

    def test_extremes(self):
        assert mean_opinion([0.0, 1.0]) == 0.5

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            mean_opinion([])


class TestFractionNear:
    def test_all_at_target(self):
        assert fraction_near([1.0] * 5, 1.0) == 1.0

    def test_strict_inequality(self):
        # 0.96 qualifies (distance 0.04 < 0.05); 0.95 does not (0.05 is not < 0.05)
        assert fraction_near([0.0, 0.96, 1.0], 1.0) == pytest.approx(2 / 3)
        assert fraction_near([0.95], 1.0) == 0.0

    def test_tol_positive(self):
        with pytest.raises(ValueError):
            fraction_near([0.5], 0.5, tol=0.0)


class TestHistogram:
    def test_boundary_convention(self):
        # edges [0, 0.5), [0.5, 1]: 0.5 lands in the upper bin
        assert histogram([0.5] * 7, bins=2).tolist() == [0, 7]

    def test_uniform_roughly_flat(self):
        rng = np.random.default_rng(0)
        counts = histogram(rng.random(50000), bins=50)
        assert counts.sum() == 50000
        assert counts.min() > 800 and counts.max() < 1200

    def test_last_bin_right_closed(self):
        assert histogram([1.0], bins=50)[-1] == 1

    def test_bins_validated(self):
        with pytest.raises(ValueError):
            histogram([0.5], bins=0)


class TestCountClusters:
    def test_single(self):
        assert count_clusters([0.42] * 100) == 1

    def test_two_blocks(self):
        opinions = [0.0] * 500 + [1.0] * 500
        assert count_clusters(opinions) == 2

    def test_small_clusters_not_main(self):
        opinions = [0.1] * 600 + [0.5] * 395 + [0.9] * 5
        assert count_clusters(opinions) == 2

    def test_gap_rule_strict(self):
        # gap exactly 0.05 does not split
        assert count_clusters([0.4, 0.45]) == 1
        assert count_clusters([0.4, 0.4501]) == 2

    def test_permutation_invariant(self):
        rng = np.random.default_rng(1)
        x = rng.random(200)
        shuffled = x.copy()
        rng.shuffle(shuffled)
        assert count_clusters(x) == count_clusters(shuffled)


class TestDensityMatrix:
    def test_single_snapshot_all_middle(self):
        dm = density_matrix([[0.5] * 20], bins=50)
        assert dm.shape == (1, 50)
        assert dm[0, 25] == 1.0

    def test_rows_are_probability_vectors(self):
        rng = np.random.default_rng(2)
        snaps = rng.random((7, 40))
        dm = density_matrix(snaps, bins=10)
        assert np.allclose(dm.sum(axis=1), 1.0, atol=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            density_matrix(np.empty((0, 5)))


def test_summarize_bundle():
    s = summarize([0.0] * 50 + [1.0] * 50, target=1.0)
    assert s.mean == 0.5
    assert s.fraction_near_target == 0.5
    assert s.cluster_count == 2
    assert s.histogram.sum() == 100


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(min_value=0, max_value=1), min_size=1, max_size=60),
       st.floats(min_value=0.01, max_value=0.3), st.floats(min_value=0.01, max_value=0.3))
def test_fraction_near_monotone_in_tol(xs, tol_a, tol_b):
    lo, hi = sorted((tol_a, tol_b))
    assert fraction_near(xs, 1.0, lo) <= fraction_near(xs, 1.0, hi)
