import numpy as np
import pytest

from cosine_audit.errors import ConfigError
from cosine_audit.synthgen import (GroundTruth, SimConfig, figure_item_order,
                                   ground_truth_similarity,
                                   sample_ground_truth, sample_interactions,
                                   user_item_probabilities)


def cfg(**kw):
    defaults = dict(n=50, p=40, C=3, cluster_probs=(0.5, 0.3, 0.2), seed=99)
    defaults.update(kw)
    return SimConfig(**defaults)


class TestSimConfig:
    def test_bad_cluster_probs(self):
        with pytest.raises(ConfigError):
            cfg(cluster_probs=(0.5, 0.3, 0.3))
        with pytest.raises(ConfigError):
            cfg(cluster_probs=(0.5, 0.5))

    def test_bad_counts(self):
        with pytest.raises(ConfigError):
            cfg(n=0)
        with pytest.raises(ConfigError):
            SimConfig(n=5, p=5, C=0, cluster_probs=())

    def test_beta_range(self):
        with pytest.raises(ConfigError):
            cfg(beta_item_min=2.0, beta_item_max=1.0)

    def test_json_round_trip(self, tmp_path):
        c = cfg()
        path = tmp_path / "sim.json"
        import json
        path.write_text(json.dumps(c.to_dict()))
        assert SimConfig.from_json(path) == c

    def test_missing_key(self, tmp_path):
        path = tmp_path / "sim.json"
        path.write_text('{"n": 5}')
        with pytest.raises(ConfigError):
            SimConfig.from_json(path)


class TestGroundTruth:
    def test_single_cluster(self):
        gt = sample_ground_truth(cfg(C=1, cluster_probs=(1.0,)))
        assert np.all(gt.item_cluster == 0)

    def test_degenerate_probs(self):
        gt = sample_ground_truth(cfg(C=5, cluster_probs=(1, 0, 0, 0, 0)))
        assert np.all(gt.item_cluster == 0)

    def test_cluster_frequencies_binomial_bound(self):
        p = 10_000
        C = 5
        gt = sample_ground_truth(cfg(p=p, C=C, cluster_probs=(0.2,) * 5))
        # 3 binomial standard deviations around 0.2
        sd = np.sqrt(0.2 * 0.8 / p)
        freqs = np.bincount(gt.item_cluster, minlength=C) / p
        assert np.all(np.abs(freqs - 0.2) <= 3 * sd)

    def test_exponents_in_range(self):
        gt = sample_ground_truth(cfg())
        assert np.all(gt.cluster_exponents >= 0.25)
        assert np.all(gt.cluster_exponents <= 1.5)

    def test_popularity_positive_rank_decay(self):
        gt = sample_ground_truth(cfg())
        assert np.all(gt.item_popularity > 0)
        # within each cluster, popularity decays in generation order
        for c in range(3):
            pops = gt.item_popularity[gt.item_cluster == c]
            assert np.all(np.diff(pops) <= 0)

    def test_prefs_simplex(self):
        gt = sample_ground_truth(cfg())
        assert np.allclose(gt.user_prefs.sum(axis=1), 1.0, atol=1e-9)
        assert np.all(gt.user_prefs >= 0)


class TestUserItemProbabilities:
    def test_single_cluster_proportional_to_popularity(self):
        gt = sample_ground_truth(cfg(C=1, cluster_probs=(1.0,)))
        pr = user_item_probabilities(gt, 0)
        expected = gt.item_popularity / gt.item_popularity.sum()
        assert np.allclose(pr, expected, atol=1e-12)

    def test_indicator_prefs_mass_on_one_cluster(self):
        gt = sample_ground_truth(cfg())
        prefs = np.zeros_like(gt.user_prefs)
        prefs[:, 1] = 1.0
        gt2 = GroundTruth(gt.item_cluster, gt.item_popularity,
                          gt.cluster_exponents, prefs)
        pr = user_item_probabilities(gt2, 0)
        assert np.all(pr[gt.item_cluster != 1] == 0)
        assert pr.sum() == pytest.approx(1.0, abs=1e-12)

    def test_matches_direct_formula(self):
        gt = sample_ground_truth(cfg())
        for u in (0, 7, 49):
            pr = user_item_probabilities(gt, u)
            w = np.array([gt.user_prefs[u, gt.item_cluster[i]]
                          * gt.item_popularity[i] for i in range(40)])
            assert np.allclose(pr, w / w.sum(), atol=1e-12)
            assert pr.sum() == pytest.approx(1.0, abs=1e-12)

    def test_user_out_of_range(self):
        gt = sample_ground_truth(cfg())
        with pytest.raises(IndexError):
            user_item_probabilities(gt, 50)


class TestInteractions:
    def test_binary_without_replacement(self):
        sample, _ = sample_interactions(cfg())
        m = sample.matrix
        assert set(np.unique(m)) <= {0.0, 1.0}
        assert np.array_equal(m.sum(axis=1), sample.items_per_user)
        assert np.all(sample.items_per_user >= 1)

    def test_activity_bounds(self):
        c = cfg()
        sample, _ = sample_interactions(c)
        assert np.all(sample.items_per_user >= min(5, c.p))
        assert np.all(sample.items_per_user <= c.p // 2)

    def test_seed_determinism(self):
        s1, g1 = sample_interactions(cfg())
        s2, g2 = sample_interactions(cfg())
        assert np.array_equal(s1.matrix, s2.matrix)
        assert np.array_equal(g1.user_prefs, g2.user_prefs)
        s3, _ = sample_interactions(cfg(seed=100))
        assert not np.array_equal(s1.matrix, s3.matrix)

    def test_popularity_monotone_in_expectation(self):
        # more popular items collect more interactions: Spearman correlation
        # between popularity and interaction count is positive at 3 sigma
        # (null standard error ~ 1/sqrt(p-1))
        c = cfg(n=4000, p=30, C=1, cluster_probs=(1.0,), seed=5)
        sample, gt = sample_interactions(c)
        counts = sample.matrix.sum(axis=0)
        r_pop = np.argsort(np.argsort(gt.item_popularity))
        r_cnt = np.argsort(np.argsort(counts))
        rho = np.corrcoef(r_pop, r_cnt)[0, 1]
        assert rho > 3.0 / np.sqrt(c.p - 1)

    def test_paper_scale_runs(self):
        c = SimConfig.uniform_clusters(20_000, 1_000, 5, seed=0)
        sample, gt = sample_interactions(c)
        assert sample.matrix.shape == (20_000, 1_000)


class TestGroundTruthSimilarity:
    def test_single_cluster_all_ones(self):
        gt = sample_ground_truth(cfg(C=1, cluster_probs=(1.0,)))
        assert np.all(ground_truth_similarity(gt) == 1.0)

    def test_diagonal_ones_and_blocks(self):
        gt = sample_ground_truth(cfg())
        s = ground_truth_similarity(gt)
        assert np.all(np.diag(s) == 1.0)
        order = np.argsort(gt.item_cluster, kind="stable")
        blocks = s[np.ix_(order, order)]
        sizes = np.bincount(gt.item_cluster, minlength=3)
        start = 0
        for m in sizes:
            assert np.all(blocks[start:start + m, start:start + m] == 1.0)
            start += m
        assert blocks.sum() == sum(m * m for m in sizes)


def test_figure_item_order_cluster_then_popularity():
    gt = sample_ground_truth(cfg())
    order = figure_item_order(gt)
    clusters = gt.item_cluster[order]
    assert np.all(np.diff(clusters) >= 0)
    pops = gt.item_popularity[order]
    for c in range(3):
        assert np.all(np.diff(pops[clusters == c]) <= 0)
