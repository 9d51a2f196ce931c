"""DTW, Ward linkage and DTW k-group clustering against brute-force oracles."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.cluster import hierarchy

from co2panel.errors import BandTooNarrow, EmptySequence, LengthMismatch, UnlabeledEntity
from co2panel.clustering import (
    cluster_feature_summary,
    cut_dendrogram,
    dtw,
    dtw_kcluster,
    ward_cluster,
)
from co2panel.panel import standardize_series

from conftest import make_panel


def dtw_bruteforce(a, b, local_cost="squared"):
    """Minimum cumulative cost over all monotone warping paths, by enumeration."""
    n, m = len(a), len(b)
    cost = (lambda u, v: abs(u - v)) if local_cost == "absolute" else (lambda u, v: (u - v) ** 2)
    best = [np.inf]

    def walk(i, j, acc):
        acc = acc + cost(a[i], b[j])
        if acc >= best[0]:
            return
        if i == n - 1 and j == m - 1:
            best[0] = acc
            return
        if i + 1 < n and j + 1 < m:
            walk(i + 1, j + 1, acc)
        if i + 1 < n:
            walk(i + 1, j, acc)
        if j + 1 < m:
            walk(i, j + 1, acc)

    walk(0, 0, 0.0)
    return best[0]


class TestDTW:
    def test_identical_series(self):
        res = dtw([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert res.distance == 0.0
        assert res.path == ((0, 0), (1, 1), (2, 2))

    def test_duplicate_match(self):
        res = dtw([1, 2, 3], [1, 2, 2, 3], local_cost="absolute")
        assert res.distance == 0.0

    def test_path_monotone_continuous(self):
        rng = np.random.default_rng(2)
        res = dtw(rng.normal(0, 1, 9), rng.normal(0, 1, 13))
        assert res.path[0] == (0, 0)
        assert res.path[-1] == (8, 12)
        for (i0, j0), (i1, j1) in zip(res.path, res.path[1:]):
            assert (i1 - i0, j1 - j0) in ((1, 0), (0, 1), (1, 1))
        assert res.distance == pytest.approx(res.cost_matrix[-1, -1])

    def test_distance_equals_path_cost_sum(self):
        rng = np.random.default_rng(3)
        a, b = rng.normal(0, 1, 7), rng.normal(0, 1, 10)
        res = dtw(a, b, local_cost="absolute")
        total = sum(abs(a[i] - b[j]) for i, j in res.path)
        assert res.distance == pytest.approx(total, abs=1e-10)

    def test_exhaustive_small_alphabet(self):
        # all pairs of sequences with lengths <= 4 over {0, 1, 2}
        seqs = [list(s) for L in range(1, 5)
                for s in itertools.product((0.0, 1.0, 2.0), repeat=L)]
        for cost in ("absolute", "squared"):
            for a, b in itertools.combinations_with_replacement(seqs, 2):
                got = dtw(a, b, local_cost=cost).distance
                assert got == pytest.approx(dtw_bruteforce(a, b, cost), abs=1e-12)

    def test_zero_distance_iff_equal_up_to_duplications(self):
        # on the exhaustive small alphabet: distance 0 exactly when the
        # sequences collapse to the same run-compressed form
        def dedup(seq):
            out = [seq[0]]
            for v in seq[1:]:
                if v != out[-1]:
                    out.append(v)
            return tuple(out)

        seqs = [list(s) for L in range(1, 5)
                for s in itertools.product((0.0, 1.0, 2.0), repeat=L)]
        for a, b in itertools.combinations_with_replacement(seqs, 2):
            zero = dtw(a, b).distance == 0.0
            assert zero == (dedup(a) == dedup(b))

    def test_random_pairs_lengths_five_six(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            a = rng.integers(0, 3, rng.integers(5, 7)).astype(float)
            b = rng.integers(0, 3, rng.integers(5, 7)).astype(float)
            assert dtw(a, b).distance == pytest.approx(dtw_bruteforce(a, b), abs=1e-12)

    def test_symmetry_500_pairs(self):
        rng = np.random.default_rng(12)
        for _ in range(500):
            a = rng.normal(0, 1, rng.integers(2, 12))
            b = rng.normal(0, 1, rng.integers(2, 12))
            for cost in ("absolute", "squared"):
                assert dtw(a, b, cost).distance == pytest.approx(
                    dtw(b, a, cost).distance, rel=1e-12)

    def test_never_exceeds_lockstep(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            n = int(rng.integers(2, 15))
            a, b = rng.normal(0, 1, n), rng.normal(0, 1, n)
            assert dtw(a, b, "squared").distance <= float(((a - b) ** 2).sum()) + 1e-12
            assert dtw(a, b, "absolute").distance <= float(np.abs(a - b).sum()) + 1e-12

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=8))
    def test_self_distance_zero(self, xs):
        assert dtw(xs, xs).distance == 0.0

    def test_band_constraints(self):
        with pytest.raises(BandTooNarrow):
            dtw([1, 2, 3, 4, 5], [1, 2], band=1)
        full = dtw([1, 2, 3, 4], [1, 2, 3, 4]).distance
        banded = dtw([1, 2, 3, 4], [1, 2, 3, 4], band=1).distance
        assert banded >= full

    def test_empty_input(self):
        with pytest.raises(EmptySequence):
            dtw([], [1.0])


class TestWard:
    def test_outlier_merges_last(self):
        series = [[0.0, 0.0], [0.1, 0.0], [5.0, 5.0], [5.1, 5.0], [50.0, 50.0]]
        d = ward_cluster(series, list("abcde"))
        assert len(d.merges) == 4
        # the outlier (leaf 4) only joins in the final merge
        last = d.merges[-1]
        assert 4 in (last[0], last[1]) or last[0] >= 5 or last[1] >= 5
        flat = cut_dendrogram(d, 3)
        assert flat["e"] not in (flat["a"], flat["c"])

    def test_hand_computed_lance_williams_trace(self):
        # 1-d fixture: points 0, 1, 4, 10, 24; manual Lance-Williams trace.
        # merge 1: (0,1) at sqrt(1); updates give
        #   d2({0,1}, 4)  = (2*16 + 2*9 - 1)/3 = 49/3
        #   d2({0,1}, 10) = (2*100 + 2*81 - 1)/3 = 361/3
        #   d2({0,1}, 24) = (2*576 + 2*529 - 1)/3 = 2209/3
        # merge 2: leaf 2 joins cluster 5 at sqrt(49/3); updates give
        #   d2({0,1,4}, 10) = (2*36 + 3*(361/3) - 49/3)/4 = 625/6
        #   d2({0,1,4}, 24) = (2*400 + 3*(2209/3) - 49/3)/4 = 8978/12
        # merge 3: leaf 3 joins cluster 6 at sqrt(625/6)
        # merge 4: leaf 4 joins at sqrt((2*196 + 4*(8978/12) - 625/6)/5)
        points = [0.0, 1.0, 4.0, 10.0, 24.0]
        d = ward_cluster([[p] for p in points], list("abcde"))
        merges = d.merges
        assert (merges[0][0], merges[0][1]) == (0, 1)
        assert merges[0][2] == pytest.approx(1.0)
        assert (merges[1][0], merges[1][1]) == (2, 5)
        assert merges[1][2] == pytest.approx(np.sqrt(49.0 / 3.0))
        assert (merges[2][0], merges[2][1]) == (3, 6)
        assert merges[2][2] == pytest.approx(np.sqrt(625.0 / 6.0))
        d2_last = (2 * 196 + 4 * (8978.0 / 12.0) - 625.0 / 6.0) / 5.0
        assert (merges[3][0], merges[3][1]) == (4, 7)
        assert merges[3][2] == pytest.approx(np.sqrt(d2_last))
        assert merges[3][3] == 5

    def test_matches_scipy_linkage(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            X = rng.normal(0, 1, (rng.integers(4, 12), 6))
            mine = ward_cluster(list(X), [str(i) for i in range(len(X))])
            ref = hierarchy.linkage(X, method="ward")
            got_heights = [m[2] for m in mine.merges]
            assert np.allclose(got_heights, ref[:, 2], rtol=1e-8)
            got_pairs = [frozenset(m[:2]) for m in mine.merges]
            ref_pairs = [frozenset((int(r[0]), int(r[1]))) for r in ref]
            assert got_pairs == ref_pairs

    def test_monotone_heights_random(self):
        rng = np.random.default_rng(22)
        for _ in range(100):
            X = rng.normal(0, 1, (rng.integers(3, 15), 5))
            d = ward_cluster(list(X), [str(i) for i in range(len(X))])
            heights = [m[2] for m in d.merges]
            assert all(a <= b + 1e-12 for a, b in zip(heights, heights[1:]))

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            ward_cluster([[1.0, 2.0], [1.0]], ["a", "b"])


class TestDTWKCluster:
    def test_k_one(self):
        rng = np.random.default_rng(31)
        series = list(rng.normal(0, 1, (5, 10)))
        report = dtw_kcluster(series, 1)
        assert set(report.labels.values()) == {0}
        assert report.center_distances.shape == (1, 1)
        assert report.center_distances[0, 0] == 0.0

    def test_duplicate_groups_perfect_separation(self):
        a = [0.0, 1.0, 2.0, 3.0]
        b = [5.0, 4.0, 3.0, 2.0]
        series = [a, a, a, b, b, b]
        report = dtw_kcluster(series, 2, ids=list("uvwxyz"))
        assert report.labels["u"] == report.labels["v"] == report.labels["w"]
        assert report.labels["x"] == report.labels["y"] == report.labels["z"]
        assert report.labels["u"] != report.labels["x"]
        for e in "uvwxyz":
            assert report.member_alignments[e].distance == pytest.approx(0.0, abs=1e-16)

    def test_objective_monotone_50_instances(self):
        rng = np.random.default_rng(33)
        for _ in range(50):
            n, length = int(rng.integers(6, 10)), int(rng.integers(6, 12))
            centers = rng.normal(0, 3, (2, length))
            series = [centers[i % 2] + rng.normal(0, 0.4, length) for i in range(n)]
            report = dtw_kcluster(series, 2)
            hist = report.objective_history
            assert all(a >= b - 1e-9 for a, b in zip(hist, hist[1:]))

    def test_snapshot_grouping(self, snapshot):
        series = [standardize_series(snapshot.series(e, "Co").values)
                  for e in snapshot.entities]
        report = dtw_kcluster(series, 3, ids=snapshot.entities)
        trio = {report.labels["Norway"], report.labels["Australia"], report.labels["Canada"]}
        assert len(trio) == 1
        assert sorted(set(report.labels.values())) == [0, 1, 2]


class TestClusterFeatureSummary:
    def test_constant_single_entity_cluster(self):
        values = np.full((1, 4, 1), 7.0)
        panel = make_panel(["A"], range(2000, 2004), ["f"], values)
        (row,) = cluster_feature_summary(panel, {"A": 0}, ["f"])
        assert row.mean == 7.0 and row.median == 7.0
        assert row.std_dev == 0.0
        assert row.annual_growth_rate_pct == pytest.approx(0.0)

    def test_cagr_hand_value(self):
        values = np.array([[[100.0], [110.0], [121.0]]])
        panel = make_panel(["A"], [2000, 2001, 2002], ["f"], values)
        (row,) = cluster_feature_summary(panel, {"A": 0}, ["f"])
        assert row.annual_growth_rate_pct == pytest.approx(10.0)

    def test_nonpositive_first_value_excluded(self):
        values = np.array([[[0.0], [5.0], [10.0]], [[100.0], [110.0], [121.0]]])
        panel = make_panel(["A", "B"], [2000, 2001, 2002], ["f"], values)
        (row,) = cluster_feature_summary(panel, {"A": 0, "B": 0}, ["f"])
        assert row.excluded_entities == ("A",)
        assert row.annual_growth_rate_pct == pytest.approx(10.0)

    def test_pooled_recount_oracle(self, snapshot):
        labels = {e: i % 3 for i, e in enumerate(snapshot.entities)}
        rows = cluster_feature_summary(snapshot, labels, ["RE", "G"])
        for row in rows:
            members = [e for e in snapshot.entities if labels[e] == row.cluster]
            pooled = np.concatenate([snapshot.series(e, row.feature).values for e in members])
            assert row.mean == pytest.approx(pooled.mean(), rel=1e-12)
            assert row.median == pytest.approx(np.median(pooled), rel=1e-12)
            assert row.std_dev == pytest.approx(pooled.std(ddof=1), rel=1e-12)

    def test_unlabeled_entity(self, snapshot):
        with pytest.raises(UnlabeledEntity):
            cluster_feature_summary(snapshot, {"Norway": 0}, ["RE"])

    def test_snapshot_cluster_re_mean(self, snapshot):
        series = [standardize_series(snapshot.series(e, "Co").values)
                  for e in snapshot.entities]
        report = dtw_kcluster(series, 3, ids=snapshot.entities)
        rows = cluster_feature_summary(snapshot, report.labels, ["RE"])
        ch_cluster = report.labels["Switzerland"]
        row = next(r for r in rows if r.cluster == ch_cluster and r.feature == "RE")
        assert row.mean == pytest.approx(15.95, rel=0.20)
