import numpy as np
import pytest

from cdut import L1, LINF, PointSet, build_index, build_ladder
from cdut.instances import uniform_instance


def pts1(values):
    return PointSet(np.asarray(values, dtype=np.float64)[:, None])


class TestBuild:
    def test_scale_count_from_bounds(self):
        ladder = build_ladder(pts1([0.0, 100.0]), c=2.0, L=1.0, U=200.0, seed=1)
        assert len(ladder.scales) == 8  # ceil(log2 200)
        assert ladder.scale_radii == [2.0**i for i in range(8)]

    def test_deterministic_under_seed(self):
        b, _ = uniform_instance(60, 5, 4, 9)
        first = build_ladder(b, c=2.0, seed=5)
        second = build_ladder(b, c=2.0, seed=5)
        assert len(first.scales) == len(second.scales)
        for s1, s2 in zip(first.scales, second.scales):
            for t1, t2 in zip(s1.tables, s2.tables):
                assert np.array_equal(t1.sorted_ids, t2.sorted_ids)
                assert np.array_equal(t1.proj, t2.proj)

    def test_distinct_seeds_give_distinct_tables(self):
        b, _ = uniform_instance(60, 5, 4, 9)
        first = build_ladder(b, c=2.0, seed=5)
        second = build_ladder(b, c=2.0, seed=6)
        assert not np.array_equal(first.scales[0].tables[0].proj, second.scales[0].tables[0].proj)

    def test_single_point_degenerates_to_exact_table(self):
        ladder = build_ladder(pts1([3.0]), c=2.0, seed=0)
        assert ladder.scales == []
        answer = ladder.query([3.0])
        assert (answer.index, answer.distance) == (0, 0.0)
        answer = ladder.query([5.0])
        assert answer.distance == 2.0  # exact fallback

    def test_parameter_validation(self):
        b = pts1([0.0, 1.0])
        with pytest.raises(ValueError, match="c must exceed"):
            build_ladder(b, c=1.0)
        with pytest.raises(ValueError, match="bounds"):
            build_ladder(b, c=2.0, L=-1.0, U=10.0)
        with pytest.raises(ValueError, match="miss_prob"):
            build_ladder(b, c=2.0, miss_prob=1.5)


class TestQuery:
    def test_member_point_hits_exact_table(self):
        b, _ = uniform_instance(40, 5, 3, 2)
        ladder = build_ladder(b, c=2.0, seed=2)
        for row in (0, 7, 39):
            answer = ladder.query(b.points[row])
            assert answer.distance == 0.0

    def test_query_at_exactly_l_stays_within_factor(self):
        b = pts1([0.0, 10.0, 20.0, 30.0])
        ladder = build_ladder(b, c=2.0, L=1.0, U=60.0, seed=3, miss_prob=1e-3)
        answer = ladder.query([1.0])  # distance exactly L from the unique nearest point
        assert answer.distance <= 2.0 * 1.0 + 1e-12

    def test_never_underestimates(self):
        rng = np.random.default_rng(11)
        b = PointSet(rng.uniform(0, 1, size=(500, 16)))
        ladder = build_ladder(b, c=2.0, seed=11)
        queries = rng.uniform(0, 1, size=(300, 16))
        reported, idx = ladder.query_batch(queries)
        exact, _ = build_index(b).query_many(queries)
        recomputed = ladder.metric.norms(queries - b.points[idx])
        assert np.all(reported >= exact - 1e-12)
        assert np.allclose(reported, recomputed, rtol=0, atol=0)

    def test_mostly_within_factor_c(self):
        rng = np.random.default_rng(23)
        b = PointSet(rng.uniform(0, 1, size=(200, 8)))
        ladder = build_ladder(b, c=2.0, seed=23)
        queries = rng.uniform(0, 1, size=(300, 8))
        reported, _ = ladder.query_batch(queries)
        exact, _ = build_index(b).query_many(queries)
        assert np.mean(reported <= 2.0 * exact + 1e-12) >= 0.90

    def test_single_query_agrees_with_contract(self):
        b, _ = uniform_instance(80, 5, 4, 5)
        ladder = build_ladder(b, c=2.0, seed=5)
        exact_index = build_index(b)
        rng = np.random.default_rng(5)
        for q in rng.uniform(-100, 100, size=(25, 4)):
            answer = ladder.query(q)
            true_d, _ = exact_index.query(q)
            assert answer.distance >= true_d - 1e-12
            assert answer.distance == ladder.metric.norms(q - b.points[answer.index])

    @pytest.mark.parametrize("metric", [L1, LINF])
    def test_other_metrics_never_underestimate(self, metric):
        rng = np.random.default_rng(31)
        b = PointSet(rng.uniform(-10, 10, size=(120, 6)))
        ladder = build_ladder(b, c=2.0, seed=31, metric=metric)
        queries = rng.uniform(-12, 12, size=(100, 6))
        reported, _ = ladder.query_batch(queries)
        exact, _ = build_index(b, metric).query_many(queries)
        assert np.all(reported >= exact - 1e-12)

    def test_scale_hits_are_monotone(self):
        rng = np.random.default_rng(17)
        b = PointSet(rng.uniform(0, 1, size=(150, 6)))
        ladder = build_ladder(b, c=2.0, seed=17)
        for q in rng.uniform(0, 1, size=(40, 6)):
            hits = ladder.scale_hits(q)
            first_true = next((i for i, h in enumerate(hits) if h), len(hits))
            assert all(hits[first_true:])

    def test_far_query_falls_back_to_exact_scan(self):
        rng = np.random.default_rng(41)
        b = PointSet(rng.uniform(0, 1, size=(50, 4)))
        ladder = build_ladder(b, c=2.0, seed=41)
        far = np.full((3, 4), 1e6) + rng.uniform(0, 1, size=(3, 4))
        reported, idx = ladder.query_batch(far)
        exact_d, exact_i = build_index(b).query_many(far)
        assert np.array_equal(reported, exact_d)
        assert np.array_equal(idx, exact_i)
        single = ladder.query(far[0])
        assert single.distance == exact_d[0]

    def test_dimension_mismatch(self):
        ladder = build_ladder(pts1([0.0, 5.0]), c=2.0, seed=0)
        with pytest.raises(ValueError, match="dimension|shape"):
            ladder.query([1.0, 2.0])
