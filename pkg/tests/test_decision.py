import numpy as np
import pytest

from cdut import (
    AssumptionError,
    PointSet,
    SeparationError,
    build_index,
    cdut_exact_1d,
    chamfer_translated,
    check_separation,
    decide_cdut,
    difference_set,
    geometric_median,
    total_distance,
    verify_emd_equivalence,
)
from cdut.instances import separated_planted_instance, uniform_instance

REL = 1e-9


def pts(rows):
    return PointSet(np.asarray(rows, dtype=np.float64))


class TestSeparation:
    def test_hand_computed_threshold(self):
        cert = check_separation(pts([[0.0], [100.0]]), c=1.5, radius=1.0, m=10)
        assert cert.threshold == pytest.approx(3.0, rel=REL)
        assert cert.min_pairwise_b == 100.0
        assert cert.holds

    def test_duplicate_point_always_fails(self):
        cert = check_separation(pts([[1.0], [1.0], [9.0]]), c=2.0, radius=0.5, m=4)
        assert cert.min_pairwise_b == 0.0
        assert not cert.holds

    def test_flips_exactly_at_threshold(self):
        base = pts([[0.0], [1.0], [2.5]])  # min pairwise gap 1.0
        c, radius, m = 2.0, 1.0, 8
        threshold = (c + 1.0) * (1.0 + 2.0 / m) * radius
        assert check_separation(PointSet(base.points * threshold), c, radius, m).holds
        assert not check_separation(PointSet(base.points * threshold * 0.999), c, radius, m).holds

    def test_single_point_is_vacuously_separated(self):
        assert check_separation(pts([[5.0]]), c=2.0, radius=1.0, m=3).holds

    def test_validation(self):
        with pytest.raises(ValueError, match="c must exceed"):
            check_separation(pts([[0.0]]), c=1.0, radius=1.0, m=2)
        with pytest.raises(ValueError, match="radius"):
            check_separation(pts([[0.0]]), c=2.0, radius=0.0, m=2)


class TestGeometricMedian:
    def test_square_symmetry_forces_center(self):
        result = geometric_median(
            np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]), 1e-8
        )
        assert np.allclose(result.point, [0.5, 0.5], atol=1e-6)
        assert result.total_distance == pytest.approx(2.0 * np.sqrt(2.0), abs=1e-5)
        assert result.converged

    def test_1d_median_is_the_middle_point(self):
        result = geometric_median(np.array([[0.0], [2.0], [10.0]]), 1e-8)
        assert result.point[0] == pytest.approx(2.0, abs=1e-7)
        assert result.total_distance == pytest.approx(10.0, abs=1e-6)

    def test_single_point(self):
        result = geometric_median(np.array([[3.0, 4.0]]), 1e-6)
        assert np.array_equal(result.point, [3.0, 4.0])
        assert result.total_distance == 0.0

    def test_objective_matches_local_grid_search(self):
        rng = np.random.default_rng(12)
        accuracy = 1e-4
        for _ in range(5):
            cloud = rng.normal(size=(30, 3))
            result = geometric_median(cloud, accuracy)
            offsets = np.linspace(-5 * accuracy, 5 * accuracy, 11)
            grid = np.stack(np.meshgrid(offsets, offsets, offsets, indexing="ij"), axis=-1)
            probes = result.point + grid.reshape(-1, 3)
            objective = np.sum(
                np.sqrt(np.sum((cloud[None, :, :] - probes[:, None, :]) ** 2, axis=-1)), axis=1
            )
            assert result.total_distance <= objective.min() + accuracy + 1e-12

    def test_optimal_data_point_is_recognized(self):
        # the middle of three collinear points is the exact median
        cloud = np.array([[0.0], [2.0], [10.0]])
        result = geometric_median(cloud, 1e-10, max_iter=5000)
        assert total_distance(cloud, result.point) <= 10.0 + 1e-9

    def test_validation(self):
        with pytest.raises(ValueError, match="accuracy"):
            geometric_median(np.array([[0.0]]), 0.0)


class TestDifferenceSets:
    def test_equality_at_inducing_translation(self):
        for seed in range(50):
            rng = np.random.default_rng(seed)
            a, b = uniform_instance(int(rng.integers(2, 15)), int(rng.integers(2, 15)), 2, seed)
            t = rng.uniform(-10, 10, size=2)
            ds = difference_set(a, b, t)
            cd = chamfer_translated(a, t, b).value
            assert total_distance(ds.deltas, t) == pytest.approx(cd, rel=REL, abs=1e-9)

    def test_lower_bound_for_arbitrary_assignments(self):
        for seed in range(50):
            rng = np.random.default_rng(1000 + seed)
            a, b = uniform_instance(10, 12, 2, 1000 + seed)
            assignment = rng.integers(0, len(b), size=len(a))
            deltas = b.points[assignment] - a.points
            t = rng.uniform(-10, 10, size=2)
            cd = chamfer_translated(a, t, b).value
            assert total_distance(deltas, t) >= cd - 1e-9


class TestDecide:
    def test_exact_copy_is_yes_with_near_zero_witness(self):
        inst = separated_planted_instance(6, 12, 2, 1.0, 2.0, 0.25, "yes", seed=0)
        # strip the noise: exact translated subset
        rng = np.random.default_rng(0)
        b = inst.b
        a = PointSet(b.points[:6] - np.array([3.0, -2.0]))
        result = decide_cdut(a, b, radius=1.0, epsilon=0.25, c=2.0, seed=1)
        assert result.yes
        assert result.evidence.value <= 1e-6
        assert np.allclose(result.evidence.translation, [3.0, -2.0], atol=1e-6)

    @pytest.mark.parametrize("dim", [1, 2])
    def test_planted_yes_and_no(self, dim):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            m = int(rng.integers(2, 6)) * 2
            n = int(rng.integers(m, 21))
            yes = separated_planted_instance(m, n, dim, 1.0, 2.0, 0.25, "yes", seed)
            no = separated_planted_instance(m, n, dim, 1.0, 2.0, 0.25, "no", seed)
            assert decide_cdut(yes.a, yes.b, 1.0, 0.25, 2.0, seed=seed).answer == "YES"
            assert decide_cdut(no.a, no.b, 1.0, 0.25, 2.0, seed=seed).answer == "NO"

    def test_planted_optima_verified_by_sweep(self):
        # 1D planted instances have exactly computable optima
        for seed in range(10):
            yes = separated_planted_instance(6, 12, 1, 1.0, 2.0, 0.25, "yes", seed)
            opt = cdut_exact_1d(yes.a, yes.b).value
            assert opt <= yes.meta["opt_upper"] + REL
            no = separated_planted_instance(6, 12, 1, 1.0, 2.0, 0.25, "no", seed)
            opt_no = cdut_exact_1d(no.a, no.b).value
            assert opt_no == pytest.approx(no.meta["opt_lower"], rel=1e-6)
            assert opt_no > 1.0 * (1.0 + 0.25)

    def test_planted_optima_verified_by_localnet_in_2d(self):
        from cdut import LocalNetConfig, cdut_localnet

        tight = LocalNetConfig(epsilon=0.15, delta=0.05)
        for seed in range(3):
            yes = separated_planted_instance(6, 12, 2, 1.0, 2.0, 0.25, "yes", seed)
            value = cdut_localnet(yes.a, yes.b, tight, seed=seed).value
            assert value <= 1.15 * yes.meta["opt_upper"] + REL  # so OPT <= R
            no = separated_planted_instance(6, 12, 2, 1.0, 2.0, 0.25, "no", seed)
            evidence = cdut_localnet(no.a, no.b, tight, seed=seed).value
            # the estimate never underestimates, so OPT >= value / 1.15
            assert evidence / 1.15 > 1.0 * (1.0 + 0.25)

    def test_refuses_unseparated_input(self):
        a, b = uniform_instance(5, 12, 1, 3)  # generic uniform B is not separated
        with pytest.raises(SeparationError) as err:
            decide_cdut(a, b, radius=10.0, epsilon=0.25, c=2.0, seed=0)
        assert not err.value.certificate.holds

    def test_epsilon_validation(self):
        inst = separated_planted_instance(4, 8, 1, 1.0, 2.0, 0.25, "yes", 0)
        with pytest.raises(ValueError, match="epsilon"):
            decide_cdut(inst.a, inst.b, 1.0, 0.0, 2.0)

    def test_alignment_and_c_uniqueness_near_optimum(self):
        for seed in range(10):
            inst = separated_planted_instance(8, 16, 2, 1.0, 2.0, 0.25, "yes", seed)
            t_star = inst.shift
            index = build_index(inst.b)
            rng = np.random.default_rng(seed)
            base_idx = difference_set(inst.a, inst.b, t_star).assignment
            for _ in range(5):
                off = rng.normal(size=2)
                off *= rng.uniform(0, 2.0 / len(inst.a)) / np.linalg.norm(off)
                near = difference_set(inst.a, inst.b, t_star + off)
                assert np.array_equal(near.assignment, base_idx)
                pair_d, _ = index.query_two(inst.a.points + (t_star + off))
                assert np.all(pair_d[:, 1] >= 2.0 * pair_d[:, 0])

    def test_median_witness_is_nearly_optimal(self):
        for seed in range(10):
            inst = separated_planted_instance(6, 12, 1, 1.0, 2.0, 0.25, "yes", seed)
            opt = cdut_exact_1d(inst.a, inst.b).value
            result = decide_cdut(inst.a, inst.b, 1.0, 0.25, 2.0, seed=seed)
            assert result.yes
            witness_cost = chamfer_translated(inst.a, result.evidence.translation, inst.b).value
            assert witness_cost <= opt + 0.25 * 1.0 + REL


class TestEmdEquivalence:
    def test_planted_yes_assignment_is_injective(self):
        inst = separated_planted_instance(6, 12, 2, 1.0, 2.0, 0.25, "yes", seed=4)
        assert verify_emd_equivalence(inst.a, inst.b, 1.0, 0.25, inst.shift)

    def test_near_identical_a_points_rejected(self):
        a = pts([[0.0, 0.0], [0.05, 0.0]])
        b = pts([[10.0, 0.0], [30.0, 0.0]])
        with pytest.raises(AssumptionError):
            verify_emd_equivalence(a, b, 1.0, 0.25, np.zeros(2))

    def test_singleton_a_is_always_injective(self):
        a = pts([[0.0]])
        b = pts([[5.0], [9.0]])
        assert verify_emd_equivalence(a, b, 1.0, 0.25, np.array([5.0]))
