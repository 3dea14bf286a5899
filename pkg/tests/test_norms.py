import numpy as np
import pytest
from numpy.testing import assert_allclose

from rgbm import (
    GroupNorm,
    InfinityNorm,
    OrderedL1Norm,
    OrderedMixedNorm,
    SelectionRule,
    exact_rtg_expectation,
    norm_for_rule,
    selection_pmf,
)

GROUPS_3 = [[0, 1], [2]]
GROUPS_6 = [[0, 1], [2, 3], [4, 5]]


def all_specs(dim, rng):
    """One instance of each norm family over R^dim (dim divisible by 3)."""
    w = np.sort(rng.random(dim))[::-1]
    w /= w.sum()
    groups = [list(range(3 * g, 3 * g + 3)) for g in range(dim // 3)]
    gw = np.sort(rng.random(len(groups)))[::-1]
    gw /= gw.sum()
    return [
        InfinityNorm(),
        OrderedL1Norm(w),
        GroupNorm(groups, dim),
        OrderedMixedNorm(groups, gw, dim),
    ]


class TestValues:
    def test_infinity(self):
        assert InfinityNorm().value([1.0, -3.0, 2.0]) == 3.0

    def test_ordered_l1_hand_example(self):
        spec = OrderedL1Norm([0.5, 0.3, 0.2])
        assert_allclose(spec.value([1.0, -3.0, 2.0]), 2.3, rtol=1e-15)

    def test_group_hand_example(self):
        spec = GroupNorm(GROUPS_3, 3)
        assert_allclose(spec.value([1.0, -3.0, 2.0]), 2.5, rtol=1e-15)

    def test_mixed_with_singletons_is_ordered_l1(self):
        rng = np.random.default_rng(0)
        w = selection_pmf(5, 2)
        ordered = OrderedL1Norm(w)
        mixed = OrderedMixedNorm([[j] for j in range(5)], w, 5)
        for _ in range(50):
            a = rng.standard_normal(5)
            assert_allclose(mixed.value(a), ordered.value(a), rtol=1e-14)
            assert_allclose(mixed.dual(a), ordered.dual(a), rtol=1e-14)

    def test_mixed_with_uniform_weights_is_group_norm(self):
        rng = np.random.default_rng(1)
        groups = [[0, 1, 2], [3, 4], [5]]
        group = GroupNorm(groups, 6)
        mixed = OrderedMixedNorm(groups, np.full(3, 1 / 3), 6)
        for _ in range(50):
            a = rng.standard_normal(6)
            assert_allclose(mixed.value(a), group.value(a), rtol=1e-14)
            assert_allclose(mixed.dual(a), group.dual(a), rtol=1e-14)


class TestWeightValidation:
    def test_increasing_rejected(self):
        with pytest.raises(ValueError, match="nonincreasing"):
            OrderedL1Norm([0.2, 0.8])

    def test_wrong_sum_rejected_not_renormalized(self):
        with pytest.raises(ValueError, match="sum to 1"):
            OrderedL1Norm([0.8, 0.4])

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            OrderedL1Norm([1.5, -0.5])

    def test_partition_validation(self):
        with pytest.raises(ValueError, match="partition"):
            GroupNorm([[0], [0, 1]], 2)
        with pytest.raises(ValueError, match="partition"):
            GroupNorm([[0]], 2)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            OrderedL1Norm([0.6, 0.4]).value([1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            GroupNorm(GROUPS_3, 3).value([1.0, 2.0])


class TestDuals:
    def test_infinity_dual_is_l1(self):
        assert InfinityNorm().dual([1.0, -2.0, 3.0]) == 6.0

    def test_ordered_l1_dual_hand_example(self):
        spec = OrderedL1Norm([0.5, 0.3, 0.2])
        assert_allclose(spec.dual([1.0, 1.0, 1.0]), 3.0, rtol=1e-15)

    def test_group_dual_hand_example(self):
        assert_allclose(GroupNorm(GROUPS_3, 3).dual([1.0, 1.0, 1.0]), 4.0, rtol=1e-15)

    def test_uniform_weights_dual_of_basis_vector(self):
        K = 6
        spec = OrderedL1Norm(np.full(K, 1 / K))
        e1 = np.zeros(K)
        e1[0] = 1.0
        assert_allclose(spec.dual(e1), K, rtol=1e-14)


class TestNormAxioms:
    @pytest.mark.parametrize("dim", [6, 9])
    def test_axioms(self, dim):
        rng = np.random.default_rng(dim)
        for spec in all_specs(dim, rng):
            for _ in range(200):
                a = rng.standard_normal(dim)
                b = rng.standard_normal(dim)
                s = rng.standard_normal()
                na, nb = spec.value(a), spec.value(b)
                assert_allclose(spec.value(s * a), abs(s) * na, rtol=1e-12, atol=1e-15)
                assert spec.value(a + b) <= na + nb + 1e-12
                assert na > 0
            assert spec.value(np.zeros(dim)) == 0.0


class TestCauchySchwarz:
    @pytest.mark.parametrize("dim", [6, 12])
    def test_generalized_inequality(self, dim):
        rng = np.random.default_rng(100 + dim)
        for spec in all_specs(dim, rng):
            A = rng.standard_normal((2000, dim))
            B = rng.standard_normal((2000, dim))
            for a, b in zip(A, B):
                inner = abs(float(np.dot(a, b)))
                assert inner <= spec.value(a) * spec.dual(b) * (1 + 1e-12)

    @pytest.mark.parametrize("dim", [6, 12])
    def test_constructed_maximizer_achieves_equality(self, dim):
        rng = np.random.default_rng(200 + dim)
        for spec in all_specs(dim, rng):
            for _ in range(200):
                b = rng.standard_normal(dim)
                a = spec.dual_maximizer(b)
                lhs = abs(float(np.dot(a, b)))
                rhs = spec.value(a) * spec.dual(b)
                assert_allclose(lhs, rhs, rtol=1e-9)


class TestSquaredVectorInequality:
    @pytest.mark.parametrize("dim", [6, 9])
    def test_norm_of_squares_dominates_squared_norm(self, dim):
        rng = np.random.default_rng(300 + dim)
        for spec in all_specs(dim, rng):
            for _ in range(200):
                a = rng.standard_normal(dim)
                assert spec.value(a**2) >= spec.value(a) ** 2 - 1e-12


class TestExactExpectation:
    def test_type0_is_infinity_norm(self):
        a = np.array([1.0, -3.0, 2.0])
        assert exact_rtg_expectation(a, SelectionRule("type0")) == 3.0

    def test_type1_matches_ordered_l1(self):
        rng = np.random.default_rng(6)
        rule = SelectionRule("type1", 2)
        spec = OrderedL1Norm(selection_pmf(6, 2))
        for _ in range(50):
            a = rng.standard_normal(6)
            assert_allclose(exact_rtg_expectation(a, rule), spec.value(a), rtol=1e-12)

    def test_type2_matches_group_norm(self):
        a = np.array([1.0, -3.0, 2.0])
        got = exact_rtg_expectation(a, SelectionRule("type2"), groups=GROUPS_3)
        assert_allclose(got, 2.5, rtol=1e-15)
        assert_allclose(got, GroupNorm(GROUPS_3, 3).value(a), rtol=1e-15)

    def test_type3_matches_mixed_norm(self):
        rng = np.random.default_rng(7)
        rule = SelectionRule("type3", 2)
        spec = OrderedMixedNorm(GROUPS_6, selection_pmf(3, 2), 6)
        for _ in range(50):
            a = rng.standard_normal(6)
            got = exact_rtg_expectation(a, rule, groups=GROUPS_6)
            assert_allclose(got, spec.value(a), rtol=1e-12)

    def test_enumeration_guard(self):
        with pytest.raises(ValueError, match="pmf"):
            exact_rtg_expectation(np.ones(30), SelectionRule("type1", 3))

    def test_norm_for_rule(self):
        assert isinstance(norm_for_rule(SelectionRule("type0"), 5), InfinityNorm)
        assert isinstance(norm_for_rule(SelectionRule("type1", 2), 5), OrderedL1Norm)
        assert isinstance(norm_for_rule(SelectionRule("type2"), 3, GROUPS_3), GroupNorm)
        assert isinstance(
            norm_for_rule(SelectionRule("type3", 2), 6, GROUPS_6), OrderedMixedNorm
        )
