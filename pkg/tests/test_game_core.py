"""Instance/allocation types, utilities, ordering, and the split/merge maps."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blotto import (
    Allocation,
    GameInstance,
    InputError,
    PreconditionError,
    canonical_ordering,
    instance_from_dict,
    instance_to_dict,
    merge_battlefields,
    split_battlefield,
    total_utility,
    utility_per_battlefield,
)
from conftest import random_instance, random_positive_allocation, worked_example_instance


def make(budget_a, budget_b, values_a, values_b):
    return GameInstance(
        budget_a=budget_a,
        budget_b=budget_b,
        values_a=np.asarray(values_a, dtype=float),
        values_b=np.asarray(values_b, dtype=float),
    )


class TestGameInstance:
    def test_rejects_nonpositive_budget(self):
        with pytest.raises(InputError):
            make(0.0, 1.0, [1.0], [1.0])
        with pytest.raises(InputError):
            make(1.0, -2.0, [1.0], [1.0])

    def test_rejects_nonpositive_values(self):
        with pytest.raises(InputError):
            make(1.0, 1.0, [1.0, 0.0], [1.0, 1.0])
        with pytest.raises(InputError):
            make(1.0, 1.0, [1.0, 1.0], [1.0, -1.0])

    def test_rejects_length_mismatch(self):
        with pytest.raises(InputError):
            make(1.0, 1.0, [1.0, 2.0], [1.0])

    def test_values_are_read_only(self):
        inst = make(1.0, 1.0, [1.0, 2.0], [3.0, 4.0])
        with pytest.raises(ValueError):
            inst.values_a[0] = 9.0

    def test_dict_round_trip(self):
        inst = make(2.0, 1.0, [1.0, 5.0], [1.0, 0.5])
        again = instance_from_dict(instance_to_dict(inst))
        assert again.budget_a == inst.budget_a
        assert again.budget_b == inst.budget_b
        assert np.array_equal(again.values_a, inst.values_a)
        assert np.array_equal(again.values_b, inst.values_b)

    def test_from_dict_requires_all_keys(self):
        with pytest.raises(InputError):
            instance_from_dict({"budget_a": 1.0, "budget_b": 1.0, "values_a": [1.0]})

    def test_from_dict_ignores_extra_keys(self):
        inst = instance_from_dict(
            {
                "budget_a": 2.0,
                "budget_b": 1.0,
                "values_a": [1.0, 5.0],
                "values_b": [1.0, 0.5],
                "commit_a": [0.5, 1.5],
            }
        )
        assert inst.n == 2


class TestAllocation:
    def test_clamps_tiny_negative_entries(self):
        a = Allocation(np.array([1.0, -1e-13]), 1.0)
        assert a.amounts[1] == 0.0

    def test_rejects_meaningful_negative_entries(self):
        with pytest.raises(InputError):
            Allocation(np.array([1.01, -0.01]), 1.0)

    def test_rejects_budget_mismatch(self):
        with pytest.raises(InputError):
            Allocation(np.array([0.5, 0.4]), 1.0)

    def test_accepts_budget_within_relative_tolerance(self):
        Allocation(np.array([0.5, 0.5 + 1e-10]), 1.0)


class TestPerBattlefieldUtility:
    def test_equal_split_halves_the_value(self):
        inst = make(2.0, 2.0, [4.0, 1.0], [1.0, 1.0])
        a = Allocation(np.array([1.0, 1.0]), 2.0)
        b = Allocation(np.array([1.0, 1.0]), 2.0)
        assert utility_per_battlefield(inst, "a", 0, a, b) == pytest.approx(2.0)

    def test_both_zero_goes_to_follower(self):
        inst = make(1.0, 1.0, [2.0, 2.0], [3.0, 1.0])
        a = Allocation(np.array([0.0, 1.0]), 1.0)
        b = Allocation(np.array([0.0, 1.0]), 1.0)
        assert utility_per_battlefield(inst, "b", 0, a, b) == 3.0
        assert utility_per_battlefield(inst, "a", 0, a, b) == 0.0

    def test_worked_example_share_arithmetic(self):
        # leader 0.136 vs follower 0.559 on a unit-value battlefield
        inst = make(0.5, 1.0, [1.0, 5.0], [1.0, 0.5])
        a = Allocation(np.array([0.136, 0.364]), 0.5)
        b = Allocation(np.array([0.559, 0.441]), 1.0)
        got = utility_per_battlefield(inst, "a", 0, a, b)
        assert got == pytest.approx(0.1957, abs=5e-5)

    def test_index_out_of_range(self):
        inst = make(1.0, 1.0, [1.0], [1.0])
        a = Allocation(np.array([1.0]), 1.0)
        with pytest.raises(InputError):
            utility_per_battlefield(inst, "a", 1, a, a)

    def test_unknown_player_rejected(self):
        inst = make(1.0, 1.0, [1.0], [1.0])
        a = Allocation(np.array([1.0]), 1.0)
        with pytest.raises(InputError):
            utility_per_battlefield(inst, "c", 0, a, a)


class TestTotalUtility:
    def test_worked_example_leader_utility_at_r2(self):
        inst = worked_example_instance(2.0)
        a = Allocation(np.array([0.543, 1.457]), 2.0)
        b = Allocation(np.array([0.847, 0.153]), 1.0)
        assert total_utility(inst, "a", a, b) == pytest.approx(4.915, abs=1e-3)

    def test_worked_example_follower_utility_at_r_half(self):
        inst = worked_example_instance(0.5)
        a = Allocation(np.array([0.025, 0.475]), 0.5)
        b = Allocation(np.array([0.340, 0.660]), 1.0)
        assert total_utility(inst, "b", a, b) == pytest.approx(1.223, abs=1e-3)

    def test_single_support_shares(self):
        inst = make(1.0, 1.0, [4.0, 2.0], [6.0, 2.0])
        a = Allocation(np.array([1.0, 0.0]), 1.0)
        b = Allocation(np.array([1.0, 0.0]), 1.0)
        # battlefield 1 is split evenly; battlefield 2 is a double zero
        assert total_utility(inst, "a", a, b) == pytest.approx(2.0)
        assert total_utility(inst, "b", a, b) == pytest.approx(3.0 + 2.0)

    def test_bounds_on_random_profiles(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 6))
            inst = random_instance(rng, n)
            a = random_positive_allocation(rng, n, inst.budget_a)
            b = random_positive_allocation(rng, n, inst.budget_b)
            for player, values in (("a", inst.values_a), ("b", inst.values_b)):
                u = total_utility(inst, player, a, b)
                assert 0.0 <= u <= values.sum() + 1e-12


class TestCanonicalOrdering:
    def test_worked_example_swap(self):
        inst = make(1.0, 1.0, [5.0, 1.0], [0.5, 1.0])
        ordered, ordering = canonical_ordering(inst)
        assert list(ordering.permutation) == [1, 0]
        assert np.allclose(ordering.ratios, [1.0, 10.0])
        assert np.array_equal(ordered.values_a, [1.0, 5.0])

    def test_identity_when_sorted(self):
        inst = make(1.0, 1.0, [1.0, 5.0], [1.0, 0.5])
        _, ordering = canonical_ordering(inst)
        assert list(ordering.permutation) == [0, 1]

    def test_ties_keep_original_order(self):
        inst = make(1.0, 1.0, [2.0, 4.0, 1.0], [1.0, 2.0, 0.5])
        _, ordering = canonical_ordering(inst)
        assert list(ordering.permutation) == [0, 1, 2]

    def test_idempotent(self, rng):
        inst = random_instance(rng, 5)
        once, _ = canonical_ordering(inst)
        twice, ordering2 = canonical_ordering(once)
        assert list(ordering2.permutation) == list(range(5))
        assert np.array_equal(once.values_a, twice.values_a)

    def test_round_trip_mapping(self, rng):
        inst = random_instance(rng, 4)
        _, ordering = canonical_ordering(inst)
        vec = rng.uniform(0, 1, 4)
        assert np.allclose(ordering.to_original(ordering.to_canonical(vec)), vec)


class TestSplitMerge:
    def test_split_t1_is_identity(self):
        inst = make(1.0, 1.0, [2.0, 3.0], [1.0, 1.0])
        a = Allocation(np.array([0.4, 0.6]), 1.0)
        b = Allocation(np.array([0.5, 0.5]), 1.0)
        inst2, a2, b2 = split_battlefield(inst, 0, 1, a, b)
        assert inst2.n == 2
        assert np.allclose(inst2.values_a, inst.values_a)
        assert np.allclose(a2.amounts, a.amounts)

    def test_split_three_ways(self):
        inst = make(3.0, 1.0, [6.0, 1.0], [3.0, 1.0])
        a = Allocation(np.array([3.0, 0.0]), 3.0)
        b = Allocation(np.array([0.5, 0.5]), 1.0)
        inst2, a2, b2 = split_battlefield(inst, 0, 3, a, b)
        assert inst2.n == 4
        assert np.allclose(inst2.values_a[:3], 2.0)
        assert np.allclose(a2.amounts[:3], 1.0)
        before = total_utility(inst, "a", a, b)
        after = total_utility(inst2, "a", a2, b2)
        assert after == pytest.approx(before, rel=1e-12)

    def test_split_rejects_bad_args(self):
        inst = make(1.0, 1.0, [1.0], [1.0])
        a = Allocation(np.array([1.0]), 1.0)
        with pytest.raises(InputError):
            split_battlefield(inst, 0, 0, a, a)
        with pytest.raises(InputError):
            split_battlefield(inst, 3, 2, a, a)

    def test_merge_size_one_group_is_noop(self):
        inst = make(1.0, 1.0, [2.0, 3.0], [1.0, 1.0])
        a = Allocation(np.array([0.4, 0.6]), 1.0)
        b = Allocation(np.array([0.5, 0.5]), 1.0)
        inst2, a2, b2 = merge_battlefields(inst, [1], a, b)
        assert inst2.n == 2
        assert np.allclose(inst2.values_a, inst.values_a)
        assert np.allclose(b2.amounts, b.amounts)

    def test_merge_rejects_unequal_groups_naming_the_pair(self):
        inst = make(1.0, 1.0, [2.0, 3.0], [1.0, 1.0])
        a = Allocation(np.array([0.5, 0.5]), 1.0)
        b = Allocation(np.array([0.5, 0.5]), 1.0)
        with pytest.raises(PreconditionError) as err:
            merge_battlefields(inst, [0, 1], a, b)
        assert "0" in str(err.value) and "1" in str(err.value)

    def test_split_then_merge_recovers_instance(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 5))
            inst = random_instance(rng, n)
            a = random_positive_allocation(rng, n, inst.budget_a)
            b = random_positive_allocation(rng, n, inst.budget_b)
            j = int(rng.integers(0, n))
            t = int(rng.integers(2, 5))
            inst2, a2, b2 = split_battlefield(inst, j, t, a, b)
            inst3, a3, b3 = merge_battlefields(inst2, list(range(j, j + t)), a2, b2)
            assert inst3.n == inst.n
            assert np.allclose(inst3.values_a, inst.values_a, rtol=1e-12)
            assert np.allclose(inst3.values_b, inst.values_b, rtol=1e-12)
            assert np.allclose(a3.amounts, a.amounts, rtol=1e-9, atol=1e-15)
            assert np.allclose(b3.amounts, b.amounts, rtol=1e-9, atol=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(
        seed=st.integers(0, 2**32 - 1),
        n=st.integers(1, 5),
        t=st.integers(1, 6),
    )
    def test_utilities_invariant_under_split(self, seed, n, t):
        gen = np.random.default_rng(seed)
        inst = random_instance(gen, n)
        a = random_positive_allocation(gen, n, inst.budget_a)
        b = random_positive_allocation(gen, n, inst.budget_b)
        j = int(gen.integers(0, n))
        ua = total_utility(inst, "a", a, b)
        ub = total_utility(inst, "b", a, b)
        inst2, a2, b2 = split_battlefield(inst, j, t, a, b)
        assert total_utility(inst2, "a", a2, b2) == pytest.approx(ua, rel=1e-12)
        assert total_utility(inst2, "b", a2, b2) == pytest.approx(ub, rel=1e-12)
