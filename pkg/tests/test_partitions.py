import numpy as np
import pytest

import miokit as mk
from miokit.corpus import random_joint, random_mio
from miokit.errors import InvariantError

from helpers import make_joint

MIO3 = [[0.2, 0.1, 0.0, 0.0], [0.0, 0.0, 0.3, 0.0], [0.0, 0.0, 0.0, 0.4]]


def space(*labels):
    return mk.CategorySpace(labels)


class TestCategoryPartition:
    def test_valid(self):
        part = mk.CategoryPartition(space("a", "b", "c"), [["b", "a"], ["c"]])
        assert part.blocks == (("a", "b"), ("c",))  # block order kept, members canonical
        assert part.block_labels() == ["a+b", "c"]

    def test_missing_label_named(self):
        with pytest.raises(InvariantError, match="not covered: 'c'"):
            mk.CategoryPartition(space("a", "b", "c"), [["a", "b"]])

    def test_duplicate_label_named(self):
        with pytest.raises(InvariantError, match="'a' appears in more than one block"):
            mk.CategoryPartition(space("a", "b"), [["a"], ["a", "b"]])

    def test_unknown_label_named(self):
        with pytest.raises(InvariantError, match="unknown label 'z'"):
            mk.CategoryPartition(space("a", "b"), [["a", "z"], ["b"]])

    def test_label_collision_gets_suffix(self):
        part = mk.CategoryPartition(space("a+b", "a", "b"), [["a+b"], ["a", "b"]])
        assert len(set(part.block_labels())) == 2

    def test_enumeration_counts_are_bell_numbers(self):
        labels = ["a", "b", "c", "d"]
        for n, bell in [(1, 1), (2, 2), (3, 5), (4, 15)]:
            parts = list(mk.enumerate_partitions(space(*labels[:n])))
            assert len(parts) == bell
            assert len({p.as_block_sets() for p in parts}) == bell


class TestCoarseGrain:
    def test_row_sums(self):
        coarse = mk.coarse_grain_target(
            make_joint(MIO3, labels=["a", "b", "c"]),
            mk.CategoryPartition(space("a", "b", "c"), [["a", "b"], ["c"]]))
        np.testing.assert_allclose(
            coarse.p, [[0.2, 0.1, 0.3, 0.0], [0.0, 0.0, 0.0, 0.4]], atol=1e-15)
        assert coarse.categories.labels == ("a+b", "c")

    def test_singleton_partition_is_identity(self):
        joint = make_joint([[0.4, 0.1], [0.1, 0.4]])
        coarse = mk.coarse_grain_target(joint, mk.singleton_partition(joint.categories))
        np.testing.assert_allclose(coarse.p, joint.p, atol=1e-15)

    def test_one_block_kills_information(self):
        joint = make_joint([[0.4, 0.1], [0.1, 0.4]])
        coarse = mk.coarse_grain_target(joint, mk.one_block_partition(joint.categories))
        assert coarse.n_categories == 1
        assert mk.mutual_information(coarse) == pytest.approx(0.0, abs=1e-15)

    def test_observable_marginal_unchanged(self):
        rng = np.random.default_rng(31)
        joint = random_joint(rng, 4, 9, zero_fraction=0.2)
        part = mk.CategoryPartition(joint.categories, [["a1", "a3"], ["a2", "a4"]])
        np.testing.assert_allclose(
            mk.marginal_observable(mk.coarse_grain_target(joint, part)).mass,
            mk.marginal_observable(joint).mass, atol=1e-12)

    def test_wrong_space_rejected(self):
        joint = make_joint([[0.5, 0.0], [0.0, 0.5]])
        part = mk.CategoryPartition(space("x", "y"), [["x"], ["y"]])
        with pytest.raises(InvariantError, match="different category space"):
            mk.coarse_grain_target(joint, part)


class TestCheckSubMio:
    def test_any_partition_of_exact_mio(self):
        joint = make_joint(MIO3, labels=["a", "b", "c"])
        for part in mk.enumerate_partitions(joint.categories):
            assert mk.check_sub_mio(joint, part, 1e-12).is_mio

    def test_uniform_joint_fails(self):
        joint = make_joint([[0.25, 0.25], [0.25, 0.25]])
        part = mk.CategoryPartition(joint.categories, [["a1"], ["a2"]])
        assert not mk.check_sub_mio(joint, part).is_mio

    def test_sub_mio_without_mio(self):
        # blocks {a1,a2} vs {a3} separate supports even though a1/a2 overlap
        table = [[0.2, 0.2, 0.0], [0.2, 0.1, 0.0], [0.0, 0.0, 0.3]]
        joint = make_joint(table)
        assert not mk.check_mio(joint).is_mio
        part = mk.CategoryPartition(joint.categories, [["a1", "a2"], ["a3"]])
        verdict = mk.check_sub_mio(joint, part)
        assert verdict.is_mio
        # cross-check: the coarse table's expected residual is exactly zero
        from helpers import expected_residual_oracle
        coarse = [[0.4, 0.3, 0.0], [0.0, 0.0, 0.3]]
        assert abs(expected_residual_oracle(coarse)) <= 1e-15

    def test_mass_matching_lifts_to_blocks(self):
        table = [[0.2, 0.2, 0.0], [0.2, 0.1, 0.0], [0.0, 0.0, 0.3]]
        joint = make_joint(table)
        part = mk.CategoryPartition(joint.categories, [["a1", "a2"], ["a3"]])
        coarse = mk.coarse_grain_target(joint, part)
        gaps = mk.verify_mass_matching(coarse, mk.support_regions(coarse))
        assert max(gaps.values()) <= 1e-10


class TestJoinPartitions:
    def test_meet_of_crossing_pair(self):
        s = space("a", "b", "c")
        meet = mk.join_partitions(
            mk.CategoryPartition(s, [["a", "b"], ["c"]]),
            mk.CategoryPartition(s, [["a"], ["b", "c"]]))
        assert meet == mk.singleton_partition(s)

    def test_idempotent(self):
        part = mk.CategoryPartition(space("a", "b", "c"), [["a", "b"], ["c"]])
        assert mk.join_partitions(part, part) == part

    def test_one_block_is_identity_element(self):
        s = space("a", "b", "c")
        part = mk.CategoryPartition(s, [["a", "b"], ["c"]])
        assert mk.join_partitions(mk.one_block_partition(s), part) == part

    def test_mismatched_spaces(self):
        with pytest.raises(InvariantError, match="mismatched"):
            mk.join_partitions(mk.one_block_partition(space("a", "b")),
                               mk.one_block_partition(space("a", "c")))

    @staticmethod
    def _refines(fine, coarse):
        return all(any(set(fb) <= set(cb) for cb in coarse.blocks)
                   for fb in fine.blocks)

    def test_meet_is_coarsest_common_refinement(self):
        # brute force over every partition pair of a 4-category space
        s = space("a", "b", "c", "d")
        everything = list(mk.enumerate_partitions(s))
        for p1 in everything:
            for p2 in everything:
                meet = mk.join_partitions(p1, p2)
                assert self._refines(meet, p1) and self._refines(meet, p2)
                for other in everything:
                    if self._refines(other, p1) and self._refines(other, p2):
                        assert self._refines(other, meet)


class TestJointSubMioInformation:
    def test_discrete_meet_is_equivalent_to_mio(self):
        joint = make_joint(np.diag([0.1, 0.3, 0.25, 0.35]),
                           labels=["a", "b", "c", "d"])
        s = joint.categories
        p1 = mk.CategoryPartition(s, [["a", "b"], ["c", "d"]])
        p2 = mk.CategoryPartition(s, [["a", "c"], ["b", "d"]])
        report = mk.joint_submio_information(joint, [p1, p2], tolerance=1e-9)
        assert report.equivalent_to_mio
        assert report.joint_informativeness >= 1.0 - 1e-9
        assert report.redundant == ()

    def test_single_partition_not_equivalent(self):
        joint = make_joint(MIO3, labels=["a", "b", "c"])
        part = mk.CategoryPartition(joint.categories, [["a", "b"], ["c"]])
        report = mk.joint_submio_information(joint, [part])
        assert not report.equivalent_to_mio
        assert report.joint_informativeness is None

    def test_redundant_partition_flagged(self):
        joint = make_joint(np.diag([0.1, 0.3, 0.25, 0.35]),
                           labels=["a", "b", "c", "d"])
        s = joint.categories
        p1 = mk.CategoryPartition(s, [["a", "b"], ["c", "d"]])
        p2 = mk.CategoryPartition(s, [["a", "c"], ["b", "d"]])
        p3 = mk.CategoryPartition(s, [["a"], ["b"], ["c", "d"]])
        report = mk.joint_submio_information(joint, [p1, p2, p3])
        assert report.equivalent_to_mio
        # p1 ^ p2 is already discrete, so p3 adds nothing; p1 is likewise
        # implied by p2 ^ p3, while p2 is essential
        assert report.redundant == (0, 2)

    def test_failing_partition_named(self):
        joint = make_joint([[0.25, 0.25], [0.25, 0.25]])
        part = mk.CategoryPartition(joint.categories, [["a1"], ["a2"]])
        with pytest.raises(InvariantError, match="partition 0"):
            mk.joint_submio_information(joint, [part])


class TestMonotonicity:
    def test_coarse_graining_never_creates_information(self):
        rng = np.random.default_rng(37)
        for _ in range(20):
            joint = random_joint(rng, 4, 7, zero_fraction=0.25)
            base = mk.mutual_information(joint)
            for part in mk.enumerate_partitions(joint.categories):
                coarse = mk.coarse_grain_target(joint, part)
                assert mk.mutual_information(coarse) <= base + 1e-12

    def test_every_partition_of_random_mios(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            nj = int(rng.integers(2, 6))
            mio = random_mio(rng, nj, int(rng.integers(nj, 12)))
            for part in mk.enumerate_partitions(mio.categories):
                assert mk.check_sub_mio(mio, part, 1e-12).is_mio
