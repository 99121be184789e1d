"""Category partitions, target coarse-graining, and sub-MIO analysis.

A sub-maximally informative observable pins down not the exact category but
a block of a partition of the category set: the block-level conditional is
indicator-valued even though the category-level one is not. Several such
partitions taken together refine each other via the partition meet; when the
meet is discrete the family is jointly as informative as an MIO.

Partitions apply to the category set only; partitions of the grid arise
solely as the induced support regions.
"""

from __future__ import annotations

import numpy as np

from .errors import InternalConsistencyError, InvariantError
from .measures import info_report
from .mio import DEFAULT_MIO_TOL, check_mio
from .tables import CategorySpace, JointTable


class CategoryPartition:
    """A partition of a CategorySpace into ordered, disjoint, covering blocks."""

    __slots__ = ("space", "blocks")

    def __init__(self, space, blocks):
        if not isinstance(space, CategorySpace):
            space = CategorySpace(space)
        raw = [tuple(str(lab) for lab in block) for block in blocks]
        seen = set()
        problems = []
        for block in raw:
            if not block:
                raise InvariantError("partition blocks must be non-empty")
            for lab in block:
                if lab not in space:
                    problems.append(f"unknown label {lab!r}")
                elif lab in seen:
                    problems.append(f"label {lab!r} appears in more than one block")
                seen.add(lab)
        missing = [lab for lab in space if lab not in seen]
        if missing:
            problems.append("labels not covered: " + ", ".join(repr(m) for m in missing))
        if problems:
            raise InvariantError("invalid partition: " + "; ".join(problems))
        if not raw:
            raise InvariantError("partition must have at least one block")
        self.space = space
        # canonical within-block order: category declaration order
        self.blocks = tuple(
            tuple(sorted(set(block), key=space.index)) for block in raw)

    @property
    def n_blocks(self):
        return len(self.blocks)

    def block_labels(self):
        """Deterministic labels for the blocks: members joined with '+'.

        On the rare collision (a member label itself containing '+') an
        index suffix keeps labels unique.
        """
        labels = ["+".join(block) for block in self.blocks]
        if len(set(labels)) != len(labels):
            labels = [f"{lab}#{i}" for i, lab in enumerate(labels)]
        return labels

    def is_discrete(self):
        """True when every block is a singleton."""
        return all(len(block) == 1 for block in self.blocks)

    def as_block_sets(self):
        return frozenset(frozenset(block) for block in self.blocks)

    def block_of(self, label):
        for i, block in enumerate(self.blocks):
            if label in block:
                return i
        raise InvariantError(f"label {label!r} not in partition")

    def __eq__(self, other):
        return (isinstance(other, CategoryPartition)
                and self.space == other.space
                and self.as_block_sets() == other.as_block_sets())

    def __hash__(self):
        return hash((self.space, self.as_block_sets()))

    def __repr__(self):
        return f"CategoryPartition({[list(b) for b in self.blocks]!r})"


def singleton_partition(space):
    """The discrete partition: one block per category."""
    return CategoryPartition(space, [[lab] for lab in space])


def one_block_partition(space):
    """The coarsest partition: a single block holding every category."""
    return CategoryPartition(space, [list(space)])


def enumerate_partitions(space):
    """All partitions of the category set, deterministically ordered.

    Generated via restricted-growth strings; exhaustive enumeration is only
    sensible for a dozen categories or fewer.
    """
    labels = list(space)
    n = len(labels)
    code = [0] * n

    def emit():
        n_blocks = max(code) + 1
        blocks = [[] for _ in range(n_blocks)]
        for i, c in enumerate(code):
            blocks[c].append(labels[i])
        return CategoryPartition(space, blocks)

    while True:
        yield emit()
        # next restricted-growth string
        i = n - 1
        while i > 0:
            if code[i] <= max(code[:i]):
                code[i] += 1
                for j in range(i + 1, n):
                    code[j] = 0
                break
            i -= 1
        else:
            return


def coarse_grain_target(joint, partition):
    """Merge categories into partition blocks; the observable side is untouched."""
    if partition.space != joint.categories:
        raise InvariantError("partition is over a different category space")
    labels = partition.block_labels()
    rows = np.zeros((partition.n_blocks, joint.n_cells))
    for b, block in enumerate(partition.blocks):
        idx = [joint.categories.index(lab) for lab in block]
        rows[b] = joint.p[idx].sum(axis=0)
    return JointTable(CategorySpace(labels), joint.grid, rows)


def check_sub_mio(joint, partition, tolerance=DEFAULT_MIO_TOL):
    """Is the observable maximally informative about the partition blocks?"""
    return check_mio(coarse_grain_target(joint, partition), tolerance)


def join_partitions(first, second):
    """The meet (coarsest common refinement) of two partitions.

    Blocks are the non-empty pairwise intersections, ordered by the operands'
    block orders.
    """
    if first.space != second.space:
        raise InvariantError("cannot join partitions over mismatched category spaces")
    blocks = []
    for b1 in first.blocks:
        s1 = set(b1)
        for b2 in second.blocks:
            inter = [lab for lab in b2 if lab in s1]
            if inter:
                blocks.append(inter)
    return CategoryPartition(first.space, blocks)


class SubMioFamilyReport:
    """Joint assessment of a family of sub-MIO partitions.

    ``meet`` is the common refinement of all partitions;
    ``equivalent_to_mio`` says whether it is discrete (the family then pins
    down the exact category); ``redundant`` lists the indices of partitions
    whose removal leaves the meet unchanged.
    """

    __slots__ = ("verdicts", "per_partition_informativeness", "meet",
                 "equivalent_to_mio", "joint_informativeness", "redundant")

    def __init__(self, verdicts, per_partition_informativeness, meet,
                 equivalent_to_mio, joint_informativeness, redundant):
        self.verdicts = tuple(verdicts)
        self.per_partition_informativeness = tuple(per_partition_informativeness)
        self.meet = meet
        self.equivalent_to_mio = bool(equivalent_to_mio)
        self.joint_informativeness = joint_informativeness
        self.redundant = tuple(redundant)

    def to_dict(self):
        return {
            "verdicts": [v.to_dict() for v in self.verdicts],
            "per_partition_informativeness": list(self.per_partition_informativeness),
            "meet_blocks": [list(b) for b in self.meet.blocks],
            "equivalent_to_mio": self.equivalent_to_mio,
            "joint_informativeness": self.joint_informativeness,
            "redundant": list(self.redundant),
        }


def joint_submio_information(joint, partitions, tolerance=DEFAULT_MIO_TOL):
    """Assess what a family of sub-MIO partitions jointly reveals.

    Every partition must individually pass :func:`check_sub_mio` at the given
    tolerance. When the meet of the family is discrete, the family is
    declared equivalent to an MIO and the joint's own informativeness is
    checked against 1 - tolerance (a failure there is an internal
    inconsistency, since the block conditionals intersect to category
    conditionals).
    """
    partitions = list(partitions)
    if not partitions:
        raise InvariantError("need at least one partition")
    verdicts = []
    per_inf = []
    for i, part in enumerate(partitions):
        verdict = check_sub_mio(joint, part, tolerance)
        if not verdict.is_mio:
            raise InvariantError(
                f"partition {i} ({[list(b) for b in part.blocks]}) fails the "
                f"sub-MIO check: epsilon {verdict.epsilon:.6g} > {tolerance:g}")
        verdicts.append(verdict)
        per_inf.append(info_report(coarse_grain_target(joint, part)).informativeness)

    meet = partitions[0]
    for part in partitions[1:]:
        meet = join_partitions(meet, part)

    equivalent = meet.is_discrete()
    joint_inf = None
    if equivalent:
        joint_inf = info_report(joint).informativeness
        if joint_inf < 1.0 - tolerance:
            raise InternalConsistencyError(
                "a discrete-meet family of sub-MIOs certifies the joint as an MIO, "
                f"but its informativeness is {joint_inf!r} < 1 - {tolerance:g}")

    redundant = []
    for i in range(len(partitions)):
        rest = [p for j, p in enumerate(partitions) if j != i]
        if not rest:
            reduced = one_block_partition(joint.categories)
        else:
            reduced = rest[0]
            for part in rest[1:]:
                reduced = join_partitions(reduced, part)
        if reduced == meet:
            redundant.append(i)

    return SubMioFamilyReport(
        verdicts=verdicts,
        per_partition_informativeness=per_inf,
        meet=meet,
        equivalent_to_mio=equivalent,
        joint_informativeness=joint_inf,
        redundant=redundant,
    )
