"""Decoding the target from observed cells: MAP decisions, achieved
information, 1-D boundary search, and axis projection ("shadow") analysis.

A decoder is a deterministic map from positive-mass cells to category
labels. MAP decoding attains accuracy 1 exactly on maximally informative
observables; any decoder's achieved information is bounded by the mutual
information of the joint (data processing), which the projection and
boundary operations here make directly observable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .errors import InvariantError
from .tables import JointTable, Axis, ObservableGrid
from .measures import mutual_information

# How a decoder answers at a cell that carried no probability mass: walk to
# the nearest positive-mass cell by flat index, preferring the lower index
# on ties. Recorded on every decoder and surfaced in reports.
NEAREST_CELL_POLICY = "nearest-positive-cell-by-flat-index-lower-on-ties"


@dataclass(frozen=True)
class Decoder:
    """Cell-to-category decision map, defined exactly on positive-mass cells.

    ``decision[k]`` is a category label, or None where the cell has zero
    mass; ``policy`` names the fallback rule used when such a cell must be
    answered anyway.
    """

    categories: tuple
    decision: tuple
    policy: str = NEAREST_CELL_POLICY

    def __post_init__(self):
        for lab in self.decision:
            if lab is not None and lab not in self.categories:
                raise InvariantError(f"decoder decision {lab!r} is not a known category")
        if all(lab is None for lab in self.decision):
            raise InvariantError("decoder has no defined cells")

    def decide(self, cell):
        """Decision at a cell, applying the undefined-cell policy if needed."""
        k = int(cell)
        if not 0 <= k < len(self.decision):
            raise InvariantError(f"flat cell index {k} out of range")
        if self.decision[k] is not None:
            return self.decision[k]
        defined = [i for i, lab in enumerate(self.decision) if lab is not None]
        nearest = min(defined, key=lambda i: (abs(i - k), i))
        return self.decision[nearest]

    def to_dict(self):
        return {
            "policy": self.policy,
            "decision": list(self.decision),
        }


@dataclass(frozen=True)
class BoundarySet:
    """Category boundaries on a single axis.

    ``cuts`` are real coordinates (midpoints between adjacent cell centers),
    strictly ascending and inside the axis range; ``segments`` holds one
    category label per contiguous segment (len(cuts) + 1 of them).
    ``cut_cells`` are the matching cell indices at which new segments start.
    """

    axis: str
    cuts: tuple
    segments: tuple
    cut_cells: tuple

    def __post_init__(self):
        if len(self.segments) != len(self.cuts) + 1:
            raise InvariantError("boundary set needs exactly one more segment than cuts")
        if any(b <= a for a, b in zip(self.cuts, self.cuts[1:])):
            raise InvariantError("cut positions must be strictly ascending")
        if len(self.cut_cells) != len(self.cuts):
            raise InvariantError("cut_cells must parallel cuts")

    def to_dict(self):
        return {
            "axis": self.axis,
            "cuts": list(self.cuts),
            "segments": list(self.segments),
        }


def map_decoder(joint):
    """Maximum-a-posteriori decoder: each positive-mass cell maps to the
    category with the largest conditional (ties to the lowest index)."""
    mass = kernels.col_sums(joint.p)
    winners = np.argmax(joint.p, axis=0)
    decision = tuple(
        joint.categories.labels[winners[k]] if mass[k] > 0.0 else None
        for k in range(joint.n_cells))
    return Decoder(categories=joint.categories.labels, decision=decision)


def _check_decoder(joint, decoder):
    if len(decoder.decision) != joint.n_cells:
        raise InvariantError(
            f"decoder covers {len(decoder.decision)} cells, joint has {joint.n_cells}")
    mass = kernels.col_sums(joint.p)
    for k in range(joint.n_cells):
        if mass[k] > 0.0 and decoder.decision[k] is None:
            raise InvariantError(f"decoder undefined at positive-mass cell {k}")
    return mass


def decoder_accuracy(joint, decoder):
    """Probability that the decoder names the true category."""
    mass = _check_decoder(joint, decoder)
    picked = np.zeros(joint.n_cells)
    for k in range(joint.n_cells):
        if mass[k] > 0.0:
            picked[k] = joint.p[joint.categories.index(decoder.decision[k]), k]
    return kernels.sum_1d(picked)


def decoder_information(joint, decoder):
    """Mutual information between the target and the decoder's output.

    Computed on the induced joint over (category, decision); never exceeds
    the mutual information of the original joint.
    """
    _check_decoder(joint, decoder)
    nj = joint.n_categories
    induced = np.zeros((nj, nj))
    dec_idx = np.array([
        joint.categories.index(lab) if lab is not None else -1
        for lab in decoder.decision])
    for d in range(nj):
        cells = np.nonzero(dec_idx == d)[0]
        if cells.size:
            induced[:, d] = joint.p[:, cells].sum(axis=1)
    decision_grid = ObservableGrid([Axis("decision", np.arange(nj, dtype=float))])
    return mutual_information(JointTable(joint.categories, decision_grid, induced))


def _prefix_tables(joint):
    """Shared prefix sums for segment scoring; cell order is axis order."""
    cat_prefix = np.concatenate(
        [np.zeros((joint.n_categories, 1)), np.cumsum(joint.p, axis=1)], axis=1)
    mass_prefix = np.concatenate([[0.0], np.cumsum(kernels.col_sums(joint.p))])
    return cat_prefix, mass_prefix, kernels.row_sums(joint.p)


def segment_information_gain(joint, start, stop):
    """Information contributed by grouping the 1-D cells [start, stop) into
    one decision segment. Summing the gains of a full segmentation gives the
    mutual information between the target and the segment index."""
    if joint.grid.ndim != 1:
        raise InvariantError("segment scoring needs a single-axis grid")
    start, stop = int(start), int(stop)
    if not 0 <= start < stop <= joint.n_cells:
        raise InvariantError(f"segment [{start}, {stop}) out of range")
    cat_prefix, mass_prefix, target = _prefix_tables(joint)
    return kernels.segment_gain(cat_prefix, mass_prefix, target, start, stop)


def boundary_search_1d(joint, max_cuts):
    """Optimal contiguous segmentation of a single-axis grid.

    Exhaustive dynamic-programming search over cut placements between
    adjacent cells, maximizing the information the segmentation carries about
    the target. Deterministic: value ties prefer fewer cuts, then the
    leftmost (lexicographically smallest) cut positions. Each returned
    segment is labeled with its MAP category.
    """
    if joint.grid.ndim != 1:
        raise InvariantError(
            "boundary search needs a single-axis grid; use project_axis first")
    max_cuts = int(max_cuts)
    if max_cuts < joint.n_categories - 1:
        raise InvariantError(
            f"max cuts must be at least J - 1 = {joint.n_categories - 1} (got {max_cuts})")
    cat_prefix, mass_prefix, target = _prefix_tables(joint)
    _, cut_cells = kernels.dp_segments(cat_prefix, mass_prefix, target, max_cuts + 1)
    cut_cells = [int(c) for c in cut_cells]

    cells = joint.grid.axes[0].cells
    cuts = tuple(float((cells[c - 1] + cells[c]) / 2.0) for c in cut_cells)
    bounds = [0, *cut_cells, joint.n_cells]
    segments = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        block_mass = cat_prefix[:, b] - cat_prefix[:, a]
        segments.append(joint.categories.labels[int(np.argmax(block_mass))])
    return BoundarySet(axis=joint.grid.axes[0].name, cuts=cuts,
                       segments=tuple(segments), cut_cells=tuple(cut_cells))


def segment_decoder(joint, boundaries):
    """Decoder induced by a boundary set: each cell answers its segment's label."""
    if joint.grid.ndim != 1:
        raise InvariantError("segment decoding needs a single-axis grid")
    mass = kernels.col_sums(joint.p)
    bounds = [0, *boundaries.cut_cells, joint.n_cells]
    decision = [None] * joint.n_cells
    for label, (a, b) in zip(boundaries.segments, zip(bounds[:-1], bounds[1:])):
        for k in range(a, b):
            if mass[k] > 0.0:
                decision[k] = label
    return Decoder(categories=joint.categories.labels, decision=tuple(decision))


def project_axis(joint, keep_axis):
    """Collapse a multi-axis grid onto one axis by summing out the others.

    The projection is the observable's shadow: its mutual information with
    the target never exceeds the original's, and can drop all the way to
    zero even when the original is maximally informative.
    """
    if joint.grid.ndim < 2:
        raise InvariantError("projection needs a multi-axis grid")
    keep_axis = int(keep_axis)
    if not 0 <= keep_axis < joint.grid.ndim:
        raise InvariantError(
            f"axis index {keep_axis} out of range for {joint.grid.ndim} axes")
    shaped = joint.p.reshape((joint.n_categories,) + joint.grid.shape)
    drop = tuple(d + 1 for d in range(joint.grid.ndim) if d != keep_axis)
    new_p = shaped.sum(axis=drop)
    new_grid = ObservableGrid([joint.grid.axes[keep_axis]])
    return JointTable(joint.categories, new_grid, new_p)
