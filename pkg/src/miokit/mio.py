"""Maximal-informativeness analysis: verdicts, regions, models, repriors.

An observable is maximally informative (an MIO) exactly when the expected
residual entropy about the target vanishes, equivalently when every defined
identification column is an indicator (0/1) vector. Floating point and
estimated tables need a tolerance, so the working notion is the epsilon-MIO:
|expected residual entropy| <= tolerance, default 1e-9 nats.

Zero-mass cells are excluded from the verdict (they carry no observations)
and are reported in ``RegionSet.uncovered`` rather than assigned arbitrarily.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .errors import InvariantError, NotMioError
from .tables import Distribution, JointTable, condition_on_observable

DEFAULT_MIO_TOL = 1e-9


@dataclass(frozen=True)
class MioVerdict:
    """Outcome of a maximal-informativeness check.

    ``epsilon`` is |expected residual entropy| in nats; ``worst_cell`` is the
    flat index of the positive-mass cell contributing most to it (ties to the
    lowest index).
    """

    is_mio: bool
    epsilon: float
    worst_cell: int
    tolerance_used: float

    def to_dict(self):
        return {
            "is_mio": self.is_mio,
            "epsilon": self.epsilon,
            "worst_cell": self.worst_cell,
            "tolerance_used": self.tolerance_used,
        }


@dataclass(frozen=True)
class RegionSet:
    """Support regions of each category over the grid.

    ``regions`` maps every category label to the ascending flat indices of
    the cells it claims; regions are pairwise disjoint and may well be
    disconnected. ``uncovered`` holds the cells assigned to no category
    (zero mass, or mass at or below the extraction floor). ``components``
    counts orthogonal-adjacency connected pieces per region - reported as
    metadata, never enforced.
    """

    regions: dict
    uncovered: tuple
    components: dict

    def to_dict(self):
        return {
            "regions": {lab: list(cells) for lab, cells in self.regions.items()},
            "uncovered": list(self.uncovered),
            "components": dict(self.components),
        }


def check_mio(joint, tolerance=DEFAULT_MIO_TOL):
    """Decide whether the joint's observable is an epsilon-MIO for the target."""
    tolerance = float(tolerance)
    if tolerance < 0:
        raise InvariantError(f"tolerance must be >= 0 (got {tolerance})")
    mass, residual = kernels.column_residuals(joint.p)
    epsilon = abs(kernels.dot_1d(mass, residual))
    contributions = mass * np.abs(residual)
    worst = int(np.argmax(contributions))
    if contributions[worst] == 0.0:
        # exact MIO: no cell contributes; report the first positive-mass cell
        worst = int(np.argmax(mass > 0.0))
    return MioVerdict(
        is_mio=bool(epsilon <= tolerance),
        epsilon=float(epsilon),
        worst_cell=worst,
        tolerance_used=tolerance,
    )


def identification_function(joint):
    """Conditional p(category | cell) per cell; one-hot columns for an exact MIO."""
    return condition_on_observable(joint)


def _component_count(grid, cells):
    """Connected components of a cell set under orthogonal grid adjacency."""
    if not cells:
        return 0
    remaining = set(cells)
    shape = grid.shape
    count = 0
    while remaining:
        count += 1
        stack = [remaining.pop()]
        while stack:
            flat = stack.pop()
            multi = np.unravel_index(flat, shape)
            for d in range(len(shape)):
                for step in (-1, 1):
                    ix = multi[d] + step
                    if not 0 <= ix < shape[d]:
                        continue
                    neighbor_multi = list(multi)
                    neighbor_multi[d] = ix
                    neighbor = int(np.ravel_multi_index(neighbor_multi, shape))
                    if neighbor in remaining:
                        remaining.remove(neighbor)
                        stack.append(neighbor)
    return count


def support_regions(joint, mass_floor=0.0, tolerance=DEFAULT_MIO_TOL):
    """Partition the grid into per-category support regions of an epsilon-MIO.

    Cells with marginal mass <= ``mass_floor`` go to ``uncovered``; every
    other cell is claimed by the category with the maximal conditional
    (ties break to the lowest category index, deterministic).
    """
    mass_floor = float(mass_floor)
    if mass_floor < 0:
        raise InvariantError(f"mass floor must be >= 0 (got {mass_floor})")
    verdict = check_mio(joint, tolerance)
    if not verdict.is_mio:
        raise NotMioError(
            "support extraction requires an (epsilon-)MIO: expected residual "
            f"entropy magnitude {verdict.epsilon:.6g} exceeds tolerance "
            f"{verdict.tolerance_used:g}", verdict)
    mass = kernels.col_sums(joint.p)
    covered = mass > mass_floor
    winners = np.argmax(joint.p, axis=0)
    regions = {}
    for j, label in enumerate(joint.categories):
        cells = np.nonzero(covered & (winners == j))[0]
        regions[label] = tuple(int(c) for c in cells)
    uncovered = tuple(int(c) for c in np.nonzero(~covered)[0])
    components = {lab: _component_count(joint.grid, cells)
                  for lab, cells in regions.items()}
    return RegionSet(regions=regions, uncovered=uncovered, components=components)


def model_distributions(joint, tolerance=DEFAULT_MIO_TOL):
    """Per-category model p(cell | category) of an epsilon-MIO.

    Within the category's support region the model equals the observable
    marginal rescaled by 1/p(category); it is zero elsewhere. Every category
    must have positive mass.
    """
    target_mass = kernels.row_sums(joint.p)
    for j, label in enumerate(joint.categories):
        if target_mass[j] <= 0.0:
            raise InvariantError(f"category {label!r} has zero mass")
    regions = support_regions(joint, 0.0, tolerance)
    cell_mass = kernels.col_sums(joint.p)
    models = {}
    for j, label in enumerate(joint.categories):
        vec = np.zeros(joint.n_cells)
        cells = list(regions.regions[label])
        if cells:
            vec[cells] = cell_mass[cells] / target_mass[j]
        models[label] = Distribution(vec)
    return models


def verify_mass_matching(joint, regions):
    """Per-category |region mass - category mass| gaps.

    For an exact MIO the observable mass inside each category's region equals
    the category's own probability, so every gap is ~0; gaps quantify how far
    an approximate table is from that partition property.
    """
    if set(regions.regions) != set(joint.categories.labels):
        raise InvariantError("region labels do not match the joint's categories")
    cell_mass = kernels.col_sums(joint.p)
    target_mass = kernels.row_sums(joint.p)
    gaps = {}
    for j, label in enumerate(joint.categories):
        cells = regions.regions[label]
        for c in cells:
            if not 0 <= c < joint.n_cells:
                raise InvariantError(
                    f"region for {label!r} references cell {c} outside the grid")
        region_mass = kernels.sum_1d(cell_mass[list(cells)]) if cells else 0.0
        gaps[label] = abs(region_mass - target_mass[j])
    return gaps


def reprior(joint, new_prior):
    """Rebuild the joint with a new target prior and unchanged models.

    p'(category, cell) = p(cell | category) * prior'(category). For an MIO
    this leaves the identification function's indicator pattern untouched -
    the key invariance that makes such observables reusable across ensembles.
    """
    if not isinstance(new_prior, Distribution):
        new_prior = Distribution(new_prior)
    if len(new_prior) != joint.n_categories:
        raise InvariantError(
            f"new prior has {len(new_prior)} entries for {joint.n_categories} categories")
    target_mass = kernels.row_sums(joint.p)
    new_p = np.zeros_like(joint.p)
    for j, label in enumerate(joint.categories):
        prior_j = new_prior.mass[j]
        if target_mass[j] <= 0.0:
            if prior_j > 0.0:
                raise InvariantError(
                    f"new prior is positive for category {label!r} whose model is "
                    "undefined (zero mass in the original joint)")
            continue
        if prior_j <= 0.0:
            raise InvariantError(
                f"new prior must be positive for category {label!r} "
                "(positive mass in the original joint)")
        new_p[j] = joint.p[j] * (prior_j / target_mass[j])
    return JointTable(joint.categories, joint.grid, new_p)
