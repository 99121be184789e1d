"""Category spaces, observable grids, and joint probability tables.

The target alphabet is a small ordered set of labels; the observable side is
a grid of discrete cells (one or more axes of strictly increasing cell-center
coordinates). A :class:`JointTable` stores the full joint mass over
(category, cell) pairs, dense and row-major; marginals and conditionals are
always recomputed from it, never cached.

All objects are immutable after construction and all operations are pure,
so everything here is safe to share across threads.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as kernels
from .errors import InvariantError

# Forgiving ingestion, strict algebra: constructors accept a 1e-9 total-mass
# slack and renormalize exactly; downstream identities are held to 1e-12.
# Totals already within a few ulp of 1 are left untouched (division by
# 1 +- 1ulp cannot improve them and would break byte-stable re-ingestion).
MASS_INGEST_TOL = 1e-9
MASS_ALGEBRA_TOL = 1e-12
MASS_RENORM_SKIP = 1e-14
MAX_TABLE_CELLS = 10_000_000


def _as_readonly(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


class CategorySpace:
    """Ordered alphabet of target category labels.

    Labels are unique, non-empty strings; iteration order is the declaration
    order and is stable across runs.
    """

    __slots__ = ("labels", "_index")

    def __init__(self, labels):
        labels = tuple(str(lab) for lab in labels)
        if not labels:
            raise InvariantError("category space must contain at least one label")
        if any(lab == "" for lab in labels):
            raise InvariantError("category labels must be non-empty")
        if len(set(labels)) != len(labels):
            raise InvariantError("category labels must be unique")
        self.labels = labels
        self._index = {lab: i for i, lab in enumerate(labels)}

    @property
    def size(self):
        return len(self.labels)

    def index(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise InvariantError(f"unknown category label {label!r}") from None

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label):
        return label in self._index

    def __eq__(self, other):
        return isinstance(other, CategorySpace) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"CategorySpace({list(self.labels)!r})"


class Axis:
    """One grid axis: a name and strictly increasing cell-center coordinates."""

    __slots__ = ("name", "cells", "_edges")

    def __init__(self, name, cells):
        cells = np.asarray(cells, dtype=np.float64)
        if cells.ndim != 1 or cells.size < 1:
            raise InvariantError(f"axis {name!r} needs at least one cell value")
        if not np.all(np.isfinite(cells)):
            raise InvariantError(f"axis {name!r} cell values must be finite")
        if cells.size > 1 and not np.all(np.diff(cells) > 0):
            raise InvariantError(f"axis {name!r} cell values must be strictly increasing")
        self.name = str(name)
        self.cells = _as_readonly(cells)
        self._edges = None

    def __len__(self):
        return self.cells.size

    @property
    def edges(self):
        """Cell boundaries (length+1): midpoints between centers, with the
        edge cells extended by half the adjacent gap (width 1 for a single
        cell). Defines the axis range for sample ingestion and the intervals
        used when splitting cells."""
        if self._edges is None:
            c = self.cells
            if c.size == 1:
                e = np.array([c[0] - 0.5, c[0] + 0.5])
            else:
                inner = (c[:-1] + c[1:]) / 2.0
                lo = c[0] - (c[1] - c[0]) / 2.0
                hi = c[-1] + (c[-1] - c[-2]) / 2.0
                e = np.concatenate([[lo], inner, [hi]])
            self._edges = _as_readonly(e)
        return self._edges

    def __eq__(self, other):
        return (isinstance(other, Axis) and self.name == other.name
                and self.cells.shape == other.cells.shape
                and bool(np.all(self.cells == other.cells)))

    def __hash__(self):
        return hash((self.name, self.cells.tobytes()))

    def __repr__(self):
        return f"Axis({self.name!r}, {len(self)} cells)"


class ObservableGrid:
    """Configuration space of the observable: an ordered list of axes.

    A cell is addressed either by a tuple of per-axis indices or by its flat
    index, row-major over axes in declaration order.
    """

    __slots__ = ("axes",)

    def __init__(self, axes):
        axes = tuple(axes)
        if not axes:
            raise InvariantError("grid must have at least one axis")
        if any(not isinstance(a, Axis) for a in axes):
            raise InvariantError("grid axes must be Axis instances")
        names = [a.name for a in axes]
        if len(set(names)) != len(names):
            raise InvariantError("grid axis names must be unique")
        self.axes = axes

    @property
    def shape(self):
        return tuple(len(a) for a in self.axes)

    @property
    def size(self):
        """Total cell count K (product of axis lengths)."""
        n = 1
        for a in self.axes:
            n *= len(a)
        return n

    @property
    def ndim(self):
        return len(self.axes)

    def flat_index(self, multi):
        multi = tuple(int(i) for i in multi)
        if len(multi) != self.ndim:
            raise InvariantError(f"cell index must have {self.ndim} components")
        for i, (ix, n) in enumerate(zip(multi, self.shape)):
            if not 0 <= ix < n:
                raise InvariantError(f"cell index {ix} out of range on axis {self.axes[i].name!r}")
        return int(np.ravel_multi_index(multi, self.shape))

    def multi_index(self, flat):
        flat = int(flat)
        if not 0 <= flat < self.size:
            raise InvariantError(f"flat cell index {flat} out of range for {self.size} cells")
        return tuple(int(i) for i in np.unravel_index(flat, self.shape))

    def cell_coords(self, flat):
        """Cell-center coordinates of a flat cell index."""
        multi = self.multi_index(flat)
        return tuple(float(a.cells[i]) for a, i in zip(self.axes, multi))

    def coords_matrix(self):
        """All cell-center coordinates as a (K, ndim) array in flat order."""
        grids = np.meshgrid(*[a.cells for a in self.axes], indexing="ij")
        return np.column_stack([g.ravel() for g in grids])

    def __eq__(self, other):
        return isinstance(other, ObservableGrid) and self.axes == other.axes

    def __hash__(self):
        return hash(self.axes)

    def __repr__(self):
        return f"ObservableGrid({' x '.join(f'{a.name}[{len(a)}]' for a in self.axes)})"


class Distribution:
    """Probability mass over a finite support, normalized at construction."""

    __slots__ = ("mass",)

    def __init__(self, mass):
        mass = np.asarray(mass, dtype=np.float64).ravel()
        if mass.size < 1:
            raise InvariantError("distribution needs at least one entry")
        if not np.all(np.isfinite(mass)):
            raise InvariantError("distribution entries must be finite")
        if np.any(mass < 0):
            raise InvariantError("distribution entries must be non-negative")
        total = kernels.sum_1d(mass)
        if abs(total - 1.0) > MASS_INGEST_TOL:
            raise InvariantError(
                f"distribution mass must sum to 1 within {MASS_INGEST_TOL:g} (got {total!r})")
        if abs(total - 1.0) > MASS_RENORM_SKIP:
            mass = mass / total
        self.mass = _as_readonly(mass)

    @property
    def support_size(self):
        return self.mass.size

    def __len__(self):
        return self.mass.size

    def __getitem__(self, i):
        return float(self.mass[i])

    def __repr__(self):
        return f"Distribution({self.mass.tolist()!r})"


class JointTable:
    """Joint mass p(category, cell) over a CategorySpace x ObservableGrid.

    Entries are non-negative; total mass must be 1 within 1e-9 at
    construction and is then renormalized exactly. Storage is dense
    row-major, capped at 10^7 entries.
    """

    __slots__ = ("categories", "grid", "p")

    def __init__(self, categories, grid, p):
        if not isinstance(categories, CategorySpace):
            categories = CategorySpace(categories)
        if not isinstance(grid, ObservableGrid):
            raise InvariantError("grid must be an ObservableGrid")
        nj, nk = categories.size, grid.size
        if nj * nk > MAX_TABLE_CELLS:
            raise InvariantError(
                f"table size {nj}x{nk} exceeds the dense-storage cap of {MAX_TABLE_CELLS} entries")
        p = np.asarray(p, dtype=np.float64)
        if p.size != nj * nk:
            raise InvariantError(
                f"joint table must have {nj}x{nk} entries (got {p.size})")
        p = p.reshape(nj, nk)
        if not np.all(np.isfinite(p)):
            raise InvariantError("joint table entries must be finite")
        if np.any(p < 0):
            raise InvariantError("joint table entries must be non-negative")
        total = kernels.sum_1d(p.ravel())
        if abs(total - 1.0) > MASS_INGEST_TOL:
            raise InvariantError(
                f"joint table mass must sum to 1 within {MASS_INGEST_TOL:g} (got {total!r})")
        if abs(total - 1.0) > MASS_RENORM_SKIP:
            p = p / total
        self.categories = categories
        self.grid = grid
        self.p = _as_readonly(p)

    @property
    def n_categories(self):
        return self.categories.size

    @property
    def n_cells(self):
        return self.grid.size

    def resolve_cell(self, cell):
        """Normalize a cell reference (flat index or per-axis tuple) to flat."""
        if isinstance(cell, (tuple, list)):
            return self.grid.flat_index(cell)
        cell = int(cell)
        if not 0 <= cell < self.n_cells:
            raise InvariantError(f"flat cell index {cell} out of range for {self.n_cells} cells")
        return cell

    def __repr__(self):
        return f"JointTable({self.n_categories} categories, {self.grid!r})"


class IdentificationFunction:
    """The conditional distribution of the target per observed cell.

    ``probs[:, k]`` is p(category | cell k) for cells with positive mass;
    columns at zero-mass cells are explicitly undefined (NaN), never
    zero-filled. ``cell_mass`` is the observable marginal, kept so the
    function alone supports mass-weighted summaries and plot tables.
    """

    __slots__ = ("categories", "grid", "probs", "cell_mass")

    def __init__(self, categories, grid, probs, cell_mass):
        probs = np.asarray(probs, dtype=np.float64)
        cell_mass = np.asarray(cell_mass, dtype=np.float64).ravel()
        if probs.shape != (categories.size, grid.size):
            raise InvariantError("identification table shape must be J x K")
        if cell_mass.size != grid.size:
            raise InvariantError("cell_mass must have one entry per grid cell")
        defined = cell_mass > 0.0
        col_sums = probs[:, defined].sum(axis=0) if defined.any() else np.empty(0)
        if col_sums.size and np.max(np.abs(col_sums - 1.0)) > MASS_ALGEBRA_TOL:
            raise InvariantError(
                f"defined identification columns must sum to 1 within {MASS_ALGEBRA_TOL:g}")
        self.categories = categories
        self.grid = grid
        self.probs = _as_readonly(probs)
        self.cell_mass = _as_readonly(cell_mass)

    @property
    def defined(self):
        """Boolean mask of cells where the conditional exists (p(cell) > 0)."""
        return self.cell_mass > 0.0

    def column(self, cell):
        """Conditional at one cell, or None where it is undefined."""
        k = self.grid.flat_index(cell) if isinstance(cell, (tuple, list)) else int(cell)
        if not 0 <= k < self.grid.size:
            raise InvariantError(f"flat cell index {k} out of range")
        if self.cell_mass[k] <= 0.0:
            return None
        return self.probs[:, k].copy()

    def __repr__(self):
        n_def = int(np.count_nonzero(self.defined))
        return f"IdentificationFunction({self.categories.size} categories, {n_def}/{self.grid.size} cells defined)"


class SampleSet:
    """Labeled observation records: (category label, coordinate vector).

    Carries the category space so downstream estimation has a fixed,
    declaration-ordered alphabet even when some labels never occur.
    """

    __slots__ = ("categories", "records")

    def __init__(self, categories, records):
        if not isinstance(categories, CategorySpace):
            categories = CategorySpace(categories)
        recs = []
        dim = None
        for i, (label, coords) in enumerate(records):
            if label not in categories:
                raise InvariantError(f"record {i}: unknown category label {label!r}")
            coords = tuple(float(x) for x in coords)
            if not coords:
                raise InvariantError(f"record {i}: coordinate vector is empty")
            if any(not np.isfinite(x) for x in coords):
                raise InvariantError(f"record {i}: coordinates must be finite")
            if dim is None:
                dim = len(coords)
            elif len(coords) != dim:
                raise InvariantError(
                    f"record {i}: coordinate dimension {len(coords)} != {dim}")
            recs.append((label, coords))
        self.categories = categories
        self.records = tuple(recs)

    @property
    def dimension(self):
        return len(self.records[0][1]) if self.records else 0

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def marginal_target(joint):
    """Marginal distribution of the target: row sums of the joint."""
    return Distribution(kernels.row_sums(joint.p))


def marginal_observable(joint):
    """Marginal distribution over grid cells: column sums of the joint."""
    return Distribution(kernels.col_sums(joint.p))


def condition_on_observable(joint):
    """Conditional p(category | cell) per grid cell.

    Cells with zero marginal mass get an explicitly undefined column.
    """
    mass = kernels.col_sums(joint.p)
    defined = mass > 0.0
    probs = np.full_like(joint.p, np.nan)
    if defined.any():
        probs[:, defined] = joint.p[:, defined] / mass[defined]
    return IdentificationFunction(joint.categories, joint.grid, probs, mass)


def condition_on_target(joint, category):
    """Conditional p(cell | category) for one category label."""
    j = joint.categories.index(category)
    row = joint.p[j]
    total = kernels.sum_1d(row)
    if total <= 0.0:
        raise InvariantError(f"category {category!r} has zero mass")
    return Distribution(row / total)


def estimate_joint(samples, grid):
    """Relative-frequency joint table from labeled samples on a grid.

    Each coordinate is assigned to the nearest cell center on its axis,
    ties going to the lower index. Coordinates outside the axis range
    (cell edges extended half a cell beyond the extreme centers) are an
    error naming the record index and axis.
    """
    if len(samples) == 0:
        raise InvariantError("sample set must be non-empty")
    if samples.dimension != grid.ndim:
        raise InvariantError(
            f"samples have {samples.dimension} coordinates but grid has {grid.ndim} axes")
    coords = np.array([rec[1] for rec in samples.records], dtype=np.float64)
    idx = np.empty((len(samples), grid.ndim), dtype=np.int64)
    for d, axis in enumerate(grid.axes):
        x = coords[:, d]
        lo, hi = axis.edges[0], axis.edges[-1]
        bad = np.nonzero((x < lo) | (x > hi))[0]
        if bad.size:
            i = int(bad[0])
            raise InvariantError(
                f"record {i}: coordinate {x[i]!r} outside the range "
                f"[{lo!r}, {hi!r}] of axis {axis.name!r}")
        c = axis.cells
        pos = np.searchsorted(c, x)
        pos = np.clip(pos, 1, c.size - 1) if c.size > 1 else np.zeros_like(pos)
        if c.size > 1:
            d_lower = x - c[pos - 1]
            d_upper = c[pos] - x
            idx[:, d] = np.where(d_lower <= d_upper, pos - 1, pos)
        else:
            idx[:, d] = 0
    flat = np.ravel_multi_index(tuple(idx.T), grid.shape)
    cat_idx = np.array([samples.categories.index(lab) for lab, _ in samples.records])
    counts = np.bincount(cat_idx * grid.size + flat,
                         minlength=samples.categories.size * grid.size)
    return JointTable(samples.categories, grid, counts.astype(np.float64) / len(samples))


def fine_grain(joint, axis, factor, profile=None):
    """Split every cell of one axis into ``factor`` sub-cells.

    Each cell's mass is distributed across its sub-cells by ``profile``
    (length ``factor``, non-negative, summing to 1; default uniform), the
    same profile for every cell and category, so the refinement carries no
    information about the target. Total mass is preserved.
    """
    axis = int(axis)
    if not 0 <= axis < joint.grid.ndim:
        raise InvariantError(f"axis index {axis} out of range for {joint.grid.ndim} axes")
    factor = int(factor)
    if factor < 2:
        raise InvariantError(f"split factor must be >= 2 (got {factor})")
    if profile is None:
        profile = np.full(factor, 1.0 / factor)
    else:
        profile = np.asarray(profile, dtype=np.float64).ravel()
        if profile.size != factor:
            raise InvariantError("within-cell profile must have one entry per sub-cell")
        if np.any(profile < 0) or not np.all(np.isfinite(profile)):
            raise InvariantError("within-cell profile entries must be non-negative and finite")
        total = kernels.sum_1d(profile)
        if abs(total - 1.0) > MASS_INGEST_TOL:
            raise InvariantError(
                f"within-cell profile must sum to 1 within {MASS_INGEST_TOL:g}")
        profile = profile / total

    old_axis = joint.grid.axes[axis]
    edges = old_axis.edges
    widths = np.diff(edges)
    offsets = (np.arange(factor) + 0.5) / factor
    new_cells = (edges[:-1, None] + widths[:, None] * offsets[None, :]).ravel()
    new_axes = list(joint.grid.axes)
    new_axes[axis] = Axis(old_axis.name, new_cells)
    new_grid = ObservableGrid(new_axes)

    shaped = joint.p.reshape((joint.n_categories,) + joint.grid.shape)
    moved = np.moveaxis(shaped, axis + 1, -1)
    split = moved[..., :, None] * profile
    split = split.reshape(moved.shape[:-1] + (moved.shape[-1] * factor,))
    new_p = np.moveaxis(split, -1, axis + 1)
    return JointTable(joint.categories, new_grid, new_p.reshape(joint.n_categories, -1))
