"""Synthetic categorical-perception experiments.

Each category produces observations through a unimodal squared-exponential
bump discretized onto the grid; a single width knob per axis controls how
much neighboring categories overlap, i.e. how categorical the resulting
identification function is. The sampled coordinates are cell centers: the
grid itself is the sampling resolution, with no sub-cell jitter.

Every experiment is a pure function of its config (including the seed); the
PRNG algorithm is recorded in the result so runs stay reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .decoding import boundary_search_1d
from .errors import InvariantError
from .measures import info_report
from .mio import DEFAULT_MIO_TOL, check_mio, identification_function
from .tables import (CategorySpace, Distribution, JointTable, ObservableGrid,
                     SampleSet, estimate_joint)


@dataclass(frozen=True)
class CategoryModel:
    """Unimodal bump: a center coordinate and a width per grid axis."""

    center: tuple
    width: tuple

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "width", tuple(float(w) for w in self.width))
        if len(self.center) != len(self.width):
            raise InvariantError("model center and width must have one entry per axis")
        if any(w <= 0 for w in self.width):
            raise InvariantError("model widths must be positive")


class ExperimentConfig:
    """Full specification of one synthetic experiment."""

    __slots__ = ("categories", "prior", "grid", "models", "sample_count", "seed")

    def __init__(self, categories, prior, grid, models, sample_count, seed):
        if not isinstance(categories, CategorySpace):
            categories = CategorySpace(categories)
        if not isinstance(prior, Distribution):
            prior = Distribution(prior)
        if len(prior) != categories.size:
            raise InvariantError(
                f"prior has {len(prior)} entries for {categories.size} categories")
        if not isinstance(grid, ObservableGrid):
            raise InvariantError("grid must be an ObservableGrid")
        norm_models = {}
        for label in categories:
            if label not in models:
                raise InvariantError(f"no model given for category {label!r}")
            model = models[label]
            if not isinstance(model, CategoryModel):
                model = CategoryModel(tuple(model[0]), tuple(model[1]))
            if len(model.center) != grid.ndim:
                raise InvariantError(
                    f"model for {label!r} has {len(model.center)} coordinates "
                    f"but the grid has {grid.ndim} axes")
            for d, axis in enumerate(grid.axes):
                lo, hi = axis.edges[0], axis.edges[-1]
                if not lo <= model.center[d] <= hi:
                    raise InvariantError(
                        f"model center for {label!r} lies outside axis {axis.name!r} "
                        f"range [{lo!r}, {hi!r}]")
            norm_models[label] = model
        sample_count = int(sample_count)
        if sample_count < 1:
            raise InvariantError(f"sample count must be >= 1 (got {sample_count})")
        self.categories = categories
        self.prior = prior
        self.grid = grid
        self.models = norm_models
        self.sample_count = sample_count
        self.seed = int(seed)


def _discretized_model(grid, model):
    """Bump weights at every cell center, normalized to a distribution."""
    coords = grid.coords_matrix()
    z = (coords - np.asarray(model.center)) / np.asarray(model.width)
    weights = np.exp(-0.5 * np.sum(z * z, axis=1))
    total = kernels.sum_1d(weights)
    if not total > 0.0:
        raise InvariantError(
            "degenerate model: all discretized mass underflowed to zero")
    return weights / total


def build_true_joint(config):
    """Analytic joint: prior(category) times the category's discretized model."""
    rows = np.empty((config.categories.size, config.grid.size))
    for j, label in enumerate(config.categories):
        rows[j] = config.prior.mass[j] * _discretized_model(config.grid, config.models[label])
    return JointTable(config.categories, config.grid, rows)


PRNG_ALGORITHM = "numpy:PCG64"


def sample_experiment(config):
    """Seeded draws from the experiment: category from the prior, then a cell
    from that category's model, emitted as the cell-center coordinates.

    The same seed and config produce the identical SampleSet, byte for byte
    when serialized.
    """
    rng = np.random.default_rng(config.seed)
    n = config.sample_count
    cats = rng.choice(config.categories.size, size=n, p=config.prior.mass)
    u = rng.random(n)
    cells = np.empty(n, dtype=np.int64)
    for j, label in enumerate(config.categories):
        mask = cats == j
        if not mask.any():
            continue
        cdf = np.cumsum(_discretized_model(config.grid, config.models[label]))
        cells[mask] = np.minimum(np.searchsorted(cdf, u[mask], side="right"),
                                 config.grid.size - 1)
    records = [(config.categories.labels[cats[i]], config.grid.cell_coords(cells[i]))
               for i in range(n)]
    return SampleSet(config.categories, records)


@dataclass(frozen=True)
class ExperimentResult:
    """Everything one experiment run produces.

    The identification function and (for 1-D grids) the boundary set are
    computed from the analytic joint; the sample-estimated joint ships
    alongside with its own report and verdict.
    """

    config: ExperimentConfig
    true_joint: JointTable
    estimated_joint: JointTable
    samples: SampleSet
    true_report: object
    estimated_report: object
    identification: object
    true_verdict: object
    estimated_verdict: object
    boundaries: object
    prng: str


def run_experiment(config, mio_tolerance=DEFAULT_MIO_TOL):
    """Run the full pipeline: analytic joint, seeded samples, estimation,
    information reports, MIO verdicts, and 1-D boundary search."""
    true_joint = build_true_joint(config)
    samples = sample_experiment(config)
    estimated = estimate_joint(samples, config.grid)
    boundaries = None
    if config.grid.ndim == 1:
        boundaries = boundary_search_1d(true_joint, max(config.categories.size - 1, 0))
    return ExperimentResult(
        config=config,
        true_joint=true_joint,
        estimated_joint=estimated,
        samples=samples,
        true_report=info_report(true_joint),
        estimated_report=info_report(estimated),
        identification=identification_function(true_joint),
        true_verdict=check_mio(true_joint, mio_tolerance),
        estimated_verdict=check_mio(estimated, mio_tolerance),
        boundaries=boundaries,
        prng=PRNG_ALGORITHM,
    )


def categoricality_index(ident, threshold):
    """Mass-weighted fraction of defined cells whose identification column
    peaks at or above ``threshold``.

    1.0 means every observed cell names its category with at least the given
    confidence; thresholds at or below 0.5 would not single out one category
    and are rejected.
    """
    threshold = float(threshold)
    if not 0.5 < threshold <= 1.0:
        raise InvariantError(f"threshold must be in (0.5, 1] (got {threshold})")
    defined = ident.defined
    if not defined.any():
        return 0.0
    peaks = ident.probs[:, defined].max(axis=0)
    mass = ident.cell_mass[defined]
    return kernels.sum_1d(mass[peaks >= threshold])
