"""Seeded random tables for tests, property corpora, and benchmarks.

Everything is a pure function of the passed ``numpy.random.Generator``, so a
corpus is reproducible from a single seed.
"""

from __future__ import annotations

import numpy as np

from .errors import InvariantError
from .tables import Axis, CategorySpace, Distribution, JointTable, ObservableGrid


def unit_grid(n_cells, name="x"):
    """Single-axis grid with integer-valued cell centers 0 .. n_cells-1."""
    return ObservableGrid([Axis(name, np.arange(n_cells, dtype=float))])


def default_categories(n):
    return CategorySpace([f"a{j + 1}" for j in range(n)])


def random_joint(rng, n_categories, n_cells, zero_fraction=0.0):
    """Random dense joint table on a 1-D grid.

    ``zero_fraction`` sprinkles exact zeros so conditionals with partial
    support get exercised too.
    """
    weights = rng.random((n_categories, n_cells))
    if zero_fraction > 0.0:
        weights[rng.random((n_categories, n_cells)) < zero_fraction] = 0.0
        if not weights.any():
            weights[0, 0] = 1.0
    return JointTable(default_categories(n_categories), unit_grid(n_cells),
                      weights / weights.sum())


def random_mio(rng, n_categories, n_cells):
    """Random exact MIO: disjoint per-category supports covering every cell.

    Each category owns at least one cell and every cell carries positive
    mass, so perturbing any zero entry genuinely breaks maximal
    informativeness.
    """
    if n_cells < n_categories:
        raise InvariantError("an MIO with disjoint supports needs at least one cell per category")
    owner = np.empty(n_cells, dtype=np.int64)
    perm = rng.permutation(n_cells)
    owner[perm[:n_categories]] = np.arange(n_categories)
    owner[perm[n_categories:]] = rng.integers(0, n_categories, size=n_cells - n_categories)
    mass = rng.random(n_cells) + 0.05
    p = np.zeros((n_categories, n_cells))
    p[owner, np.arange(n_cells)] = mass
    return JointTable(default_categories(n_categories), unit_grid(n_cells),
                      p / mass.sum())


def random_positive_prior(rng, n):
    """Strictly positive prior over n categories."""
    weights = rng.random(n) + 0.1
    return Distribution(weights / weights.sum())
