"""Independent oracles and corpus utilities shared across the test suite.

The oracles here deliberately recompute everything from first principles
(math.fsum over explicitly constructed terms) so they share no code with the
package's kernel layer.
"""

import math
from itertools import combinations
from pathlib import Path

import numpy as np

from miokit import Axis, CategorySpace, JointTable, ObservableGrid
from miokit.decoding import _prefix_tables
from miokit import _kernels

SAMPLE_DATA = Path(__file__).resolve().parent.parent / "sample_data"


def make_joint(p, labels=None, cells=None):
    """JointTable from a 2-d array on a single-axis grid."""
    p = np.asarray(p, dtype=float)
    nj, nk = p.shape
    if labels is None:
        labels = [f"a{j + 1}" for j in range(nj)]
    if cells is None:
        cells = np.arange(nk, dtype=float)
    grid = ObservableGrid([Axis("x", cells)])
    return JointTable(CategorySpace(labels), grid, p)


def entropy_oracle(mass):
    """Deficit entropy sum(p ln p), straight from the definition."""
    return math.fsum(p * math.log(p) for p in np.asarray(mass).ravel() if p > 0)


def mutual_information_oracle(p):
    """Brute force sum p ln(p / (p_row p_col)) over all cells."""
    p = np.asarray(p, dtype=float)
    rows = p.sum(axis=1)
    cols = p.sum(axis=0)
    terms = []
    for j in range(p.shape[0]):
        for k in range(p.shape[1]):
            if p[j, k] > 0:
                terms.append(p[j, k] * math.log(p[j, k] / (rows[j] * cols[k])))
    return math.fsum(terms)


def residual_oracle(column):
    """Residual entropy of one conditional column."""
    column = np.asarray(column, dtype=float)
    m = math.fsum(column)
    return math.fsum((v / m) * math.log(v / m) for v in column if v > 0)


def expected_residual_oracle(p):
    """Mass-weighted residual entropy, skipping zero-mass columns."""
    p = np.asarray(p, dtype=float)
    terms = []
    for k in range(p.shape[1]):
        m = math.fsum(p[:, k])
        if m > 0:
            terms.append(m * residual_oracle(p[:, k]))
    return math.fsum(terms)


def brute_force_boundaries(joint, max_cuts):
    """Enumerate every cut placement with 0..max_cuts cuts and pick the best.

    Placement values are accumulated right to left (last segment first) so a
    placement's value is float-identical to the suffix recursion the package
    optimizes over; tie-breaking is fewer cuts first, then lexicographically
    smallest cut tuple (combinations already enumerates in that order).
    Returns (value, cut_cells, segment_labels).
    """
    cat_prefix, mass_prefix, target = _prefix_tables(joint)

    def gain(a, b):
        return _kernels.segment_gain(cat_prefix, mass_prefix, target, a, b)

    n = joint.n_cells
    best = None
    for n_cuts in range(0, min(max_cuts, n - 1) + 1):
        for cuts in combinations(range(1, n), n_cuts):
            bounds = [0, *cuts, n]
            value = 0.0
            for a, b in reversed(list(zip(bounds[:-1], bounds[1:]))):
                value = gain(a, b) + value
            if best is None or value > best[0]:
                best = (value, cuts)
    value, cuts = best
    bounds = [0, *cuts, n]
    labels = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        block = cat_prefix[:, b] - cat_prefix[:, a]
        labels.append(joint.categories.labels[int(np.argmax(block))])
    return value, tuple(cuts), tuple(labels)
