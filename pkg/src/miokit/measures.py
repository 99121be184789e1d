"""Entropy and mutual-information measures in the information-deficit convention.

Entropy here is E = sum p ln p, which is <= 0: it quantifies the deficit of
information prior to observation, and certainty corresponds to E = 0. All
values are in nats (natural log); 0 ln 0 is 0 throughout. Consequences used
everywhere below:

* residual entropy at a cell:  E(A|w) = sum_a p(a|w) ln p(a|w)
* expected residual entropy:   E(A|W) = sum_w p(w) E(A|w)      (zero-mass
  cells are skipped: they are a measure-zero set)
* mutual information:          I(A|W) = E(A|W) - E(A)  >=  0

``mutual_information`` evaluates I along three independent floating-point
routes (per-cell gains, residual difference, and the triple identity
E(AW) - E(W) - E(A)) and raises :class:`InternalConsistencyError` if they
disagree beyond 1e-10 - a numerics bug must never be returned silently.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _kernels as kernels
from .errors import InternalConsistencyError, InvariantError
from .tables import marginal_target

IDENTITY_TOL = 1e-10
NONNEG_TOL = 1e-12


def entropy(dist):
    """Deficit entropy sum(p ln p) of a distribution; always <= 0."""
    return kernels.xlogx_sum(dist.mass)


def joint_entropy(joint):
    """Deficit entropy of the full joint table."""
    return kernels.xlogx_sum(joint.p.ravel())


def residual_entropy_at(joint, cell):
    """Deficit about the target remaining after observing one cell."""
    k = joint.resolve_cell(cell)
    col = joint.p[:, k]
    mass = kernels.sum_1d(col)
    if mass <= 0.0:
        raise InvariantError("conditional undefined at zero-mass cell")
    return kernels.xlogx_sum(col / mass)


def expected_residual_entropy(joint):
    """Mass-weighted residual entropy over all positive-mass cells."""
    mass, residual = kernels.column_residuals(joint.p)
    return kernels.dot_1d(mass, residual)


def information_gain_at(joint, cell):
    """Information gained about the target by observing one cell.

    May be negative for an individual cell; only the expectation over cells
    is guaranteed non-negative.
    """
    return residual_entropy_at(joint, cell) - entropy(marginal_target(joint))


def _information_paths(joint):
    """The three routes to I(A|W); internal, shared by the public entry points.

    Returns (i_gain_expectation, i_residual_difference, i_triple_identity,
    e_target, e_observable, e_joint, e_residual_expected).
    """
    e_target = kernels.xlogx_sum(kernels.row_sums(joint.p))
    mass, residual = kernels.column_residuals(joint.p)
    e_observable = kernels.xlogx_sum(mass)
    e_joint = kernels.xlogx_sum(joint.p.ravel())
    e_residual = kernels.dot_1d(mass, residual)
    i_eq_gain = kernels.dot_1d(mass, residual - e_target)
    i_eq_diff = e_residual - e_target
    i_identity = e_joint - e_observable - e_target
    return i_eq_gain, i_eq_diff, i_identity, e_target, e_observable, e_joint, e_residual


def _check_paths(i_gain, i_diff, i_ident, e_target, e_observable):
    pairs = (abs(i_gain - i_diff), abs(i_gain - i_ident), abs(i_diff - i_ident))
    if max(pairs) > IDENTITY_TOL:
        raise InternalConsistencyError(
            "mutual-information paths disagree beyond "
            f"{IDENTITY_TOL:g}: gain-expectation={i_gain!r}, "
            f"residual-difference={i_diff!r}, triple-identity={i_ident!r}")
    if i_diff < -NONNEG_TOL:
        raise InternalConsistencyError(
            f"mutual information {i_diff!r} below the non-negativity floor")
    bound = min(-e_target, -e_observable)
    if i_diff > bound + NONNEG_TOL:
        raise InternalConsistencyError(
            f"mutual information {i_diff!r} exceeds the marginal-entropy bound {bound!r}")


def mutual_information(joint):
    """Expected information gain about the target from observing the grid.

    Cross-checked along three computation routes; the residual-difference
    value is returned.
    """
    i_gain, i_diff, i_ident, e_target, e_observable, _, _ = _information_paths(joint)
    _check_paths(i_gain, i_diff, i_ident, e_target, e_observable)
    return i_diff


@dataclass(frozen=True)
class InfoReport:
    """All entropy and information figures of one joint table, in nats.

    ``informativeness`` is i_mutual / i_max in [0, 1], defined as 1 when the
    target carries no information to begin with (i_max = 0).
    """

    e_target: float
    e_observable: float
    e_joint: float
    e_residual_expected: float
    i_mutual: float
    i_max: float
    informativeness: float

    def to_dict(self):
        return {
            "e_target": self.e_target,
            "e_observable": self.e_observable,
            "e_joint": self.e_joint,
            "e_residual_expected": self.e_residual_expected,
            "i_mutual": self.i_mutual,
            "i_max": self.i_max,
            "informativeness": self.informativeness,
        }


def info_report(joint):
    """Full entropy/information report with every internal identity enforced."""
    i_gain, i_diff, i_ident, e_target, e_observable, e_joint, e_residual = \
        _information_paths(joint)
    _check_paths(i_gain, i_diff, i_ident, e_target, e_observable)
    for name, value in (("e_target", e_target), ("e_observable", e_observable),
                        ("e_joint", e_joint), ("e_residual_expected", e_residual)):
        if value > NONNEG_TOL:
            raise InternalConsistencyError(f"{name} = {value!r} is above the zero ceiling")
    i_max = -e_target
    if i_max <= 0.0:
        informativeness = 1.0
    else:
        informativeness = min(1.0, max(0.0, i_diff / i_max))
    return InfoReport(
        e_target=e_target,
        e_observable=e_observable,
        e_joint=e_joint,
        e_residual_expected=e_residual,
        i_mutual=i_diff,
        i_max=i_max,
        informativeness=informativeness,
    )
