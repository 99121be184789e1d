"""Low-level numeric kernels with two interchangeable backends.

Every long reduction in this package funnels through this module so that
summation is error-compensated and runs in a fixed order, keeping results
bit-identical from run to run:

* ``numba`` backend — serial ``@njit(cache=True)`` loops using Neumaier
  compensated accumulation. This is the default whenever numba imports.
* ``numpy`` backend — vectorized term construction with ``math.fsum``
  (exactly rounded) for the long accumulations.

Set ``MIOKIT_BACKEND=numpy`` or ``MIOKIT_BACKEND=numba`` to force a backend;
unset (or ``auto``) picks numba when available. The two backends may differ
in the last few ulps; within one backend results are deterministic.

``benchmarks/bench_kernels.py`` compares the two implementations head to
head on large tables.
"""

from __future__ import annotations

import math
import os

import numpy as np

ENV_VAR = "MIOKIT_BACKEND"


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------

def _np_sum_1d(x):
    """Exactly rounded sum of a 1-d float array."""
    return math.fsum(np.asarray(x, dtype=np.float64))


def _np_dot_1d(w, x):
    """Compensated dot product sum(w * x)."""
    return math.fsum(np.asarray(w, dtype=np.float64) * np.asarray(x, dtype=np.float64))


def _np_xlogx_sum(x):
    """sum(x * ln x) with the 0·ln 0 = 0 convention, exactly rounded."""
    x = np.asarray(x, dtype=np.float64).ravel()
    pos = x > 0.0
    if not pos.any():
        return 0.0
    xv = x[pos]
    return math.fsum(xv * np.log(xv))


def _np_row_sums(p):
    return p.sum(axis=1)


def _np_col_sums(p):
    return p.sum(axis=0)


def _np_column_residuals(p):
    """Per-cell mass and residual entropy of the conditional target distribution.

    Returns ``(mass, residual)`` arrays of length K; ``residual[k]`` is
    sum_j p(j|k) ln p(j|k) for cells with positive mass and 0.0 elsewhere
    (callers distinguish the two via ``mass``).
    """
    mass = p.sum(axis=0)
    residual = np.zeros(p.shape[1])
    pos = mass > 0.0
    if pos.any():
        cond = p[:, pos] / mass[pos]
        terms = np.zeros_like(cond)
        nz = cond > 0.0
        terms[nz] = cond[nz] * np.log(cond[nz])
        residual[pos] = terms.sum(axis=0)
    return mass, residual


def _np_row_gains(cat_prefix, mass_prefix, pmarg, k):
    """Information gains of the segments [k, c) for c = k+1 .. K.

    ``cat_prefix`` is the (J, K+1) per-category prefix-mass table,
    ``mass_prefix`` the (K+1,) observable prefix, ``pmarg`` the (J,) target
    marginal. Each term is q ln(q / (p_j m)) so an exactly proportional
    segment scores exactly 0; a zero-mass segment contributes 0.
    """
    kk = mass_prefix.shape[0] - 1
    m = mass_prefix[k + 1:] - mass_prefix[k]
    pos_m = m > 0.0
    acc = np.zeros(kk - k)
    for j in range(cat_prefix.shape[0]):
        q = cat_prefix[j, k + 1:] - cat_prefix[j, k]
        sel = pos_m & (q > 0.0)
        if sel.any():
            acc[sel] += q[sel] * np.log(q[sel] / (pmarg[j] * m[sel]))
    return acc


def _np_segment_gain(cat_prefix, mass_prefix, pmarg, a, b):
    """Information gain of the single segment [a, b)."""
    return float(_np_row_gains(cat_prefix, mass_prefix, pmarg, a)[b - a - 1])


def _np_dp_segments(cat_prefix, mass_prefix, pmarg, max_segments):
    """Optimal contiguous segmentation into at most ``max_segments`` pieces.

    Maximizes the summed segment gains; ties prefer fewer segments, then the
    lexicographically smallest cut positions. Returns ``(value, cuts)`` with
    ``cuts`` the ascending cell indices at which new segments start.
    """
    kk = mass_prefix.shape[0] - 1
    s_max = min(int(max_segments), kk)
    g = np.full((s_max + 1, kk + 1), -np.inf)
    g[0, kk] = 0.0
    for s in range(1, s_max + 1):
        for k in range(kk - s, -1, -1):
            gains = _np_row_gains(cat_prefix, mass_prefix, pmarg, k)
            lim = kk - s - k + 1
            cand = gains[:lim] + g[s - 1, k + 1:k + 1 + lim]
            g[s, k] = cand.max()
    best_s = 1
    best_v = g[1, 0]
    for s in range(2, s_max + 1):
        if g[s, 0] > best_v:
            best_v = g[s, 0]
            best_s = s
    cuts = np.empty(best_s - 1, dtype=np.int64)
    k = 0
    for i in range(best_s - 1):
        s_rem = best_s - i
        gains = _np_row_gains(cat_prefix, mass_prefix, pmarg, k)
        lim = kk - s_rem - k + 1
        cand = gains[:lim] + g[s_rem - 1, k + 1:k + 1 + lim]
        c = k + 1 + int(np.nonzero(cand == g[s_rem, k])[0][0])
        cuts[i] = c
        k = c
    return float(best_v), cuts


_NUMPY_IMPL = {
    "sum_1d": _np_sum_1d,
    "dot_1d": _np_dot_1d,
    "xlogx_sum": _np_xlogx_sum,
    "row_sums": _np_row_sums,
    "col_sums": _np_col_sums,
    "column_residuals": _np_column_residuals,
    "segment_gain": _np_segment_gain,
    "dp_segments": _np_dp_segments,
}


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

def _build_numba_impl():
    from numba import njit

    @njit(cache=True)
    def nb_sum_1d(x):
        s = 0.0
        c = 0.0
        for i in range(x.shape[0]):
            v = x[i]
            t = s + v
            if abs(s) >= abs(v):
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t
        return s + c

    @njit(cache=True)
    def nb_dot_1d(w, x):
        s = 0.0
        c = 0.0
        for i in range(w.shape[0]):
            v = w[i] * x[i]
            t = s + v
            if abs(s) >= abs(v):
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t
        return s + c

    @njit(cache=True)
    def nb_xlogx_sum(x):
        s = 0.0
        c = 0.0
        for i in range(x.shape[0]):
            xi = x[i]
            if xi > 0.0:
                v = xi * math.log(xi)
                t = s + v
                if abs(s) >= abs(v):
                    c += (s - t) + v
                else:
                    c += (v - t) + s
                s = t
        return s + c

    @njit(cache=True)
    def nb_row_sums(p):
        out = np.empty(p.shape[0])
        for j in range(p.shape[0]):
            s = 0.0
            c = 0.0
            for k in range(p.shape[1]):
                v = p[j, k]
                t = s + v
                if abs(s) >= abs(v):
                    c += (s - t) + v
                else:
                    c += (v - t) + s
                s = t
            out[j] = s + c
        return out

    @njit(cache=True)
    def nb_col_sums(p):
        out = np.empty(p.shape[1])
        for k in range(p.shape[1]):
            s = 0.0
            c = 0.0
            for j in range(p.shape[0]):
                v = p[j, k]
                t = s + v
                if abs(s) >= abs(v):
                    c += (s - t) + v
                else:
                    c += (v - t) + s
                s = t
            out[k] = s + c
        return out

    @njit(cache=True)
    def nb_column_residuals(p):
        nj, nk = p.shape
        mass = np.zeros(nk)
        residual = np.zeros(nk)
        for k in range(nk):
            s = 0.0
            c = 0.0
            for j in range(nj):
                v = p[j, k]
                t = s + v
                if abs(s) >= abs(v):
                    c += (s - t) + v
                else:
                    c += (v - t) + s
                s = t
            m = s + c
            mass[k] = m
            if m > 0.0:
                r = 0.0
                for j in range(nj):
                    q = p[j, k] / m
                    if q > 0.0:
                        r += q * math.log(q)
                residual[k] = r
        return mass, residual

    @njit(cache=True)
    def nb_segment_gain(cat_prefix, mass_prefix, pmarg, a, b):
        m = mass_prefix[b] - mass_prefix[a]
        if not (m > 0.0):
            return 0.0
        total = 0.0
        for j in range(cat_prefix.shape[0]):
            q = cat_prefix[j, b] - cat_prefix[j, a]
            if q > 0.0:
                total += q * math.log(q / (pmarg[j] * m))
        return total

    @njit(cache=True)
    def nb_dp_segments(cat_prefix, mass_prefix, pmarg, max_segments):
        kk = mass_prefix.shape[0] - 1
        s_max = max_segments if max_segments < kk else kk
        g = np.full((s_max + 1, kk + 1), -np.inf)
        g[0, kk] = 0.0
        for s in range(1, s_max + 1):
            for k in range(kk - s, -1, -1):
                best = -np.inf
                for c in range(k + 1, kk - s + 2):
                    v = nb_segment_gain(cat_prefix, mass_prefix, pmarg, k, c) + g[s - 1, c]
                    if v > best:
                        best = v
                g[s, k] = best
        best_s = 1
        best_v = g[1, 0]
        for s in range(2, s_max + 1):
            if g[s, 0] > best_v:
                best_v = g[s, 0]
                best_s = s
        cuts = np.empty(best_s - 1, dtype=np.int64)
        k = 0
        for i in range(best_s - 1):
            s_rem = best_s - i
            target = g[s_rem, k]
            for c in range(k + 1, kk - s_rem + 2):
                v = nb_segment_gain(cat_prefix, mass_prefix, pmarg, k, c) + g[s_rem - 1, c]
                if v == target:
                    cuts[i] = c
                    k = c
                    break
        return best_v, cuts

    def segment_gain(cat_prefix, mass_prefix, pmarg, a, b):
        return float(nb_segment_gain(cat_prefix, mass_prefix, pmarg, int(a), int(b)))

    def dp_segments(cat_prefix, mass_prefix, pmarg, max_segments):
        value, cuts = nb_dp_segments(cat_prefix, mass_prefix, pmarg, int(max_segments))
        return float(value), cuts

    return {
        "sum_1d": lambda x: float(nb_sum_1d(np.ascontiguousarray(x, dtype=np.float64))),
        "dot_1d": lambda w, x: float(nb_dot_1d(
            np.ascontiguousarray(w, dtype=np.float64),
            np.ascontiguousarray(x, dtype=np.float64))),
        "xlogx_sum": lambda x: float(nb_xlogx_sum(
            np.ascontiguousarray(x, dtype=np.float64).ravel())),
        "row_sums": nb_row_sums,
        "col_sums": nb_col_sums,
        "column_residuals": nb_column_residuals,
        "segment_gain": segment_gain,
        "dp_segments": dp_segments,
    }


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

def _select_backend():
    choice = os.environ.get(ENV_VAR, "").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        import numba  # noqa: F401  explicit request: fail loudly if absent
        return "numba"
    if choice not in ("", "auto"):
        raise ValueError(f"unknown {ENV_VAR} value: {choice!r} (use 'numba' or 'numpy')")
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


BACKEND = _select_backend()

IMPLEMENTATIONS = {"numpy": _NUMPY_IMPL}
if BACKEND == "numba":
    IMPLEMENTATIONS["numba"] = _build_numba_impl()

_active = IMPLEMENTATIONS[BACKEND]

sum_1d = _active["sum_1d"]
dot_1d = _active["dot_1d"]
xlogx_sum = _active["xlogx_sum"]
row_sums = _active["row_sums"]
col_sums = _active["col_sums"]
column_residuals = _active["column_residuals"]
segment_gain = _active["segment_gain"]
dp_segments = _active["dp_segments"]


def active_backend():
    """Name of the kernel backend selected at import time."""
    return BACKEND


def warm_up():
    """Trigger JIT compilation of every kernel (no-op on the numpy backend)."""
    p = np.array([[0.25, 0.25], [0.25, 0.25]])
    v = p.ravel()
    sum_1d(v)
    dot_1d(v, v)
    xlogx_sum(v)
    row_sums(p)
    col_sums(p)
    column_residuals(p)
    cat_prefix = np.concatenate([np.zeros((2, 1)), np.cumsum(p, axis=1)], axis=1)
    mass_prefix = np.concatenate([[0.0], np.cumsum(p.sum(axis=0))])
    pmarg = np.array([0.5, 0.5])
    segment_gain(cat_prefix, mass_prefix, pmarg, 0, 1)
    dp_segments(cat_prefix, mass_prefix, pmarg, 2)
