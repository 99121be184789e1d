import math
import os
import subprocess
import sys

import numpy as np
import pytest

from miokit import _kernels

BOTH = len(_kernels.IMPLEMENTATIONS) == 2
needs_both = pytest.mark.skipif(not BOTH, reason="numba backend not available")


def _prefixes(p):
    cat_prefix = np.concatenate([np.zeros((p.shape[0], 1)), np.cumsum(p, axis=1)], axis=1)
    mass_prefix = np.concatenate([[0.0], np.cumsum(p.sum(axis=0))])
    return cat_prefix, mass_prefix, p.sum(axis=1)


class TestActiveBackend:
    def test_reported_name(self):
        assert _kernels.active_backend() in ("numba", "numpy")

    def test_env_flag_forces_numpy(self):
        env = dict(os.environ, MIOKIT_BACKEND="numpy")
        out = subprocess.run(
            [sys.executable, "-c",
             "from miokit import _kernels; print(_kernels.active_backend())"],
            capture_output=True, text=True, env=env, check=True)
        assert out.stdout.strip() == "numpy"

    def test_determinism_within_backend(self):
        rng = np.random.default_rng(0)
        x = rng.random(10_000)
        assert _kernels.xlogx_sum(x) == _kernels.xlogx_sum(x)
        assert _kernels.sum_1d(x) == _kernels.sum_1d(x)


class TestCompensation:
    def test_sum_matches_fsum_under_cancellation(self):
        x = np.array([1e16, 1.0, -1e16, 1.0] * 1000)
        assert _kernels.sum_1d(x) == math.fsum(x)

    def test_xlogx_ignores_zeros(self):
        assert _kernels.xlogx_sum(np.array([0.0, 0.5, 0.0, 0.5])) == pytest.approx(
            -math.log(2), abs=1e-15)


@needs_both
class TestBackendAgreement:
    def setup_method(self):
        rng = np.random.default_rng(123)
        self.p = rng.dirichlet(np.ones(5 * 40)).reshape(5, 40)
        self.vec = self.p.ravel()
        self.numpy = _kernels.IMPLEMENTATIONS["numpy"]
        self.numba = _kernels.IMPLEMENTATIONS["numba"]

    def test_reductions_agree(self):
        assert self.numpy["sum_1d"](self.vec) == pytest.approx(
            self.numba["sum_1d"](self.vec), abs=1e-15)
        assert self.numpy["xlogx_sum"](self.vec) == pytest.approx(
            self.numba["xlogx_sum"](self.vec), abs=1e-13)
        w = np.abs(np.sin(np.arange(self.vec.size)))
        assert self.numpy["dot_1d"](w, self.vec) == pytest.approx(
            self.numba["dot_1d"](w, self.vec), abs=1e-13)

    def test_matrix_reductions_agree(self):
        np.testing.assert_allclose(self.numpy["row_sums"](self.p),
                                   self.numba["row_sums"](self.p), atol=1e-14)
        np.testing.assert_allclose(self.numpy["col_sums"](self.p),
                                   self.numba["col_sums"](self.p), atol=1e-14)
        mass_a, res_a = self.numpy["column_residuals"](self.p)
        mass_b, res_b = self.numba["column_residuals"](self.p)
        np.testing.assert_allclose(mass_a, mass_b, atol=1e-14)
        np.testing.assert_allclose(res_a, res_b, atol=1e-12)

    def test_segmentation_agrees(self):
        cp, mp, pm = _prefixes(self.p)
        for a, b in [(0, 40), (3, 17), (10, 11)]:
            assert self.numpy["segment_gain"](cp, mp, pm, a, b) == pytest.approx(
                self.numba["segment_gain"](cp, mp, pm, a, b), abs=1e-12)
        v_np, cuts_np = self.numpy["dp_segments"](cp, mp, pm, 5)
        v_nb, cuts_nb = self.numba["dp_segments"](cp, mp, pm, 5)
        assert v_np == pytest.approx(v_nb, abs=1e-12)
        assert list(cuts_np) == list(cuts_nb)
