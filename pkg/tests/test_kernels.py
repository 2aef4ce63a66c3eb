"""Backend equivalence: the jitted loops and the numpy twins must agree
sample for sample when fed the same seeded stream."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from es_drift import kernels
from es_drift.streams import derive_stream

needs_numba = pytest.mark.skipif(kernels.numba_backend is None,
                                 reason="numba backend not built")


def _pair_of_streams(*key):
    return derive_stream(77, *key), derive_stream(77, *key)


@needs_numba
def test_success_hits_equivalent():
    rng_a, rng_b = _pair_of_streams(0)
    hits_nb = kernels.numba_backend.success_mc_hits(0.25, 1.0, 8, 100_000, rng_a)
    hits_np = kernels.numpy_backend.success_mc_hits(0.25, 1.0, 8, 100_000, rng_b)
    assert abs(int(hits_nb) - int(hits_np)) <= 2


@needs_numba
def test_truncated_drift_sums_equivalent():
    args = (1.0, 0.2, 10, 1.5, 1.1629, 2.8256, 0.0043, 0.1, 100_000)
    rng_a, rng_b = _pair_of_streams(1)
    total_nb, sq_nb = kernels.numba_backend.truncated_drift_sums(*args, rng_a)
    total_np, sq_np = kernels.numpy_backend.truncated_drift_sums(*args, rng_b)
    assert total_nb == pytest.approx(total_np, rel=1e-9, abs=1e-9)
    assert sq_nb == pytest.approx(sq_np, rel=1e-9, abs=1e-12)


@needs_numba
def test_har_sums_equivalent():
    rng_a, rng_b = _pair_of_streams(2)
    s_nb, sq_nb, cap_nb = kernels.numba_backend.har_log_progress_sums(6, 100_000, rng_a)
    s_np, sq_np, cap_np = kernels.numpy_backend.har_log_progress_sums(6, 100_000, rng_b)
    assert s_nb == pytest.approx(s_np, rel=1e-9)
    assert sq_nb == pytest.approx(sq_np, rel=1e-9)
    assert cap_nb == cap_np == 0


@needs_numba
def test_es_run_equivalent():
    m0 = np.zeros(8)
    m0[0] = 1.0
    rng_a, rng_b = _pair_of_streams(3)
    out_nb = kernels.numba_backend.es_run(m0, 0.25, 1.5, 1e-6, 100_000, 1, rng_a)
    out_np = kernels.numpy_backend.es_run(m0, 0.25, 1.5, 1e-6, 100_000, 1, rng_b)
    ts_nb, norms_nb, sigmas_nb, succ_nb, hit_nb, t_nb, ns_nb = out_nb
    ts_np, norms_np, sigmas_np, succ_np, hit_np, t_np, ns_np = out_np
    assert hit_nb == hit_np and t_nb == t_np and ns_nb == ns_np
    np.testing.assert_array_equal(ts_nb, ts_np)
    np.testing.assert_array_equal(succ_nb, succ_np)
    np.testing.assert_allclose(norms_nb, norms_np, rtol=1e-10)
    np.testing.assert_allclose(sigmas_nb, sigmas_np, rtol=1e-10)


@needs_numba
def test_series_bitwise_identical():
    from scipy.special import gammainc

    for d, r, sigma_bar in ((16, 0.0, 2.0), (256, 1 / 256, 0.125), (4, 0.5, 1.0)):
        lam2 = 0.5 * (d / sigma_bar) ** 2
        x2 = 0.5 * ((1.0 - r) * d / sigma_bar) ** 2
        a = 0.5 * d
        j0 = int(lam2)
        log_w0 = -lam2 if j0 == 0 else j0 * math.log(lam2) - lam2 - math.lgamma(j0 + 1)
        seeds = (a, lam2, x2, float(gammainc(a + j0, x2)),
                 math.exp((a + j0) * math.log(x2) - x2 - math.lgamma(a + j0 + 1)),
                 math.exp(log_w0), j0, 1e-10, 1_000_000)
        out_nb = kernels.numba_backend.poisson_mixture_chisq_cdf(*seeds)
        out_np = kernels.numpy_backend.poisson_mixture_chisq_cdf(*seeds)
        assert out_nb[0] == out_np[0]
        assert out_nb[2] == out_np[2]


@needs_numba
def test_potential_value_bitwise_identical(rng_for):
    rng = rng_for(4)
    for _ in range(200):
        norm = float(np.exp(rng.uniform(-3, 3)))
        sigma = float(np.exp(rng.uniform(-6, 2)))
        args = (norm, sigma, 12, 1.5, 1.1, 2.7, 0.004)
        assert kernels.numba_backend.potential_value(*args) == \
            kernels.numpy_backend.potential_value(*args)


def test_active_backend_exposed():
    assert kernels.BACKEND in ("numba", "numpy")
    assert kernels.success_mc_hits is getattr(
        kernels.numba_backend or kernels.numpy_backend, "success_mc_hits")


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_env_flag_selects_backend(backend):
    if backend == "numba" and kernels.numba_backend is None:
        pytest.skip("numba not importable")
    env = dict(os.environ, ES_DRIFT_BACKEND=backend)
    code = "import es_drift.kernels as k; print(k.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == backend


def test_env_flag_rejects_garbage():
    env = dict(os.environ, ES_DRIFT_BACKEND="fortran")
    out = subprocess.run([sys.executable, "-c", "import es_drift.kernels"],
                         env=env, capture_output=True, text=True)
    assert out.returncode != 0
