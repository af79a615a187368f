import numpy as np
import pytest

from fewsim import kernels


def _random_problem(rng, n=50, J=4, K=3):
    betas = rng.normal(0, 1, (J - 1, K))
    X = rng.normal(0, 1, (n, K))
    Y = rng.dirichlet(np.ones(J), size=n)
    return betas, X, Y


def test_backend_is_reported():
    assert kernels.BACKEND in ("numpy", "numba")
    assert "numpy" in kernels.get_backends()


def test_shares_sum_to_one_on_many_inputs(rng):
    # 1000 predictor vectors, including extreme magnitudes
    betas = rng.normal(0, 3, (5, 8))
    X = rng.normal(0, 10, (1000, 8))
    shares = kernels.softmax_shares_batch(betas, X)
    assert shares.shape == (1000, 6)
    assert np.all(shares >= 0)
    assert np.max(np.abs(shares.sum(axis=1) - 1.0)) < 1e-12


def test_shares_stable_under_large_etas():
    betas = np.array([[700.0], [-700.0]])
    shares = kernels.softmax_shares_batch(betas, np.array([[1.0]]))
    assert np.all(np.isfinite(shares))
    assert shares.sum() == pytest.approx(1.0, abs=1e-12)


def test_backends_agree(rng):
    backends = kernels.get_backends()
    if len(backends) < 2:
        pytest.skip("numba backend not importable")
    betas, X, Y = _random_problem(rng, n=200)
    ref = backends["numpy"]
    alt = backends["numba"]
    assert np.allclose(ref.softmax_shares_batch(betas, X),
                       alt.softmax_shares_batch(betas, X), atol=1e-12)
    ll_a = ref.fmlm_loglik(betas, X, Y)
    ll_b = alt.fmlm_loglik(betas, X, Y)
    assert ll_a == pytest.approx(ll_b, rel=1e-12)
    la, ga = ref.fmlm_loglik_grad(betas, X, Y)
    lb, gb = alt.fmlm_loglik_grad(betas, X, Y)
    assert la == pytest.approx(lb, rel=1e-12)
    assert np.allclose(ga, gb, atol=1e-10)


def test_loglik_grad_consistent_with_loglik(rng):
    betas, X, Y = _random_problem(rng)
    ll = kernels.fmlm_loglik(betas, X, Y)
    ll2, grad = kernels.fmlm_loglik_grad(betas, X, Y)
    assert ll == pytest.approx(ll2, rel=1e-12)
    assert grad.shape == betas.shape
