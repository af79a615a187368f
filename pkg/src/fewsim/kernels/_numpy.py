"""Pure-numpy reference implementations of the hot kernels.

Conventions: the base category is index 0 and carries implicit all-zero
coefficients; ``betas`` has shape (J-1, K) for the remaining categories.
"""

import numpy as np


def softmax_shares_batch(betas: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Category shares for each row of X. Returns (N, J), rows sum to 1."""
    eta = X @ betas.T                       # (N, J-1)
    full = np.hstack([np.zeros((X.shape[0], 1)), eta])
    full -= full.max(axis=1, keepdims=True)  # overflow guard
    e = np.exp(full)
    return e / e.sum(axis=1, keepdims=True)


def fmlm_loglik(betas: np.ndarray, X: np.ndarray, Y: np.ndarray) -> float:
    P = softmax_shares_batch(betas, X)
    return float(np.sum(Y * np.log(P)))


def fmlm_loglik_grad(betas: np.ndarray, X: np.ndarray, Y: np.ndarray):
    """Quasi-log-likelihood sum_i sum_j y_ij log p_ij and its gradient.

    Gradient w.r.t. beta_j (non-base j) is sum_i (y_ij - p_ij) x_i.
    """
    P = softmax_shares_batch(betas, X)
    ll = float(np.sum(Y * np.log(P)))
    grad = (Y[:, 1:] - P[:, 1:]).T @ X      # (J-1, K)
    return ll, grad
