"""Numba-compiled kernels. Same contracts as _numpy; see that module."""

import numpy as np
from numba import njit


@njit(cache=True)
def softmax_shares_batch(betas, X):
    N, K = X.shape
    Jm1 = betas.shape[0]
    J = Jm1 + 1
    out = np.empty((N, J))
    for i in range(N):
        mx = 0.0  # base category eta is 0
        for j in range(Jm1):
            eta = 0.0
            for k in range(K):
                eta += betas[j, k] * X[i, k]
            out[i, j + 1] = eta
            if eta > mx:
                mx = eta
        out[i, 0] = 0.0
        tot = 0.0
        for j in range(J):
            v = np.exp(out[i, j] - mx)
            out[i, j] = v
            tot += v
        for j in range(J):
            out[i, j] /= tot
    return out


@njit(cache=True)
def fmlm_loglik(betas, X, Y):
    P = softmax_shares_batch(betas, X)
    ll = 0.0
    for i in range(X.shape[0]):
        for j in range(P.shape[1]):
            if Y[i, j] > 0.0:
                ll += Y[i, j] * np.log(P[i, j])
            elif Y[i, j] < 0.0:
                ll += Y[i, j] * np.log(P[i, j])
    return ll


@njit(cache=True)
def fmlm_loglik_grad(betas, X, Y):
    N, K = X.shape
    Jm1 = betas.shape[0]
    P = softmax_shares_batch(betas, X)
    ll = 0.0
    grad = np.zeros((Jm1, K))
    for i in range(N):
        for j in range(Jm1 + 1):
            if Y[i, j] != 0.0:
                ll += Y[i, j] * np.log(P[i, j])
        for j in range(Jm1):
            r = Y[i, j + 1] - P[i, j + 1]
            for k in range(K):
                grad[j, k] += r * X[i, k]
    return ll, grad
