"""Softmax logistic regression and one-vs-rest linear SVM (Pegasos)."""

import numpy as np
import scipy.sparse as sp
from scipy.special import logsumexp

from .optim import Adam


def softmax(Z):
    return np.exp(Z - logsumexp(Z, axis=1, keepdims=True))


def fit_logistic(X, y, n_classes, seed=0, l2=1e-4, epochs=200, learning_rate=0.01):
    """Full-batch multinomial logistic regression trained with Adam."""
    X = sp.csr_matrix(X, dtype=np.float64)
    n, V = X.shape
    Y = np.zeros((n, n_classes))
    Y[np.arange(n), y] = 1.0
    params = {"weights": np.zeros((V, n_classes)), "bias": np.zeros(n_classes)}
    opt = Adam(params, lr=learning_rate)
    XT = X.T.tocsr()
    for _ in range(epochs):
        P = softmax(np.asarray(X @ params["weights"]) + params["bias"])
        D = (P - Y) / n
        opt.step({
            "weights": np.asarray(XT @ D) + l2 * params["weights"],
            "bias": D.sum(axis=0),
        })
    return params


def logistic_scores(params, X):
    X = sp.csr_matrix(X, dtype=np.float64)
    return softmax(np.asarray(X @ params["weights"]) + params["bias"])


def fit_pegasos(X, y, n_classes, seed=0, lam=1e-4, epochs=50):
    """One-vs-rest hinge-loss SVMs by stochastic sub-gradient descent.

    Every hyperplane w_h (bias folded in as a constant feature) is kept as
    ``scale[h] * raw[h]`` so the per-step shrinkage costs O(1). Two-class
    problems train a single hyperplane for class 1.
    """
    X = sp.csr_matrix(X, dtype=np.float64)
    X.sum_duplicates()
    n, V = X.shape
    n_planes = 1 if n_classes == 2 else n_classes
    if n_classes == 2:
        targets = np.where(y == 1, 1.0, -1.0)[:, None]
    else:
        targets = np.where(y[:, None] == np.arange(n_classes)[None, :], 1.0, -1.0)

    raw = np.zeros((n_planes, V))
    raw_b = np.zeros(n_planes)
    scale = np.ones(n_planes)
    sq_norm = np.zeros(n_planes)  # ||raw||^2 including the bias entry
    radius = 1.0 / np.sqrt(lam)
    rng = np.random.default_rng(seed)
    indptr, indices, data = X.indptr, X.indices, X.data

    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            idx = indices[indptr[i]:indptr[i + 1]]
            vals = data[indptr[i]:indptr[i + 1]]
            margins = scale * (raw[:, idx] @ vals + raw_b)
            yi = targets[i]
            if t > 1:
                scale *= 1.0 - eta * lam
            viol = np.flatnonzero(yi * margins < 1.0)
            for h in viol:
                step = eta * yi[h] / scale[h]
                old = raw[h, idx]
                raw[h, idx] = old + step * vals
                sq_norm[h] += 2.0 * step * float(old @ vals) + step * step * float(vals @ vals)
                sq_norm[h] += 2.0 * step * raw_b[h] + step * step
                raw_b[h] += step
            norm = scale * np.sqrt(np.maximum(sq_norm, 0.0))
            shrink = norm > radius
            if shrink.any():
                scale[shrink] *= radius / norm[shrink]
            small = scale < 1e-100
            if small.any():
                # fold tiny scales back into the raw vectors to avoid underflow
                for h in np.flatnonzero(small):
                    raw[h] *= scale[h]
                    raw_b[h] *= scale[h]
                    sq_norm[h] *= scale[h] ** 2
                    scale[h] = 1.0

    weights = (raw * scale[:, None]).T
    bias = raw_b * scale
    return {"weights": weights, "bias": bias}


def svm_margins(params, X):
    X = sp.csr_matrix(X, dtype=np.float64)
    m = np.asarray(X @ params["weights"]) + params["bias"]
    if m.shape[1] == 1:
        return np.hstack([-m, m])
    return m
