"""Gaussian and multinomial naive Bayes over sparse feature matrices."""

import numpy as np
import scipy.sparse as sp
from scipy.special import logsumexp

from ..errors import TrainingError


def _class_indicator(y, n_classes):
    n = len(y)
    return sp.csr_matrix((np.ones(n), (y, np.arange(n))), shape=(n_classes, n))


def _softmax_rows(jll):
    return np.exp(jll - logsumexp(jll, axis=1, keepdims=True))


def _log_prior(counts):
    with np.errstate(divide="ignore"):
        return np.log(counts / counts.sum())


def fit_gaussian(X, y, n_classes, var_smoothing=1e-9):
    X = sp.csr_matrix(X, dtype=np.float64)
    n, V = X.shape
    Ind = _class_indicator(y, n_classes)
    counts = np.bincount(y, minlength=n_classes).astype(np.float64)
    safe = np.maximum(counts, 1.0)[:, None]
    sums = np.asarray((Ind @ X).todense())
    sq_sums = np.asarray((Ind @ X.multiply(X)).todense())
    means = sums / safe
    var = np.maximum(sq_sums / safe - means ** 2, 0.0)

    overall_mean = np.asarray(X.mean(axis=0)).ravel()
    overall_var = np.asarray(X.multiply(X).mean(axis=0)).ravel() - overall_mean ** 2
    max_var = float(np.max(overall_var)) if V else 0.0
    epsilon = var_smoothing * max_var if max_var > 0 else var_smoothing
    var = var + epsilon
    return {
        "means": means,
        "variances": var,
        "class_count": counts,
        "epsilon": np.array([epsilon]),
    }


def gaussian_jll(params, X):
    X = sp.csr_matrix(X, dtype=np.float64)
    mu, var = params["means"], params["variances"]
    inv = 1.0 / var
    const = -0.5 * np.sum(np.log(2.0 * np.pi * var), axis=1) - 0.5 * np.sum(mu * mu * inv, axis=1)
    quad = X.multiply(X) @ inv.T - 2.0 * (X @ (mu * inv).T)
    return _log_prior(params["class_count"]) + const - 0.5 * np.asarray(quad)


def gaussian_scores(params, X):
    return _softmax_rows(gaussian_jll(params, X))


def fit_multinomial(X, y, n_classes, alpha=1.0):
    X = sp.csr_matrix(X, dtype=np.float64)
    if X.nnz and X.data.min() < 0:
        raise TrainingError("multinomial naive Bayes needs non-negative feature weights")
    if alpha <= 0:
        raise TrainingError("alpha must be positive")
    Ind = _class_indicator(y, n_classes)
    feature_count = np.asarray((Ind @ X).todense())
    smoothed = feature_count + alpha
    log_prob = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
    return {
        "feature_log_prob": log_prob,
        "class_count": np.bincount(y, minlength=n_classes).astype(np.float64),
    }


def multinomial_scores(params, X):
    X = sp.csr_matrix(X, dtype=np.float64)
    if X.nnz and X.data.min() < 0:
        raise TrainingError("multinomial naive Bayes needs non-negative feature weights")
    jll = np.asarray(X @ params["feature_log_prob"].T) + _log_prior(params["class_count"])
    return _softmax_rows(jll)
