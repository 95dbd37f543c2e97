"""One-hidden-layer perceptron: ReLU hidden units, softmax output, Adam."""

import numpy as np
import scipy.sparse as sp

from .linear import softmax
from .optim import Adam


def relu(a):
    """Elementwise ``max(0, a)``."""
    return np.maximum(np.asarray(a, dtype=np.float64), 0.0)


def init_params(n_features, n_hidden, n_classes, rng):
    def glorot(fan_in, fan_out):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-limit, limit, size=(fan_in, fan_out))

    return {
        "W1": glorot(n_features, n_hidden),
        "b1": np.zeros(n_hidden),
        "W2": glorot(n_hidden, n_classes),
        "b2": np.zeros(n_classes),
    }


def forward(params, X):
    A1 = np.asarray(X @ params["W1"]) + params["b1"]
    H = relu(A1)
    Z = H @ params["W2"] + params["b2"]
    return A1, H, softmax(Z)


def loss_and_grads(params, X, Y):
    """Mean cross-entropy of one-hot targets ``Y`` and its gradients."""
    n = X.shape[0]
    A1, H, P = forward(params, X)
    loss = -np.sum(Y * np.log(np.clip(P, 1e-300, None))) / n
    dZ = (P - Y) / n
    dH = dZ @ params["W2"].T
    dA1 = dH * (A1 > 0)
    grads = {
        "W1": np.asarray(X.T @ dA1),
        "b1": dA1.sum(axis=0),
        "W2": H.T @ dZ,
        "b2": dZ.sum(axis=0),
    }
    return loss, grads


def fit_mlp(X, y, n_classes, seed=0, hidden_units=20, learning_rate=1e-3,
            beta1=0.9, beta2=0.999, epsilon=1e-8, batch_size=32, epochs=100):
    X = sp.csr_matrix(X, dtype=np.float64)
    n, V = X.shape
    rng = np.random.default_rng(seed)
    params = init_params(V, hidden_units, n_classes, rng)
    Y = np.zeros((n, n_classes))
    Y[np.arange(n), y] = 1.0
    opt = Adam(params, lr=learning_rate, beta1=beta1, beta2=beta2, eps=epsilon)
    for _ in range(epochs):
        order = rng.permutation(n)
        for lo in range(0, n, batch_size):
            batch = order[lo:lo + batch_size]
            _, grads = loss_and_grads(params, X[batch], Y[batch])
            opt.step(grads)
    return params


def mlp_scores(params, X):
    X = sp.csr_matrix(X, dtype=np.float64)
    return forward(params, X)[2]
