"""k-nearest neighbours under cosine distance."""

import numpy as np
import scipy.sparse as sp


def fit_knn(X, y, n_classes, k=5):
    X = sp.csr_matrix(X, dtype=np.float64)
    return {
        "train_data": X.data.copy(),
        "train_indices": X.indices.astype(np.int64),
        "train_indptr": X.indptr.astype(np.int64),
        "train_shape": np.array(X.shape, dtype=np.int64),
        "train_labels": np.asarray(y, dtype=np.int64),
    }


def _training_matrix(params):
    return sp.csr_matrix(
        (params["train_data"], params["train_indices"], params["train_indptr"]),
        shape=tuple(int(s) for s in params["train_shape"]),
    )


def _unit_rows(X):
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
    norms[norms == 0] = 1.0
    return sp.diags(1.0 / norms) @ X


def cosine_distances(params, X):
    X = sp.csr_matrix(X, dtype=np.float64)
    sim = _unit_rows(X) @ _unit_rows(_training_matrix(params)).T
    return 1.0 - np.asarray(sim.todense())


def knn_scores(params, X, n_classes, k=5):
    """Vote fractions among the k closest training vectors.

    Equal distances are resolved in favour of the lower training index.
    """
    dist = cosine_distances(params, X)
    labels = params["train_labels"]
    k = min(k, len(labels))
    nearest = np.argsort(dist, axis=1, kind="stable")[:, :k]
    votes = np.zeros((dist.shape[0], n_classes))
    for row, idx in enumerate(nearest):
        np.add.at(votes[row], labels[idx], 1.0)
    return votes / k
