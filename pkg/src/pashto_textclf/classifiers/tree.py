"""CART decision trees (Gini impurity) and bagged random forests.

Trees are stored as flat node arrays. ``feature[i] == -1`` marks a leaf;
internal nodes send ``x[feature] <= threshold`` to ``left``. ``value``
holds the per-class training counts that reached the node.
"""

import math
from fractions import Fraction

import numpy as np
import scipy.sparse as sp


def _resolve_max_features(max_features, n_features):
    if max_features is None:
        return None
    if max_features == "sqrt":
        return max(1, int(math.sqrt(n_features)))
    if max_features == "log2":
        return max(1, int(math.log2(max(n_features, 2))))
    if isinstance(max_features, float):
        return max(1, int(max_features * n_features))
    return int(max_features)


def _nonconstant_columns(Xs):
    """Indices of columns of ``Xs`` (CSR) that take more than one value."""
    n, V = Xs.shape
    nnz = np.bincount(Xs.indices, minlength=V)
    mixed = (nnz > 0) & (nnz < n)
    full = np.flatnonzero(nnz == n)
    if len(full):
        block = Xs[:, full].toarray()
        mixed[full] = block.max(axis=0) > block.min(axis=0)
    return np.flatnonzero(mixed)


def _exact_score(left_counts, right_counts) -> Fraction:
    lc = [int(round(v)) for v in left_counts]
    rc = [int(round(v)) for v in right_counts]
    return (Fraction(sum(v * v for v in lc), sum(lc))
            + Fraction(sum(v * v for v in rc), sum(rc)))


def best_split(Xc, y, class_totals):
    """Best Gini split of a node given its (samples x features) CSC block.

    Returns ``(score, column, threshold)`` or None when every column is
    constant. ``score = sum_c L_c^2/n_L + sum_c R_c^2/n_R`` grows as the
    weighted child impurity shrinks. Only stored entries are sorted: each
    column's implicit zeros enter as a single pseudo-entry carrying their
    class counts. Ties go to the lowest column, then the lowest threshold.
    """
    n, k = Xc.shape
    C = len(class_totals)
    totals = np.asarray(class_totals, dtype=np.float64)
    nnz_col = np.diff(Xc.indptr)
    cols = np.repeat(np.arange(k), nnz_col)
    labels = y[Xc.indices]
    nz_counts = np.bincount(cols * C + labels, minlength=k * C).reshape(k, C).astype(np.float64)
    zero_cols = np.flatnonzero((nnz_col > 0) & (nnz_col < n))

    all_cols = np.concatenate([cols, zero_cols])
    all_vals = np.concatenate([Xc.data, np.zeros(len(zero_cols))])
    counts = np.zeros((len(all_cols), C))
    counts[np.arange(len(cols)), labels] = 1.0
    counts[len(cols):] = totals - nz_counts[zero_cols]

    order = np.lexsort((all_vals, all_cols))
    all_cols, all_vals, counts = all_cols[order], all_vals[order], counts[order]
    valid = (all_cols[:-1] == all_cols[1:]) & (all_vals[:-1] < all_vals[1:])
    if not valid.any():
        return None
    cum = np.cumsum(counts, axis=0)
    first = np.r_[True, all_cols[1:] != all_cols[:-1]]
    base_rows = np.maximum.accumulate(np.where(first, np.arange(len(all_cols)), 0))
    before = np.vstack([np.zeros((1, C)), cum])[base_rows]
    left = (cum - before)[:-1]
    right = totals - left
    n_left = left.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        score = (left * left).sum(axis=1) / n_left + (right * right).sum(axis=1) / (n - n_left)
    score[~valid] = -np.inf
    best = score.max()
    # float rounding can split exact ties, so near-best candidates are compared as fractions
    near = np.flatnonzero(score >= best - 1e-9 * max(abs(best), 1.0))
    # equal floats already resolve to the first (lowest column, threshold) row
    _, first_of_value = np.unique(score[near], return_index=True)
    reps = np.sort(near[first_of_value])
    i = int(reps[0])
    if len(reps) > 1:
        i = int(max(reps, key=lambda c: (_exact_score(left[c], right[c]), -c)))
    lo, hi = all_vals[i], all_vals[i + 1]
    threshold = (lo + hi) / 2.0
    if not threshold < hi:
        threshold = lo
    return float(score[i]), int(all_cols[i]), float(threshold)


def build_tree(X, y, n_classes, max_depth=None, min_samples_split=2,
               max_features=None, rng=None, sample_idx=None):
    X = sp.csr_matrix(X, dtype=np.float64)
    X.eliminate_zeros()
    n_total, V = X.shape
    if sample_idx is None:
        sample_idx = np.arange(n_total)
    m = _resolve_max_features(max_features, V)

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(counts):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(counts)
        return len(feature) - 1

    root_counts = np.bincount(y[sample_idx], minlength=n_classes)
    stack = [(new_node(root_counts), sample_idx, 0)]
    while stack:
        node, rows, depth = stack.pop()
        counts = value[node]
        n = len(rows)
        if (np.count_nonzero(counts) <= 1 or n < min_samples_split
                or (max_depth is not None and depth >= max_depth)):
            continue
        Xs = X[rows]
        if m is not None:
            cand = _nonconstant_columns(Xs)
            if len(cand) == 0:
                continue
            if len(cand) > m:
                cand = np.sort(rng.choice(cand, size=m, replace=False))
            Xc = Xs[:, cand].tocsc()
        else:
            cand = None
            Xc = Xs.tocsc()
        Xc.sort_indices()
        found = best_split(Xc, y[rows], counts)
        if found is None:
            continue
        _, j, thr = found
        column = Xc[:, j].toarray().ravel()
        go_left = column <= thr
        rows_l, rows_r = rows[go_left], rows[~go_left]
        feature[node] = int(cand[j]) if cand is not None else j
        threshold[node] = thr
        l_node = new_node(np.bincount(y[rows_l], minlength=n_classes))
        r_node = new_node(np.bincount(y[rows_r], minlength=n_classes))
        left[node], right[node] = l_node, r_node
        # right pushed first so the left subtree is numbered first
        stack.append((r_node, rows_r, depth + 1))
        stack.append((l_node, rows_l, depth + 1))

    return {
        "feature": np.array(feature, dtype=np.int64),
        "threshold": np.array(threshold, dtype=np.float64),
        "left": np.array(left, dtype=np.int64),
        "right": np.array(right, dtype=np.int64),
        "value": np.array(value, dtype=np.float64).reshape(len(value), n_classes),
    }


def apply_tree(tree, X, root=0):
    """Leaf index reached by every row of ``X``."""
    X = sp.csr_matrix(X, dtype=np.float64)
    feature, thr = tree["feature"], tree["threshold"]
    left, right = tree["left"], tree["right"]
    node = np.full(X.shape[0], root, dtype=np.int64)
    active = np.flatnonzero(feature[node] >= 0)
    while len(active):
        f = feature[node[active]]
        vals = np.asarray(X[active, f]).ravel()
        goes_left = vals <= thr[node[active]]
        node[active] = np.where(goes_left, left[node[active]], right[node[active]])
        active = active[feature[node[active]] >= 0]
    return node


def tree_scores(tree, X):
    value = tree["value"][apply_tree(tree, X)]
    return value / value.sum(axis=1, keepdims=True)


def tree_rng(seed, index):
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, index])


def fit_decision_tree(X, y, n_classes, seed=0, max_depth=None, min_samples_split=2,
                      max_features=None):
    return build_tree(X, y, n_classes, max_depth=max_depth,
                      min_samples_split=min_samples_split,
                      max_features=max_features, rng=tree_rng(seed, 0))


def fit_random_forest(X, y, n_classes, seed=0, n_trees=100, bootstrap=True,
                      max_features="sqrt", max_depth=None, min_samples_split=2):
    n = X.shape[0]
    parts = []
    for t in range(n_trees):
        rng = tree_rng(seed, t)
        idx = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        parts.append(build_tree(X, y, n_classes, max_depth=max_depth,
                                min_samples_split=min_samples_split,
                                max_features=max_features, rng=rng, sample_idx=idx))
    roots, offset = [], 0
    merged = {k: [] for k in ("feature", "threshold", "left", "right", "value")}
    for tree in parts:
        roots.append(offset)
        for key in ("left", "right"):
            shifted = tree[key].copy()
            shifted[shifted >= 0] += offset
            merged[key].append(shifted)
        for key in ("feature", "threshold", "value"):
            merged[key].append(tree[key])
        offset += len(tree["feature"])
    out = {k: np.concatenate(v) for k, v in merged.items()}
    out["roots"] = np.array(roots, dtype=np.int64)
    return out


def forest_scores(forest, X):
    """Fraction of trees voting for each class (a tree votes its leaf majority)."""
    n = X.shape[0]
    n_classes = forest["value"].shape[1]
    votes = np.zeros((n, n_classes))
    rows = np.arange(n)
    for root in forest["roots"]:
        leaves = apply_tree(forest, X, root=root)
        votes[rows, np.argmax(forest["value"][leaves], axis=1)] += 1.0
    return votes / len(forest["roots"])
