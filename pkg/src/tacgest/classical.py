"""Classical classifiers built on numpy: KNN, random forest, and an RBF SVM.

All three are deterministic given their seeds.  KNN prediction is an exact
nearest-neighbour scan whose tie handling does not depend on training-set
order; the forest uses per-tree seeds and an exhaustive Gini sweep over
midpoint thresholds; the SVM trains one-vs-one machines with a simplified
SMO loop over a precomputed kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GESTURE_NAMES
from .errors import DomainError

N_CLASSES = len(GESTURE_NAMES)


# ------------------------------------------------------------- standardize

class Standardizer:
    """Per-feature centering and scaling; near-constant features are only centered."""

    def __init__(self):
        self.mean_ = None
        self.scale_ = None

    def fit(self, X: np.ndarray) -> "Standardizer":
        X = np.asarray(X, dtype=np.float64)
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale_ = np.where(std < 1e-12, 1.0, std)
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        if self.mean_ is None:
            raise DomainError("standardizer is not fitted")
        return (np.asarray(X, dtype=np.float64) - self.mean_) / self.scale_

    def fit_transform(self, X: np.ndarray) -> np.ndarray:
        return self.fit(X).transform(X)

    def to_params(self) -> dict:
        return {"scaler_mean": self.mean_, "scaler_scale": self.scale_}

    @classmethod
    def from_params(cls, params: dict) -> "Standardizer":
        out = cls()
        out.mean_ = params["scaler_mean"]
        out.scale_ = params["scaler_scale"]
        return out


# -------------------------------------------------------------------- knn

class KnnClassifier:
    """K-nearest-neighbour vote over Euclidean distance.

    Ties in the vote go to the candidate class with the smallest mean
    distance among its voting neighbours, then to the lowest class id.
    Neighbour selection orders by (distance, label), so predictions are
    invariant to permutations of the training set.
    """

    def __init__(self, k: int = 7, n_classes: int = N_CLASSES):
        if k < 1:
            raise DomainError(f"k must be positive, got {k}")
        self.k = k
        self.n_classes = n_classes
        self.X_ = None
        self.y_ = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "KnnClassifier":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if len(X) != len(y):
            raise DomainError("X and y length mismatch")
        if self.k > len(X):
            raise DomainError(f"k={self.k} exceeds training size {len(X)}")
        self.X_ = X
        self.y_ = y
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self.X_ is None:
            raise DomainError("classifier is not fitted")
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(len(X), dtype=np.int64)
        buf = np.empty_like(self.X_)
        for i, x in enumerate(X):
            np.subtract(self.X_, x, out=buf)
            np.multiply(buf, buf, out=buf)
            sq = buf.sum(axis=1)
            out[i] = self._vote(sq)
        return out

    def vote_counts(self, X: np.ndarray) -> np.ndarray:
        """Per-class neighbour counts among the k nearest, one row per sample."""
        if self.X_ is None:
            raise DomainError("classifier is not fitted")
        X = np.asarray(X, dtype=np.float64)
        counts = np.zeros((len(X), self.n_classes), dtype=np.int64)
        buf = np.empty_like(self.X_)
        for i, x in enumerate(X):
            np.subtract(self.X_, x, out=buf)
            np.multiply(buf, buf, out=buf)
            sq = buf.sum(axis=1)
            order = np.lexsort((self.y_, sq))[: self.k]
            counts[i] = np.bincount(self.y_[order], minlength=self.n_classes)
        return counts

    def _vote(self, sq_dists: np.ndarray) -> int:
        order = np.lexsort((self.y_, sq_dists))[: self.k]
        labels = self.y_[order]
        dists = np.sqrt(sq_dists[order])
        counts = np.bincount(labels, minlength=self.n_classes)
        top = counts.max()
        tied = np.nonzero(counts == top)[0]
        if len(tied) == 1:
            return int(tied[0])
        means = [dists[labels == c].mean() for c in tied]
        return int(tied[int(np.argmin(means))])

    def to_params(self) -> dict:
        return {"train_x": self.X_, "train_y": self.y_.astype(np.float64),
                "k": np.array([self.k], dtype=np.float64)}

    @classmethod
    def from_params(cls, params: dict) -> "KnnClassifier":
        out = cls(k=int(params["k"][0]))
        out.X_ = params["train_x"]
        out.y_ = params["train_y"].astype(np.int64)
        return out


# ------------------------------------------------------------------ forest

@dataclass
class _Tree:
    # column layout: feature (-1 for leaf), threshold, left, right, leaf_class
    nodes: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        feature = self.nodes[:, 0].astype(np.int64)
        threshold = self.nodes[:, 1]
        left = self.nodes[:, 2].astype(np.int64)
        right = self.nodes[:, 3].astype(np.int64)
        leaf_class = self.nodes[:, 4].astype(np.int64)
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            feat = feature[node]
            internal = feat >= 0
            if not internal.any():
                break
            value = X[rows, np.where(internal, feat, 0)]
            nxt = np.where(value <= threshold[node], left[node], right[node])
            node = np.where(internal, nxt, node)
        return leaf_class[node]


class RandomForestClassifier:
    """Bagged CART trees with Gini splits on random feature subsets.

    Each tree draws a bootstrap sample of the training set and, at every
    node, evaluates floor(sqrt(d)) randomly chosen features over midpoint
    thresholds between adjacent distinct sorted values.  Tree t is seeded
    with seed + t.  Forest and leaf votes break ties toward the lowest
    class id.
    """

    def __init__(self, n_trees: int = 200, max_depth: int = 9,
                 min_samples_split: int = 2, seed: int = 0,
                 n_classes: int = N_CLASSES):
        if n_trees < 1 or max_depth < 1:
            raise DomainError("n_trees and max_depth must be positive")
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.seed = seed
        self.n_classes = n_classes
        self.trees_ = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RandomForestClassifier":
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if len(X) != len(y):
            raise DomainError("X and y length mismatch")
        n, d = X.shape
        m = max(1, int(np.floor(np.sqrt(d))))
        self.trees_ = []
        for t in range(self.n_trees):
            rng = np.random.default_rng(self.seed + t)
            sample = rng.integers(0, n, size=n)
            self.trees_.append(self._grow_tree(X, y, sample, m, rng))
        return self

    def _grow_tree(self, X, y, sample, m, rng) -> _Tree:
        nodes = []

        def grow(idx: np.ndarray, depth: int) -> int:
            node_id = len(nodes)
            nodes.append([-1, 0.0, -1, -1, -1])
            counts = np.bincount(y[idx], minlength=self.n_classes)
            if (depth >= self.max_depth or counts.max() == idx.size
                    or idx.size < self.min_samples_split):
                nodes[node_id][4] = int(np.argmax(counts))
                return node_id
            feats = rng.permutation(X.shape[1])[:m]
            split = self._best_split(X, y, idx, feats)
            if split is None:
                nodes[node_id][4] = int(np.argmax(counts))
                return node_id
            feat, threshold = split
            mask = X[idx, feat] <= threshold
            nodes[node_id][0] = int(feat)
            nodes[node_id][1] = float(threshold)
            nodes[node_id][2] = grow(idx[mask], depth + 1)
            nodes[node_id][3] = grow(idx[~mask], depth + 1)
            return node_id

        grow(sample, 0)
        return _Tree(nodes=np.asarray(nodes, dtype=np.float64))

    def _best_split(self, X, y, idx, feats):
        n = idx.size
        values = X[np.ix_(idx, feats)]                       # (n, m)
        order = np.argsort(values, axis=0, kind="stable")
        sorted_vals = np.take_along_axis(values, order, axis=0)
        sorted_labels = y[idx][order]                        # (n, m)
        onehot = (sorted_labels[:, :, None]
                  == np.arange(self.n_classes)[None, None, :]).astype(np.int64)
        left = np.cumsum(onehot, axis=0)                     # (n, m, C)
        total = left[-1]
        left = left[:-1]
        right = total[None, :, :] - left
        nl = np.arange(1, n, dtype=np.float64)[:, None]
        nr = n - nl
        # minimizing weighted Gini is maximizing sum of squared counts over sizes
        gain = (left.astype(np.float64) ** 2).sum(axis=2) / nl \
            + (right.astype(np.float64) ** 2).sum(axis=2) / nr
        valid = sorted_vals[1:] > sorted_vals[:-1]
        if not valid.any():
            return None
        gain = np.where(valid, gain, -np.inf)
        flat = int(np.argmax(gain))
        pos, col = divmod(flat, len(feats))
        threshold = 0.5 * (sorted_vals[pos, col] + sorted_vals[pos + 1, col])
        return int(feats[col]), float(threshold)

    def predict(self, X: np.ndarray) -> np.ndarray:
        votes = self.vote_counts(X)
        return np.argmax(votes, axis=1).astype(np.int64)

    def vote_counts(self, X: np.ndarray) -> np.ndarray:
        if self.trees_ is None:
            raise DomainError("classifier is not fitted")
        X = np.ascontiguousarray(X, dtype=np.float64)
        votes = np.zeros((len(X), self.n_classes), dtype=np.int64)
        rows = np.arange(len(X))
        for tree in self.trees_:
            votes[rows, tree.predict(X)] += 1
        return votes

    def to_params(self) -> dict:
        nodes = np.concatenate([t.nodes for t in self.trees_], axis=0)
        offsets = np.cumsum([0] + [len(t.nodes) for t in self.trees_])
        return {"tree_nodes": nodes, "tree_offsets": offsets.astype(np.float64),
                "forest_shape": np.array(
                    [self.n_trees, self.max_depth, self.min_samples_split, self.seed],
                    dtype=np.float64)}

    @classmethod
    def from_params(cls, params: dict) -> "RandomForestClassifier":
        n_trees, max_depth, min_split, seed = (int(v) for v in params["forest_shape"])
        out = cls(n_trees=n_trees, max_depth=max_depth,
                  min_samples_split=min_split, seed=seed)
        offsets = params["tree_offsets"].astype(np.int64)
        nodes = params["tree_nodes"]
        out.trees_ = [_Tree(nodes=nodes[offsets[i]:offsets[i + 1]])
                      for i in range(n_trees)]
        return out


# --------------------------------------------------------------------- svm

def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * ||a - b||^2) for every row pair."""
    a2 = (A * A).sum(axis=1)[:, None]
    b2 = (B * B).sum(axis=1)[None, :]
    sq = np.maximum(a2 + b2 - 2.0 * (A @ B.T), 0.0)
    return np.exp(-gamma * sq)


def _smo(K: np.ndarray, y: np.ndarray, C: float, tol: float,
         max_passes: int, rng: np.random.Generator) -> tuple:
    """Simplified sequential minimal optimization on a precomputed kernel.

    Sweeps the KKT-violating indices, pairing each with a random second
    index; stops after max_passes consecutive sweeps without an update.
    Returns (alpha, b).
    """
    n = len(y)
    alpha = np.zeros(n, dtype=np.float64)
    b = 0.0
    errors = -y.astype(np.float64)  # decision is identically zero at start
    passes = 0
    sweeps = 0
    while passes < max_passes and sweeps < 1000:
        sweeps += 1
        changed = 0
        ye = y * errors
        violating = np.nonzero(((ye < -tol) & (alpha < C))
                               | ((ye > tol) & (alpha > 0)))[0]
        for i in violating:
            e_i = errors[i]
            r = y[i] * e_i
            if not ((r < -tol and alpha[i] < C) or (r > tol and alpha[i] > 0)):
                continue
            j = int(rng.integers(n - 1))
            if j >= i:
                j += 1
            e_j = errors[j]
            ai_old, aj_old = alpha[i], alpha[j]
            if y[i] != y[j]:
                low, high = max(0.0, aj_old - ai_old), min(C, C + aj_old - ai_old)
            else:
                low, high = max(0.0, ai_old + aj_old - C), min(C, ai_old + aj_old)
            if low == high:
                continue
            eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
            if eta >= 0:
                continue
            aj = aj_old - y[j] * (e_i - e_j) / eta
            aj = min(high, max(low, aj))
            if abs(aj - aj_old) < 1e-5:
                continue
            ai = ai_old + y[i] * y[j] * (aj_old - aj)
            di, dj = y[i] * (ai - ai_old), y[j] * (aj - aj_old)
            b1 = b - e_i - di * K[i, i] - dj * K[i, j]
            b2 = b - e_j - di * K[i, j] - dj * K[j, j]
            if 0 < ai < C:
                new_b = b1
            elif 0 < aj < C:
                new_b = b2
            else:
                new_b = 0.5 * (b1 + b2)
            errors += di * K[i] + dj * K[j] + (new_b - b)
            alpha[i], alpha[j] = ai, aj
            b = new_b
            changed += 1
        passes = passes + 1 if changed == 0 else 0
    return alpha, b


class RbfSvmClassifier:
    """One-vs-one RBF support vector machine.

    One machine per unordered class pair, each trained by simplified SMO.
    Prediction is a vote over the 45 machines; vote ties go to the tied
    class with the largest summed signed margin, then to the lowest id.
    """

    def __init__(self, C: float = 2.0 ** 9, gamma: float = 2.0 ** -13,
                 tol: float = 1e-3, max_passes: int = 20, seed: int = 0,
                 n_classes: int = N_CLASSES):
        if C <= 0 or gamma <= 0:
            raise DomainError("C and gamma must be positive")
        self.C = C
        self.gamma = gamma
        self.tol = tol
        self.max_passes = max_passes
        self.seed = seed
        self.n_classes = n_classes
        self.machines_ = None  # list of (class_a, class_b, sv_x, dual, b)

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RbfSvmClassifier":
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        self.machines_ = []
        pair_index = 0
        for a in range(self.n_classes):
            for c in range(a + 1, self.n_classes):
                idx = np.nonzero((y == a) | (y == c))[0]
                if idx.size == 0:
                    raise DomainError(f"no samples for class pair ({a}, {c})")
                X_p = X[idx]
                y_p = np.where(y[idx] == a, 1.0, -1.0)
                K = rbf_kernel(X_p, X_p, self.gamma)
                rng = np.random.default_rng(
                    np.random.SeedSequence([self.seed, pair_index]))
                alpha, b = _smo(K, y_p, self.C, self.tol, self.max_passes, rng)
                support = alpha > 0
                self.machines_.append(
                    (a, c, X_p[support], alpha[support] * y_p[support], b))
                pair_index += 1
        return self

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        """Signed margin of every machine, one column per class pair."""
        if self.machines_ is None:
            raise DomainError("classifier is not fitted")
        X = np.ascontiguousarray(X, dtype=np.float64)
        out = np.empty((len(X), len(self.machines_)), dtype=np.float64)
        for m, (_, _, sv, dual, b) in enumerate(self.machines_):
            if len(sv):
                out[:, m] = rbf_kernel(X, sv, self.gamma) @ dual + b
            else:
                out[:, m] = b
        return out

    def vote_counts(self, X: np.ndarray) -> np.ndarray:
        """Per-class win counts over all pairwise machines."""
        decisions = self.decision_function(X)
        votes = np.zeros((len(X), self.n_classes), dtype=np.int64)
        for m, (a, c, _, _, _) in enumerate(self.machines_):
            wins_a = decisions[:, m] >= 0
            votes[:, a] += wins_a
            votes[:, c] += ~wins_a
        return votes

    def predict(self, X: np.ndarray) -> np.ndarray:
        decisions = self.decision_function(X)
        votes = np.zeros((len(X), self.n_classes), dtype=np.int64)
        margins = np.zeros((len(X), self.n_classes), dtype=np.float64)
        for m, (a, c, _, _, _) in enumerate(self.machines_):
            f = decisions[:, m]
            wins_a = f >= 0
            votes[:, a] += wins_a
            votes[:, c] += ~wins_a
            margins[:, a] += f
            margins[:, c] -= f
        out = np.empty(len(X), dtype=np.int64)
        for i in range(len(X)):
            top = votes[i].max()
            tied = np.nonzero(votes[i] == top)[0]
            if len(tied) == 1:
                out[i] = tied[0]
            else:
                out[i] = tied[int(np.argmax(margins[i][tied]))]
        return out

    def to_params(self) -> dict:
        params = {"svm_config": np.array(
            [self.C, self.gamma, self.tol, self.max_passes, self.seed],
            dtype=np.float64)}
        for m, (a, c, sv, dual, b) in enumerate(self.machines_):
            params[f"m{m:02d}_meta"] = np.array([a, c, b], dtype=np.float64)
            params[f"m{m:02d}_sv"] = sv
            params[f"m{m:02d}_dual"] = dual
        return params

    @classmethod
    def from_params(cls, params: dict) -> "RbfSvmClassifier":
        C, gamma, tol, max_passes, seed = params["svm_config"]
        out = cls(C=float(C), gamma=float(gamma), tol=float(tol),
                  max_passes=int(max_passes), seed=int(seed))
        out.machines_ = []
        m = 0
        while f"m{m:02d}_meta" in params:
            a, c, b = params[f"m{m:02d}_meta"]
            out.machines_.append((int(a), int(c), params[f"m{m:02d}_sv"],
                                  params[f"m{m:02d}_dual"], float(b)))
            m += 1
        return out
