"""CART decision trees and bootstrap random forests with OOB error.

Trees are grown to purity (no pruning) with Gini impurity; each node
searches a random draw of `mtry` genes for the best threshold. Growth and
prediction run as compiled kernels over flat node arrays; all randomness is
drawn up front from a generator derived from (seed, tree index), so
parallel and serial training produce identical forests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

_MIN_DECREASE = 1e-12


@dataclass
class DecisionTree:
    """Flat node arrays: gene[i] < 0 marks a leaf carrying label[i]."""

    gene: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    label: np.ndarray
    n_genes: int

    @property
    def n_nodes(self) -> int:
        return len(self.gene)

    def internal_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.gene >= 0)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_genes:
            raise ValueError(f"expected {self.n_genes} features, got {X.shape[1]}")
        return _predict_kernel(self.gene, self.threshold, self.left, self.right, self.label,
                               np.ascontiguousarray(X))

    def node_samples(self, X: np.ndarray) -> list[np.ndarray]:
        """Training-row indices reaching each node; used by split audits."""
        X = np.asarray(X, dtype=np.float64)
        reached: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for i in range(len(X)):
            nid = 0
            reached[nid].append(i)
            while self.gene[nid] >= 0:
                nid = self.left[nid] if X[i, self.gene[nid]] <= self.threshold[nid] else self.right[nid]
                reached[nid].append(i)
        return [np.asarray(r, dtype=np.int64) for r in reached]


@dataclass
class ForestModel:
    trees: list[DecisionTree]
    inbag: np.ndarray            # (n_trees, n_train) bool
    n_trees: int
    mtry: int


@njit(cache=True)
def _grow_kernel(X, pos, cand, min_decrease):
    """Grow one tree; returns flat (gene, threshold, left, right, label) arrays.

    `cand` holds one pre-drawn row of candidate gene indices per possible
    internal node. Ties in the split search resolve to the lowest candidate
    column, then the lowest cut position.
    """
    n = X.shape[0]
    max_nodes = 2 * n
    gene = np.full(max_nodes, -1, np.int64)
    thr = np.zeros(max_nodes)
    left = np.full(max_nodes, -1, np.int64)
    right = np.full(max_nodes, -1, np.int64)
    label = np.zeros(max_nodes, np.int64)
    idxbuf = np.arange(n)
    stack = np.empty((max_nodes, 3), np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n
    sp = 1
    n_nodes = 1
    cand_row = 0
    while sp > 0:
        sp -= 1
        nid = stack[sp, 0]
        a = stack[sp, 1]
        b = stack[sp, 2]
        size = b - a
        n_pos = 0
        for t in range(a, b):
            n_pos += pos[idxbuf[t]]
        if n_pos == 0 or n_pos == size or size < 2:
            label[nid] = 1 if 2 * n_pos > size else -1
            continue
        p = n_pos / size
        parent = 1.0 - p * p - (1.0 - p) * (1.0 - p)
        best_w = parent - min_decrease
        best_g = -1
        best_thr = 0.0
        row = cand[cand_row]
        cand_row += 1
        vals = np.empty(size)
        flags = np.empty(size)
        for ci in range(len(row)):
            g = row[ci]
            for t in range(size):
                vals[t] = X[idxbuf[a + t], g]
            order = np.argsort(vals)
            for t in range(size):
                flags[t] = pos[idxbuf[a + order[t]]]
            cum = 0.0
            for t in range(size - 1):
                cum += flags[t]
                va = vals[order[t]]
                vb = vals[order[t + 1]]
                if vb <= va:
                    continue
                nl = t + 1.0
                nr = size - nl
                ql = cum / nl
                qr = (n_pos - cum) / nr
                w = (nl * (1.0 - ql * ql - (1.0 - ql) * (1.0 - ql))
                     + nr * (1.0 - qr * qr - (1.0 - qr) * (1.0 - qr))) / size
                if w < best_w:
                    best_w = w
                    best_g = g
                    best_thr = 0.5 * (va + vb)
        if best_g < 0:
            label[nid] = 1 if 2 * n_pos > size else -1
            continue
        # in-place partition of idxbuf[a:b]
        lo = a
        hi = b - 1
        while lo <= hi:
            if X[idxbuf[lo], best_g] <= best_thr:
                lo += 1
            else:
                tmp = idxbuf[lo]
                idxbuf[lo] = idxbuf[hi]
                idxbuf[hi] = tmp
                hi -= 1
        gene[nid] = best_g
        thr[nid] = best_thr
        left[nid] = n_nodes
        right[nid] = n_nodes + 1
        stack[sp, 0] = n_nodes
        stack[sp, 1] = a
        stack[sp, 2] = lo
        stack[sp + 1, 0] = n_nodes + 1
        stack[sp + 1, 1] = lo
        stack[sp + 1, 2] = b
        sp += 2
        n_nodes += 2
    return gene[:n_nodes], thr[:n_nodes], left[:n_nodes], right[:n_nodes], label[:n_nodes]


@njit(cache=True)
def _predict_kernel(gene, thr, left, right, label, X):
    out = np.empty(X.shape[0], np.int64)
    for i in range(X.shape[0]):
        nid = 0
        while gene[nid] >= 0:
            if X[i, gene[nid]] <= thr[nid]:
                nid = left[nid]
            else:
                nid = right[nid]
        out[i] = label[nid]
    return out


def _candidate_pool(n_rows: int, n_genes: int, mtry: int, rng: np.random.Generator) -> np.ndarray:
    """One sorted mtry-subset of genes per potential internal node."""
    if mtry >= n_genes:
        return np.broadcast_to(np.arange(n_genes, dtype=np.int64), (max(n_rows, 1), n_genes)).copy()
    keys = rng.random((max(n_rows, 1), n_genes))
    return np.sort(np.argsort(keys, axis=1)[:, :mtry].astype(np.int64), axis=1)


def _grow_tree(X: np.ndarray, y: np.ndarray, mtry: int, rng: np.random.Generator) -> DecisionTree:
    X = np.ascontiguousarray(X, dtype=np.float64)
    pos = (y == 1).astype(np.int64)
    cand = _candidate_pool(X.shape[0], X.shape[1], mtry, rng)
    gene, thr, left, right, label = _grow_kernel(X, pos, cand, _MIN_DECREASE)
    return DecisionTree(gene, thr, left, right, label, X.shape[1])


def tree_grow(train, mtry: int, rng: np.random.Generator) -> DecisionTree:
    """Grow one CART tree on the full dataset (no bootstrap)."""
    if not 1 <= mtry <= train.n_genes:
        raise ValueError(f"mtry must be in [1, {train.n_genes}]")
    return _grow_tree(train.values, train.labels, mtry, rng)


def default_mtry(n_genes: int) -> int:
    return max(1, int(np.sqrt(n_genes)))


def fit_forest(X: np.ndarray, y: np.ndarray, n_trees: int, mtry: int | None, seed: int) -> ForestModel:
    """Train on raw arrays; `forest_train` is the Dataset-facing wrapper."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    n, m = X.shape
    if mtry is None:
        mtry = default_mtry(m)
    trees = []
    inbag = np.zeros((n_trees, n), dtype=bool)
    for t in range(n_trees):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), t]))
        draws = rng.integers(0, n, size=n)
        inbag[t, draws] = True
        trees.append(_grow_tree(X[draws], y[draws], mtry, rng))
    return ForestModel(trees, inbag, n_trees, mtry)


def forest_train(train, n_trees: int = 500, mtry: int | None = None, seed: int = 0) -> ForestModel:
    """Train n_trees bootstrapped CART trees; deterministic in the seed."""
    return fit_forest(train.values, train.labels, n_trees, mtry, seed)


def forest_predict(model: ForestModel, x: np.ndarray) -> np.ndarray | int:
    """Majority vote over all trees; an exact tie resolves to -1."""
    x = np.asarray(x, dtype=np.float64)
    votes = np.zeros(1 if x.ndim == 1 else len(x), dtype=np.int64)
    for tree in model.trees:
        votes += tree.predict(x)
    labels = np.where(votes > 0, 1, -1)
    if x.ndim == 1:
        return int(labels[0])
    return labels


def oob_votes(model: ForestModel, train) -> np.ndarray:
    """Summed votes per training sample from trees that did not see it."""
    votes = np.zeros(train.n_samples, dtype=np.int64)
    for t, tree in enumerate(model.trees):
        oob = ~model.inbag[t]
        if oob.any():
            votes[oob] += tree.predict(train.values[oob])
    return votes


def oob_details(model: ForestModel, train) -> dict:
    """OOB error plus how many samples had no OOB tree at all."""
    votes = oob_votes(model, train)
    has_vote = (~model.inbag).any(axis=0)
    predicted = np.where(votes > 0, 1, -1)
    voted = int(has_vote.sum())
    wrong = int((predicted[has_vote] != train.labels[has_vote]).sum())
    return {
        "error": wrong / voted if voted else 0.0,
        "n_voted": voted,
        "n_skipped": train.n_samples - voted,
    }


def oob_error(model: ForestModel, train) -> float:
    """Fraction of OOB-voted training samples whose vote disagrees with the label."""
    return oob_details(model, train)["error"]
