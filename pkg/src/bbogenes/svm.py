"""Soft-margin RBF-kernel SVM trained by two-variable dual decomposition.

The solver repeatedly optimizes the maximal KKT-violating pair of dual
variables (SMO-style) until the violation gap falls below tolerance.
Features are min-max scaled to [0,1] on the training data; the scaling is
part of the model so prediction sees the same coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bbogenes.data import Dataset


class SvmTrainingError(RuntimeError):
    """Solver failed to reach the KKT tolerance within the iteration cap."""


@dataclass
class SvmModel:
    support_vectors: np.ndarray   # (n_sv, n_genes), already scaled
    alphas: np.ndarray            # (n_sv,), signed by label, 0 < |a_i| <= C
    bias: float
    gamma: float
    cost: float
    scale_min: np.ndarray         # per-gene training minimum
    scale_range: np.ndarray       # per-gene (max - min); 0 for constant genes

    @property
    def n_genes(self) -> int:
        return self.support_vectors.shape[1]

    def scale(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != len(self.scale_min):
            raise ValueError(f"expected {len(self.scale_min)} features, got {X.shape[1]}")
        rng = np.where(self.scale_range > 0, self.scale_range, 1.0)
        return np.where(self.scale_range > 0, (X - self.scale_min) / rng, 0.0)


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * ||a - b||^2) for all row pairs."""
    sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * A @ B.T
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def _solve_dual(K: np.ndarray, y: np.ndarray, C: float, tol: float, max_iter: int):
    """Maximal-violating-pair decomposition for the C-SVC dual.

    Returns (alpha, bias). Gradient of the (minimization form) objective
    1/2 a'Qa - e'a is tracked incrementally; bias is the midpoint of the
    feasible interval at the solution.
    """
    n = len(y)
    alpha = np.zeros(n)
    grad = -np.ones(n)          # Q @ alpha - 1
    Q = (y[:, None] * y[None, :]) * K
    ypos = y > 0
    yneg = ~ypos
    inf = np.inf
    for _ in range(max_iter):
        viol = -y * grad
        not_at_c = alpha < C - 1e-12
        not_at_0 = alpha > 1e-12
        vu = np.where((ypos & not_at_c) | (yneg & not_at_0), viol, -inf)
        vl = np.where((yneg & not_at_c) | (ypos & not_at_0), viol, inf)
        i = int(np.argmax(vu))
        j = int(np.argmin(vl))
        if vu[i] == -inf or vl[j] == inf:
            break
        if vu[i] - vl[j] <= tol:
            break
        s = y[i] * y[j]
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if s < 0:
            L = max(0.0, alpha[j] - alpha[i])
            H = min(C, C + alpha[j] - alpha[i])
        else:
            L = max(0.0, alpha[i] + alpha[j] - C)
            H = min(C, alpha[i] + alpha[j])
        Ei = y[i] * grad[i]
        Ej = y[j] * grad[j]
        if eta > 1e-15:
            aj = alpha[j] + y[j] * (Ei - Ej) / eta
        else:
            # degenerate pair (duplicate points): push to the better bound
            aj = H if y[j] * (Ei - Ej) > 0 else L
        aj = min(max(aj, L), H)
        ai = alpha[i] + s * (alpha[j] - aj)
        d_i, d_j = ai - alpha[i], aj - alpha[j]
        if abs(d_j) < 1e-14 and abs(d_i) < 1e-14:
            break
        alpha[i], alpha[j] = ai, aj
        grad += Q[:, i] * d_i + Q[:, j] * d_j
    else:
        raise SvmTrainingError(f"no convergence within {max_iter} iterations")
    bias = _bias_from_kkt(alpha, grad, y, C)
    return alpha, bias


def _bias_from_kkt(alpha: np.ndarray, grad: np.ndarray, y: np.ndarray, C: float) -> float:
    """Midpoint of the bias interval permitted by the KKT conditions."""
    r = -y * grad  # the bias value that would put sample i exactly on its margin
    free = (alpha > 1e-8) & (alpha < C - 1e-8)
    if free.any():
        return float(r[free].mean())
    up = ((y > 0) & (alpha < C - 1e-8)) | ((y < 0) & (alpha > 1e-8))
    low = ((y < 0) & (alpha < C - 1e-8)) | ((y > 0) & (alpha > 1e-8))
    hi = r[up].max() if up.any() else r[low].min()
    lo = r[low].min() if low.any() else r[up].max()
    return float((hi + lo) / 2.0)


def fit_svm(X: np.ndarray, y: np.ndarray, cost: float, gamma: float,
            tol: float = 1e-3, max_iter: int = 10_000_000) -> SvmModel:
    """Train on raw arrays; `svm_train` is the Dataset-facing wrapper."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if cost <= 0 or gamma <= 0:
        raise ValueError("cost and gamma must be positive")
    if len(np.unique(y)) != 2:
        raise ValueError("training data must contain both classes")
    mins = X.min(axis=0)
    ranges = X.max(axis=0) - mins
    Xs = np.where(ranges > 0, (X - mins) / np.where(ranges > 0, ranges, 1.0), 0.0)
    K = rbf_kernel(Xs, Xs, gamma)
    alpha, bias = _solve_dual(K, y, cost, tol, max_iter)
    sv = alpha > 1e-8
    return SvmModel(
        support_vectors=Xs[sv],
        alphas=alpha[sv] * y[sv],
        bias=bias,
        gamma=gamma,
        cost=cost,
        scale_min=mins,
        scale_range=ranges,
    )


def svm_train(train: Dataset, cost: float = 50.0, gamma: float = 0.02,
              tol: float = 1e-3, max_iter: int = 10_000_000) -> SvmModel:
    """Train a C-SVC with RBF kernel on the full dataset."""
    return fit_svm(train.values, train.labels, cost, gamma, tol, max_iter)


def svm_decision(model: SvmModel, X: np.ndarray) -> np.ndarray:
    """Decision values f(x) = sum_i a_i K(x_i, x) + b, vectorized over rows."""
    Xs = model.scale(X)
    K = rbf_kernel(Xs, model.support_vectors, model.gamma)
    return K @ model.alphas + model.bias


def svm_predict(model: SvmModel, x: np.ndarray) -> np.ndarray | int:
    """Class labels from the decision sign; f(x) = 0 resolves to +1."""
    f = svm_decision(model, x)
    labels = np.where(f >= 0, 1, -1)
    if np.asarray(x).ndim == 1:
        return int(labels[0])
    return labels


def dual_objective(model_or_alpha, K: np.ndarray | None = None, y: np.ndarray | None = None):
    """W(a) = sum a - 1/2 sum a_i a_j y_i y_j K_ij for a raw alpha vector."""
    alpha = np.asarray(model_or_alpha, dtype=np.float64)
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)
