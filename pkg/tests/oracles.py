"""Independent reference implementations used to check the real code.

Everything here is deliberately naive: active-set enumeration for the SVM
dual, exhaustive threshold scans for information gain and Gini splits, and
double-loop recounts for OOB error. None of it shares code with the
package's implementations.
"""

import itertools
from fractions import Fraction

import numpy as np


def qp_dual_brute(K, y, C):
    """Globally solve the C-SVC dual by enumerating active sets.

    Each alpha is fixed at 0, fixed at C, or free; for every one of the 3^n
    assignments the KKT equality system for the free block (plus the bias
    multiplier) is solved and checked for feasibility. Returns
    (objective, alpha) of the best feasible point.
    """
    n = len(y)
    y = np.asarray(y, dtype=float)
    best_obj, best_alpha = -np.inf, None

    def objective(a):
        ay = a * y
        return a.sum() - 0.5 * ay @ K @ ay

    for assignment in itertools.product((0, 1, 2), repeat=n):
        alpha = np.zeros(n)
        free = [i for i, s in enumerate(assignment) if s == 2]
        at_c = [i for i, s in enumerate(assignment) if s == 1]
        alpha[at_c] = C
        if free:
            # stationarity for free i: sum_j a_j y_i y_j K_ij + b*y_i = 1
            F = len(free)
            A = np.zeros((F + 1, F + 1))
            rhs = np.zeros(F + 1)
            for r, i in enumerate(free):
                for c, j in enumerate(free):
                    A[r, c] = y[i] * y[j] * K[i, j]
                A[r, F] = y[i]
                rhs[r] = 1.0 - sum(C * y[i] * y[j] * K[i, j] for j in at_c)
            for c, j in enumerate(free):
                A[F, c] = y[j]
            rhs[F] = -sum(C * y[j] for j in at_c)
            try:
                sol = np.linalg.solve(A, rhs)
            except np.linalg.LinAlgError:
                continue
            if not np.all((sol[:F] > -1e-9) & (sol[:F] < C + 1e-9)):
                continue
            alpha[free] = np.clip(sol[:F], 0, C)
        else:
            if abs(alpha @ y) > 1e-9:
                continue
        if abs(alpha @ y) > 1e-6:
            continue
        obj = objective(alpha)
        if obj > best_obj:
            best_obj, best_alpha = obj, alpha.copy()
    return best_obj, best_alpha


def qp_bias(K, y, C, alpha, tol=1e-7):
    """Bias from the KKT conditions, midpoint of the feasible interval."""
    u = K @ (alpha * y)
    r = y - u
    free = (alpha > tol) & (alpha < C - tol)
    if free.any():
        return float(r[free].mean())
    lower, upper = [], []
    for i in range(len(y)):
        if (alpha[i] <= tol and y[i] > 0) or (alpha[i] >= C - tol and y[i] < 0):
            lower.append(r[i])
        if (alpha[i] <= tol and y[i] < 0) or (alpha[i] >= C - tol and y[i] > 0):
            upper.append(r[i])
    hi = max(lower) if lower else min(upper)
    lo = min(upper) if upper else max(lower)
    return float((hi + lo) / 2.0)


def info_gain_brute(values, labels):
    """IG by trying a cut at every position of the sorted sample order."""

    def entropy(lab):
        if len(lab) == 0:
            return 0.0
        h = 0.0
        for c in (-1, 1):
            p = np.mean(lab == c)
            if p > 0:
                h -= p * np.log2(p)
        return h

    order = np.argsort(values, kind="stable")
    v = np.asarray(values)[order]
    lab = np.asarray(labels)[order]
    n = len(v)
    h0 = entropy(lab)
    best = h0
    for i in range(1, n):
        if v[i] <= v[i - 1]:
            continue
        cond = (i * entropy(lab[:i]) + (n - i) * entropy(lab[i:])) / n
        best = min(best, cond)
    return max(0.0, h0 - best)


def gini_weighted_exact(y, left_mask):
    """Weighted Gini impurity of a binary split as an exact Fraction."""

    def gini(lab):
        m = len(lab)
        if m == 0:
            return Fraction(0)
        p = int((lab == 1).sum())
        return Fraction(m * m - p * p - (m - p) * (m - p), m * m)

    n = len(y)
    nl = int(left_mask.sum())
    return (nl * gini(y[left_mask]) + (n - nl) * gini(y[~left_mask])) / n


def gini_best_split_brute(X, y):
    """(weighted_gini, gene, threshold) over every gene and midpoint.

    Impurities are compared exactly (rational arithmetic), so distinct cuts
    with mathematically equal impurity are genuine ties; the first one in
    (gene, threshold) order is returned.
    """
    best = (None, None, None)
    for g in range(X.shape[1]):
        vals = np.unique(X[:, g])
        for a, b in zip(vals[:-1], vals[1:]):
            thr = (a + b) / 2.0
            w = gini_weighted_exact(y, X[:, g] <= thr)
            if best[0] is None or w < best[0]:
                best = (w, g, thr)
    return best


def oob_error_recount(trees, inbag, X, y):
    """Straightforward double-loop OOB recount; ties vote -1."""
    wrong = voted = 0
    for i in range(len(y)):
        votes = 0
        saw = False
        for t, tree in enumerate(trees):
            if not inbag[t, i]:
                votes += tree.predict(X[i])
                saw = True
        if not saw:
            continue
        voted += 1
        pred = 1 if votes > 0 else -1
        if pred != y[i]:
            wrong += 1
    return (wrong / voted if voted else 0.0), voted


def cv_accuracy_brute(ds, genes, fold_of, k, train_predict):
    """Pooled CV accuracy with an explicit per-fold loop.

    `train_predict(Xtr, ytr, Xte) -> labels` supplies the classifier, so
    this stays an independent recount of the fitness plumbing.
    """
    X = ds.values[:, list(genes)]
    y = ds.labels
    correct = 0
    for f in range(k):
        te = fold_of == f
        tr = ~te
        pred = train_predict(X[tr], y[tr], X[te])
        correct += int((pred == y[te]).sum())
    return correct / len(y)
