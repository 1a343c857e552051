"""Habitat fitness: stratified k-fold CV accuracy of a configured classifier.

Fold assignment is computed once per run and shared across all habitat
evaluations, so HSI differences reflect gene subsets rather than fold noise.
Evaluations are pure given (dataset, genes, config, folds), which makes the
memoization cache and thread-parallel evaluation semantically invisible.
"""

from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from bbogenes.data import Dataset, FoldAssignment, restrict, stratified_folds
from bbogenes.forest import fit_forest
from bbogenes.svm import SvmTrainingError, fit_svm, svm_decision

log = logging.getLogger(__name__)


@dataclass
class FitnessConfig:
    classifier: str = "svm"          # "svm" | "rf"
    svm_cost: float = 50.0
    svm_gamma: float = 0.02
    folds: int = 10
    rf_trees: int = 500
    rf_mtry: int | None = None       # None = floor(sqrt(subset size))
    seed: int = 0

    def __post_init__(self):
        if self.classifier not in ("svm", "rf"):
            raise ValueError(f"unknown classifier {self.classifier!r}")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if self.svm_cost <= 0 or self.svm_gamma <= 0:
            raise ValueError("svm_cost and svm_gamma must be positive")
        if self.rf_trees < 1:
            raise ValueError("rf_trees must be >= 1")

    def to_dict(self) -> dict:
        return {
            "classifier": self.classifier,
            "svm_cost": self.svm_cost,
            "svm_gamma": self.svm_gamma,
            "folds": self.folds,
            "rf_trees": self.rf_trees,
            "rf_mtry": self.rf_mtry,
            "seed": self.seed,
        }


class FitnessCache:
    """Thread-safe memoization of HSI keyed by the sorted gene subset."""

    def __init__(self):
        self._store: dict[tuple[int, ...], tuple[float, list[float]]] = {}
        self._lock = threading.Lock()
        self.hits = 0

    def get(self, key):
        with self._lock:
            found = self._store.get(key)
            if found is not None:
                self.hits += 1
            return found

    def put(self, key, value):
        with self._lock:
            self._store[key] = value

    def __len__(self):
        return len(self._store)


def make_folds(ds: Dataset, cfg: FitnessConfig) -> FoldAssignment:
    return stratified_folds(ds, cfg.folds, cfg.seed)


def _fold_seed(cfg_seed: int, fold: int, genes: tuple[int, ...]) -> int:
    ss = np.random.SeedSequence([int(cfg_seed), fold, *genes])
    return int(ss.generate_state(1)[0])


def _evaluate(ds: Dataset, genes, cfg: FitnessConfig, folds: FoldAssignment):
    key = tuple(sorted(genes))
    # evaluate on the sorted subset so HSI is independent of SIV order,
    # matching the cache key (column order changes RF candidate draws)
    sub = restrict(ds, key)
    X, y = sub.values, sub.labels
    correct = 0
    per_fold = []
    for f in range(folds.k):
        tr = folds.train_indices(f)
        te = folds.test_indices(f)
        if cfg.classifier == "svm":
            model = fit_svm(X[tr], y[tr], cfg.svm_cost, cfg.svm_gamma)
            pred = np.where(svm_decision(model, X[te]) >= 0, 1, -1)
        else:
            model = fit_forest(X[tr], y[tr], cfg.rf_trees, cfg.rf_mtry, _fold_seed(cfg.seed, f, key))
            votes = np.zeros(len(te), dtype=np.int64)
            for tree in model.trees:
                votes += tree.predict(X[te])
            pred = np.where(votes > 0, 1, -1)
        ok = int((pred == y[te]).sum())
        correct += ok
        per_fold.append(ok / len(te))
    return correct / ds.n_samples, per_fold


def evaluate_hsi_detailed(ds: Dataset, genes, cfg: FitnessConfig,
                          folds: FoldAssignment | None = None,
                          cache: FitnessCache | None = None):
    """(HSI, per-fold accuracies); classifier failure yields HSI 0 with a diagnostic."""
    if folds is None:
        folds = make_folds(ds, cfg)
    key = tuple(sorted(genes))
    if cache is not None:
        found = cache.get(key)
        if found is not None:
            return found
    try:
        result = _evaluate(ds, genes, cfg, folds)
    except SvmTrainingError as exc:
        log.warning("classifier failed on subset %s: %s; HSI set to 0", key, exc)
        result = (0.0, [])
    if cache is not None:
        cache.put(key, result)
    return result


def evaluate_hsi(ds: Dataset, genes, cfg: FitnessConfig,
                 folds: FoldAssignment | None = None,
                 cache: FitnessCache | None = None) -> float:
    """Stratified k-fold CV accuracy of the configured classifier on the subset."""
    return evaluate_hsi_detailed(ds, genes, cfg, folds, cache)[0]


def evaluate_population(ds: Dataset, habitats, cfg: FitnessConfig,
                        folds: FoldAssignment | None = None,
                        cache: FitnessCache | None = None,
                        n_jobs: int = 1) -> list[float]:
    """HSI for every habitat; results are independent of evaluation order."""
    if folds is None:
        folds = make_folds(ds, cfg)
    if n_jobs <= 1:
        return [evaluate_hsi(ds, genes, cfg, folds, cache) for genes in habitats]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(lambda g: evaluate_hsi(ds, g, cfg, folds, cache), habitats))
