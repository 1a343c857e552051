"""Dataset ingestion (libsvm sparse and CSV), validation, and stratified folds.

Expression matrices are dense float64, one row per sample and one column per
gene. Labels are always mapped onto {-1, +1}; only binary problems are
supported.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Raised for malformed input files or invalid dataset contents."""


@dataclass
class Dataset:
    """Dense expression matrix with binary {-1,+1} labels.

    Immutable by convention: loaders construct it once and every consumer
    (fold builder, classifiers, concurrent fitness evaluations) only reads.
    """

    values: np.ndarray          # (n_samples, n_genes) float64
    labels: np.ndarray          # (n_samples,) int, entries in {-1, +1}
    gene_ids: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.values.ndim != 2:
            raise DataError("values must be a 2-D matrix")
        if self.labels.shape != (self.values.shape[0],):
            raise DataError("labels length must equal the number of rows")
        if not np.isfinite(self.values).all():
            raise DataError("values contain NaN or infinite entries")
        classes, counts = np.unique(self.labels, return_counts=True)
        if set(classes.tolist()) != {-1, 1}:
            raise DataError(f"labels must contain exactly the classes -1 and +1, got {classes.tolist()}")
        if counts.min() < 2:
            # tiny files are loadable for inspection; CV machinery rejects them later
            warnings.warn(f"class with only {counts.min()} sample(s); cross-validation will refuse this data")
        if not self.gene_ids:
            self.gene_ids = [str(j) for j in range(self.values.shape[1])]
        if len(self.gene_ids) != self.values.shape[1]:
            raise DataError("gene_ids length must equal the number of columns")
        if len(set(self.gene_ids)) != len(self.gene_ids):
            raise DataError("gene_ids must be unique")

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_genes(self) -> int:
        return self.values.shape[1]

    def class_counts(self) -> dict[int, int]:
        classes, counts = np.unique(self.labels, return_counts=True)
        return dict(zip(classes.tolist(), counts.tolist()))


@dataclass
class FoldAssignment:
    """Assignment of each sample to one of k cross-validation folds."""

    k: int
    fold_of: np.ndarray         # (n_samples,) int in [0, k)

    def __post_init__(self):
        self.fold_of = np.asarray(self.fold_of, dtype=np.int64)

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != fold)


def _map_numeric_labels(raw: np.ndarray) -> np.ndarray:
    """Map two distinct numeric labels onto {-1, +1}, smaller value -> -1."""
    distinct = np.unique(raw)
    if len(distinct) > 2:
        raise DataError(f"more than two distinct labels: {distinct.tolist()}")
    if len(distinct) < 2:
        raise DataError("fewer than two distinct labels")
    return np.where(raw == distinct[0], -1, 1)


def load_libsvm(path, n_genes: int | None = None) -> Dataset:
    """Load a dataset in libsvm sparse text format.

    Each line is ``label idx:val ...`` with 1-based, strictly increasing
    indices; absent entries densify to 0.0. ``n_genes`` overrides the matrix
    width when trailing genes never appear in any row.
    """
    rows: list[dict[int, float]] = []
    raw_labels: list[float] = []
    max_idx = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            try:
                raw_labels.append(float(parts[0]))
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad label {parts[0]!r}") from None
            entries: dict[int, float] = {}
            prev = 0
            for tok in parts[1:]:
                try:
                    idx_s, val_s = tok.split(":", 1)
                    idx = int(idx_s)
                    val = float(val_s)
                except ValueError:
                    raise DataError(f"{path}:{lineno}: bad entry {tok!r}") from None
                if idx <= prev:
                    raise DataError(f"{path}:{lineno}: indices must be 1-based strictly increasing")
                prev = idx
                entries[idx - 1] = val
            max_idx = max(max_idx, prev)
            rows.append(entries)
    if not rows:
        raise DataError(f"{path}: empty file")
    width = n_genes if n_genes is not None else max_idx
    if width < max_idx:
        raise DataError(f"{path}: n_genes={width} smaller than max observed index {max_idx}")
    values = np.zeros((len(rows), width))
    for i, entries in enumerate(rows):
        for j, v in entries.items():
            values[i, j] = v
    labels = _map_numeric_labels(np.asarray(raw_labels))
    return Dataset(values, labels)


def save_libsvm(ds: Dataset, path) -> None:
    """Write a Dataset in libsvm format; zeros are omitted."""
    with open(path, "w") as fh:
        for i in range(ds.n_samples):
            toks = [f"{ds.labels[i]:+d}"]
            row = ds.values[i]
            for j in np.flatnonzero(row != 0.0):
                toks.append(f"{j + 1}:{float(row[j])!r}")
            fh.write(" ".join(toks) + "\n")


def load_csv(path, label_column: str) -> Dataset:
    """Load a dataset from a headered CSV file.

    All non-label columns must be numeric. Class names are mapped
    deterministically: the lexicographically smaller one becomes -1.
    """
    with open(path) as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if len(set(header)) != len(header):
            raise DataError(f"{path}: duplicate header names")
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not in header")
        label_idx = header.index(label_column)
        gene_ids = [h for i, h in enumerate(header) if i != label_idx]
        rows = []
        raw_labels = []
        for rowno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataError(f"{path}: row {rowno}: expected {len(header)} cells, got {len(row)}")
            raw_labels.append(row[label_idx])
            vals = []
            for i, cell in enumerate(row):
                if i == label_idx:
                    continue
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise DataError(f"{path}: row {rowno}, column {header[i]!r}: non-numeric value {cell!r}") from None
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no data rows")
    classes = sorted(set(raw_labels))
    if len(classes) != 2:
        raise DataError(f"{path}: expected exactly two classes, got {classes}")
    labels = np.array([-1 if lab == classes[0] else 1 for lab in raw_labels])
    return Dataset(np.asarray(rows), labels, gene_ids)


def stratified_folds(ds: Dataset, k: int, seed: int) -> FoldAssignment:
    """Assign samples to k stratified folds, deterministic in the seed.

    Per-class extras go to the currently least-loaded folds so overall fold
    sizes differ by at most one. If the rarest class has fewer than k
    samples, k falls back to that count with a warning.
    """
    if k < 2:
        raise DataError("k must be at least 2")
    counts = ds.class_counts()
    min_class = min(counts.values())
    if min_class < k:
        warnings.warn(f"k={k} exceeds the smallest class ({min_class} samples); using k={min_class}")
        k = min_class
        if k < 2:
            raise DataError("smallest class has fewer than 2 samples; cannot cross-validate")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(ds.n_samples, dtype=np.int64)
    load = np.zeros(k, dtype=np.int64)
    for cls in sorted(counts):
        idx = np.flatnonzero(ds.labels == cls)
        rng.shuffle(idx)
        n_c = len(idx)
        base, extra = divmod(n_c, k)
        # folds ordered by current load get the per-class remainder first
        order = np.lexsort((np.arange(k), load))
        sizes = np.full(k, base, dtype=np.int64)
        sizes[order[:extra]] += 1
        pos = 0
        for f in range(k):
            fold_of[idx[pos:pos + sizes[f]]] = f
            pos += sizes[f]
        load += sizes
    return FoldAssignment(k, fold_of)


def restrict(ds: Dataset, genes) -> Dataset:
    """Project the dataset onto the given gene columns, in the given order."""
    genes = list(genes)
    if len(set(genes)) != len(genes):
        raise DataError(f"duplicate gene index in {genes}")
    for g in genes:
        if not 0 <= g < ds.n_genes:
            raise DataError(f"gene index {g} out of range [0, {ds.n_genes})")
    return Dataset(ds.values[:, genes], ds.labels.copy(), [ds.gene_ids[g] for g in genes])
