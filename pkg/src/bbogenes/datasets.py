"""Deterministic synthetic expression datasets.

Real microarray data cannot ship with the package, so benchmarks and tests
run against generated stand-ins that copy the shapes and class splits of
the three classic two-class datasets (colon 62x2000 with a 40/22 split,
breast 44x7129 with 22/22, leukemia 72x7129 with 25/47) and plant a mix of
strongly and moderately class-separating genes among the noise.
"""

from __future__ import annotations

import numpy as np

from bbogenes.data import Dataset


def planted_shift_dataset(n_samples: int, n_genes: int, n_planted: int,
                          shift: float, seed: int) -> tuple[Dataset, list[int]]:
    """Noise genes N(0,1); planted genes get a +shift class-mean offset."""
    rng = np.random.default_rng(seed)
    labels = np.where(np.arange(n_samples) < n_samples // 2, -1, 1)
    rng.shuffle(labels)
    values = rng.normal(size=(n_samples, n_genes))
    planted = sorted(rng.choice(n_genes, size=n_planted, replace=False).tolist())
    for g in planted:
        values[labels == 1, g] += shift
    return Dataset(values, labels), planted


def planted_sum_dataset(n_samples: int = 60, n_genes: int = 40, n_planted: int = 3,
                        margin: float = 0.5, seed: int = 2024) -> tuple[Dataset, list[int]]:
    """Label is the sign of the planted genes' sum, kept away from zero.

    Each planted gene alone is only weakly predictive; the full planted set
    is linearly separable with the given margin, so the planted subset is
    the unique globally optimal habitat of its size.
    """
    rng = np.random.default_rng(seed)
    rows = []
    labels = []
    while len(rows) < n_samples:
        z = rng.normal(size=n_planted)
        if abs(z.sum()) < margin:
            continue
        rows.append(z)
        labels.append(1 if z.sum() > 0 else -1)
    labels = np.asarray(labels)
    values = rng.normal(size=(n_samples, n_genes))
    planted = sorted(rng.choice(n_genes, size=n_planted, replace=False).tolist())
    values[:, planted] = np.asarray(rows)
    return Dataset(values, labels), planted


def noise_dataset(n_samples: int, n_genes: int, class_sizes: tuple[int, int], seed: int) -> Dataset:
    """Pure noise: no gene carries any class signal."""
    rng = np.random.default_rng(seed)
    labels = np.array([-1] * class_sizes[0] + [1] * class_sizes[1])
    rng.shuffle(labels)
    return Dataset(rng.normal(size=(n_samples, n_genes)), labels)


def microarray_like(n_samples: int, n_genes: int, class_sizes: tuple[int, int],
                    n_strong: int, n_moderate: int, seed: int) -> Dataset:
    """Noise matrix with planted separating genes and microarray-scale units.

    Strong genes shift the positive class by ~3 sigma (individually almost
    separating); moderate genes by 0.8-1.6 sigma. Every gene then gets a
    random positive scale and offset so raw values resemble intensity data
    and exercise the classifiers' feature scaling.
    """
    if sum(class_sizes) != n_samples:
        raise ValueError("class sizes must sum to n_samples")
    rng = np.random.default_rng(seed)
    labels = np.array([-1] * class_sizes[0] + [1] * class_sizes[1])
    rng.shuffle(labels)
    values = rng.normal(size=(n_samples, n_genes))
    special = rng.choice(n_genes, size=n_strong + n_moderate, replace=False)
    for g in special[:n_strong]:
        values[labels == 1, g] += rng.uniform(2.8, 3.4)
    for g in special[n_strong:]:
        values[labels == 1, g] += rng.uniform(0.8, 1.6)
    scale = rng.uniform(1.0, 100.0, size=n_genes)
    offset = rng.uniform(0.0, 1000.0, size=n_genes)
    values = values * scale + offset
    gene_ids = [f"G{j:04d}" for j in range(n_genes)]
    return Dataset(values, labels, gene_ids)


PRESETS = {
    "colon": dict(n_samples=62, n_genes=2000, class_sizes=(40, 22), n_strong=4, n_moderate=26, seed=107),
    "breast": dict(n_samples=44, n_genes=7129, class_sizes=(22, 22), n_strong=4, n_moderate=26, seed=108),
    "leukemia": dict(n_samples=72, n_genes=7129, class_sizes=(25, 47), n_strong=4, n_moderate=26, seed=109),
}


def preset(name: str, seed: int | None = None) -> Dataset:
    """One of the Table-shaped stand-ins: colon, breast, or leukemia."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    kwargs = dict(PRESETS[name])
    if seed is not None:
        kwargs["seed"] = seed
    return microarray_like(**kwargs)
