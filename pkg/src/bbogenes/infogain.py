"""Per-gene information gain and the IG-weighted sampling used by mutation.

IG of a gene is the reduction in label entropy achieved by the single best
binary threshold on that gene; thresholds are midpoints between consecutive
distinct sorted values, so the score depends only on the ordering of the
expression values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from bbogenes.data import Dataset

# genes with IG above this count as informative; guards float noise around 0
INFORMATIVE_TOL = 1e-9


class NoInformativeGene(ValueError):
    """Every informative gene is excluded; caller falls back to uniform exploration."""


@dataclass
class GeneRanking:
    """IG scores for all genes plus the informative/non-informative partition."""

    ig: np.ndarray              # (n_genes,) gain in bits, >= 0
    informative: np.ndarray     # gene indices with ig > tol, ig descending, ties by index
    total_informative_ig: float

    @property
    def n_genes(self) -> int:
        return len(self.ig)


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def label_entropy(ds: Dataset) -> float:
    """Entropy of the class labels in bits."""
    _, counts = np.unique(ds.labels, return_counts=True)
    return _entropy(counts)


def _best_split_gain(values: np.ndarray, labels: np.ndarray) -> float:
    """IG of the best binary threshold; 0.0 when no threshold exists."""
    order = np.argsort(values, kind="stable")
    v = values[order]
    pos = (labels[order] == 1).astype(np.int64)
    n = len(v)
    h_total = _entropy(np.array([pos.sum(), n - pos.sum()]))
    # split after position i (1 <= i < n) is allowed only where v[i-1] < v[i]
    cut = np.flatnonzero(v[1:] > v[:-1]) + 1
    if len(cut) == 0:
        return 0.0
    cum_pos = np.cumsum(pos)
    left_n = cut
    left_pos = cum_pos[cut - 1]
    right_n = n - left_n
    right_pos = cum_pos[-1] - left_pos

    def h(p1, tot):
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.stack([p1, tot - p1]) / tot
            t = np.where(q > 0, -q * np.log2(np.where(q > 0, q, 1.0)), 0.0)
        return t.sum(axis=0)

    cond = (left_n * h(left_pos, left_n) + right_n * h(right_pos, right_n)) / n
    gain = h_total - cond.min()
    return float(min(max(gain, 0.0), h_total))


def gene_information_gain(ds: Dataset, g: int) -> float:
    """IG in bits of gene g's best binary split, clamped to [0, H(class)]."""
    return _best_split_gain(ds.values[:, g], ds.labels)


def rank_genes(ds: Dataset) -> GeneRanking:
    """Score every gene and partition into informative / non-informative."""
    ig = np.array([_best_split_gain(ds.values[:, g], ds.labels) for g in range(ds.n_genes)])
    candidates = np.flatnonzero(ig > INFORMATIVE_TOL)
    order = np.lexsort((candidates, -ig[candidates]))
    informative = candidates[order]
    return GeneRanking(ig, informative, float(ig[informative].sum()))


def sample_informative(ranking: GeneRanking, exclude, rng: np.random.Generator) -> int:
    """Draw one informative gene outside `exclude`, with probability proportional to its IG."""
    exclude = set(exclude)
    candidates = [g for g in ranking.informative if g not in exclude]
    if not candidates:
        raise NoInformativeGene("all informative genes are excluded")
    weights = ranking.ig[candidates]
    return int(rng.choice(candidates, p=weights / weights.sum()))
