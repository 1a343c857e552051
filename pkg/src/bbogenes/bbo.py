"""The BBO search loop over fixed-size gene subsets.

A habitat is a duplicate-free set of gene indices; its suitability (HSI) is
the cross-validation accuracy of a classifier trained on those genes.
Migration shares genes from high-HSI habitats into low-HSI ones; mutation
replaces genes either by IG-weighted draws from the informative set
(exploitation) or uniformly at random (exploration); elitism shields the
best subsets found so far.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from bbogenes.data import Dataset
from bbogenes.fitness import FitnessCache, FitnessConfig, evaluate_population, make_folds
from bbogenes.infogain import GeneRanking, NoInformativeGene, sample_informative
from bbogenes.report import RunReport


@dataclass
class Habitat:
    sivs: list[int]              # m distinct gene indices
    hsi: float | None = None
    stale: bool = True

    def as_set(self) -> frozenset[int]:
        return frozenset(self.sivs)


@dataclass
class Ecosystem:
    habitats: list[Habitat]
    generation: int = 0
    elites: list[tuple[float, list[int]]] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.habitats)


@dataclass
class BboConfig:
    n: int = 50                          # population size
    generations: int = 25
    m: int = 5                           # subset size, set per run
    mutation_prob: float = 0.70
    habitat_modification_prob: float = 1.00
    q0: float = 0.55                     # exploitation probability
    emigration_max: float = 1.0
    immigration_max: float = 1.0
    elite_count: int = 2
    use_heuristic: bool = True
    seed: int = 0

    def __post_init__(self):
        for name in ("mutation_prob", "habitat_modification_prob", "q0"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        if self.n < 1 or self.generations < 0 or self.m < 1 or self.elite_count < 1:
            raise ValueError("n, m, elite_count must be >= 1 and generations >= 0")
        if self.elite_count >= self.n:
            raise ValueError("elite_count must be smaller than the population size")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "generations": self.generations,
            "m": self.m,
            "mutation_prob": self.mutation_prob,
            "habitat_modification_prob": self.habitat_modification_prob,
            "q0": self.q0,
            "emigration_max": self.emigration_max,
            "immigration_max": self.immigration_max,
            "elite_count": self.elite_count,
            "use_heuristic": self.use_heuristic,
            "seed": self.seed,
        }


def rates(k: float, n: int, E: float = 1.0, I: float = 1.0) -> tuple[float, float]:
    """Linear migration model: immigration I(1 - k/n), emigration E k/n.

    k is the habitat's fitness position: 0 for the worst (immigrates
    maximally), n for the best (emigrates maximally).
    """
    if n < 1 or not 0 <= k <= n:
        raise ValueError("need n >= 1 and 0 <= k <= n")
    return I * (1 - k / n), E * k / n


def fitness_ranks(eco: Ecosystem) -> list[int]:
    """Rank per habitat, 0 = worst HSI, n-1 = best; HSI ties break by index."""
    order = sorted(range(eco.size), key=lambda i: (eco.habitats[i].hsi, i))
    ranks = [0] * eco.size
    for pos, i in enumerate(order):
        ranks[i] = pos
    return ranks


def _rank_rates(ranks: list[int], cfg: BboConfig) -> list[tuple[float, float]]:
    # rank scaled onto [0, n] so the worst habitat gets lambda = I and the
    # best gets lambda = 0, matching the linear model's endpoints
    n = len(ranks)
    return [rates(r * n / (n - 1) if n > 1 else 0, n, cfg.emigration_max, cfg.immigration_max)
            for r in ranks]


def init_ecosystem(cfg: BboConfig, n_genes: int, rng: np.random.Generator) -> Ecosystem:
    """n habitats, each a uniform random m-subset of the genes."""
    if cfg.m > n_genes:
        raise ValueError(f"subset size {cfg.m} exceeds gene count {n_genes}")
    habitats = [Habitat(sorted(rng.choice(n_genes, size=cfg.m, replace=False).tolist()))
                for _ in range(cfg.n)]
    return Ecosystem(habitats)


def migrate(eco: Ecosystem, cfg: BboConfig, rng: np.random.Generator,
            ranks: list[int] | None = None) -> Ecosystem:
    """Share SIVs from high-emigration habitats into high-immigration ones.

    Modifies the ecosystem in place. A donated gene already present in the
    receiver triggers a rescan of the donor's genes in random order; the
    donor is skipped when it has nothing new to offer.
    """
    if ranks is None:
        ranks = fitness_ranks(eco)
    rate = _rank_rates(ranks, cfg)
    for i, receiver in enumerate(eco.habitats):
        if rng.random() >= cfg.habitat_modification_prob:
            continue
        if rng.random() >= rate[i][0]:          # lambda_i
            continue
        for j, donor in enumerate(eco.habitats):
            if j == i:
                continue
            if rng.random() >= rate[j][1]:      # mu_j
                continue
            sigma = donor.sivs[rng.integers(len(donor.sivs))]
            pos = int(rng.integers(len(receiver.sivs)))
            members = set(receiver.sivs)
            if sigma in members:
                sigma = None
                for candidate in rng.permutation(donor.sivs):
                    if candidate not in members:
                        sigma = int(candidate)
                        break
                if sigma is None:
                    continue
            receiver.sivs[pos] = int(sigma)
            receiver.stale = True
    return eco


def mutate(eco: Ecosystem, cfg: BboConfig, ranking: GeneRanking | None,
           rng: np.random.Generator, ranks: list[int] | None = None,
           n_genes: int | None = None) -> Ecosystem:
    """Replace genes position-wise, exploiting the IG ranking or exploring.

    A position mutates with probability mutation_prob * (1 - rank/(n-1)),
    so the worst habitat mutates most and the best not at all. The
    exploitation branch falls back to uniform exploration when every
    informative gene is already in the habitat.
    """
    if ranks is None:
        ranks = fitness_ranks(eco)
    if n_genes is None:
        n_genes = ranking.n_genes if ranking is not None else None
    if n_genes is None:
        raise ValueError("n_genes required when no ranking is given")
    n = eco.size
    for i, habitat in enumerate(eco.habitats):
        frac = ranks[i] / (n - 1) if n > 1 else 0.0
        p_mut = cfg.mutation_prob * (1.0 - frac)
        for pos in range(len(habitat.sivs)):
            if rng.random() >= p_mut:
                continue
            members = set(habitat.sivs)
            if len(members) >= n_genes:
                continue                        # nothing outside the habitat
            replacement = None
            if cfg.use_heuristic and ranking is not None and rng.random() < cfg.q0:
                try:
                    replacement = sample_informative(ranking, members, rng)
                except NoInformativeGene:
                    replacement = None
            if replacement is None:
                while True:
                    g = int(rng.integers(n_genes))
                    if g not in members:
                        replacement = g
                        break
            habitat.sivs[pos] = replacement
            habitat.stale = True
    return eco


def elitism(eco: Ecosystem, cfg: BboConfig) -> Ecosystem:
    """Fold the population into the elite archive, then re-seed the z worst.

    The archive keeps the best elite_count distinct subsets seen so far;
    elites missing from the population overwrite its current worst habitats.
    """
    merged: dict[frozenset[int], tuple[float, list[int]]] = {}
    for hsi, sivs in eco.elites:
        merged[frozenset(sivs)] = (hsi, sivs)
    for h in eco.habitats:
        key = h.as_set()
        if h.hsi is not None and (key not in merged or h.hsi > merged[key][0]):
            merged[key] = (h.hsi, list(h.sivs))
    ranked = sorted(merged.values(), key=lambda e: -e[0])
    eco.elites = [(hsi, list(sivs)) for hsi, sivs in ranked[:cfg.elite_count]]

    elite_sets = {frozenset(s) for _, s in eco.elites}
    present = {h.as_set() for h in eco.habitats}
    for hsi, sivs in eco.elites:
        if frozenset(sivs) in present:
            continue
        candidates = [i for i, h in enumerate(eco.habitats) if h.as_set() not in elite_sets]
        if not candidates:
            break
        worst = min(candidates,
                    key=lambda i: (eco.habitats[i].hsi if eco.habitats[i].hsi is not None else -1.0, -i))
        eco.habitats[worst] = Habitat(list(sivs), hsi=hsi, stale=False)
        present.add(frozenset(sivs))
    return eco


def _reevaluate(eco, ds, fit_cfg, folds, cache, n_jobs):
    stale = [h for h in eco.habitats if h.stale or h.hsi is None]
    hsis = evaluate_population(ds, [h.sivs for h in stale], fit_cfg, folds, cache, n_jobs)
    for h, hsi in zip(stale, hsis):
        h.hsi = hsi
        h.stale = False


def run(ds: Dataset, bbo_cfg: BboConfig, fit_cfg: FitnessConfig,
        ranking: GeneRanking | None = None, n_jobs: int = 1,
        cache: FitnessCache | None = None) -> RunReport:
    """Full search: evaluate, then per generation migrate, mutate,
    re-evaluate, apply elitism. Deterministic for a fixed seed."""
    if bbo_cfg.use_heuristic and ranking is None:
        raise ValueError("use_heuristic requires a gene ranking")
    t0 = time.perf_counter()
    rng = np.random.default_rng(bbo_cfg.seed)
    folds = make_folds(ds, fit_cfg)
    if cache is None:
        cache = FitnessCache()
    eco = init_ecosystem(bbo_cfg, ds.n_genes, rng)
    _reevaluate(eco, ds, fit_cfg, folds, cache, n_jobs)
    elitism(eco, bbo_cfg)
    trace = [_trace_point(eco)]
    for _ in range(bbo_cfg.generations):
        eco.generation += 1
        ranks = fitness_ranks(eco)
        migrate(eco, bbo_cfg, rng, ranks)
        mutate(eco, bbo_cfg, ranking, rng, ranks, n_genes=ds.n_genes)
        _reevaluate(eco, ds, fit_cfg, folds, cache, n_jobs)
        elitism(eco, bbo_cfg)
        trace.append(_trace_point(eco))
    best_hsi, best_sivs = eco.elites[0]
    return RunReport(
        config={"bbo": bbo_cfg.to_dict(), "fitness": fit_cfg.to_dict()},
        trace=trace,
        selected_genes=[ds.gene_ids[g] for g in best_sivs],
        selected_indices=list(best_sivs),
        final_hsi=best_hsi,
        classifier=fit_cfg.classifier,
        seed=bbo_cfg.seed,
        cache_hits=cache.hits,
        wall_time=time.perf_counter() - t0,
    )


def _trace_point(eco: Ecosystem) -> dict:
    hsis = [h.hsi for h in eco.habitats]
    return {"best_hsi": max(hsis), "avg_hsi": sum(hsis) / len(hsis)}
