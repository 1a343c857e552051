"""Run reports: JSON serialization, convergence CSVs, summaries, and figures.

The JSON payload under "report" is byte-stable for a fixed seed; wall time
lives in a separate "metadata" object so reruns diff clean.
"""

from __future__ import annotations

import csv
import json
import statistics
from collections import Counter
from dataclasses import dataclass


@dataclass
class RunReport:
    config: dict
    trace: list[dict]               # per generation: {"best_hsi", "avg_hsi"}
    selected_genes: list[str]       # gene ids of the best habitat
    selected_indices: list[int]
    final_hsi: float
    classifier: str
    seed: int
    cache_hits: int = 0
    wall_time: float = 0.0

    def payload(self) -> dict:
        return {
            "config": self.config,
            "trace": self.trace,
            "selected_genes": self.selected_genes,
            "selected_indices": self.selected_indices,
            "final_hsi": self.final_hsi,
            "classifier": self.classifier,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        # cache hits and wall time depend on execution (thread scheduling,
        # machine speed), so they live outside the seed-stable payload
        doc = {"report": self.payload(),
               "metadata": {"wall_time": self.wall_time, "cache_hits": self.cache_hits}}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        doc = json.loads(text)
        meta = doc.get("metadata", {})
        return cls(wall_time=meta.get("wall_time", 0.0),
                   cache_hits=meta.get("cache_hits", 0), **doc["report"])

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "RunReport":
        with open(path) as fh:
            return cls.from_json(fh.read())


def write_convergence_csv(reports: list[RunReport], path) -> None:
    """One row per generation, a (best, avg) column pair per run."""
    n_gen = max(len(r.trace) for r in reports)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = ["generation"]
        for i in range(len(reports)):
            header += [f"run{i}_best_hsi", f"run{i}_avg_hsi"]
        w.writerow(header)
        for g in range(n_gen):
            row = [g]
            for r in reports:
                if g < len(r.trace):
                    row += [repr(r.trace[g]["best_hsi"]), repr(r.trace[g]["avg_hsi"])]
                else:
                    row += ["", ""]
            w.writerow(row)


def aggregate(reports: list[RunReport]) -> dict:
    """Mean/median/max final HSI plus gene selection frequencies over runs."""
    finals = [r.final_hsi for r in reports]
    freq = Counter(g for r in reports for g in r.selected_genes)
    return {
        "n_runs": len(reports),
        "mean_final_hsi": statistics.fmean(finals),
        "median_final_hsi": statistics.median(finals),
        "max_final_hsi": max(finals),
        "min_final_hsi": min(finals),
        "subset_size": len(reports[0].selected_indices),
        "gene_frequency": dict(freq.most_common()),
    }


def _group_key(report: RunReport) -> str:
    return "heuristic" if report.config.get("bbo", {}).get("use_heuristic") else "simple"


def mean_curves(reports: list[RunReport]) -> dict[str, dict[str, list[float]]]:
    """Per-group (heuristic vs simple) generation-wise mean best/avg HSI."""
    groups: dict[str, list[RunReport]] = {}
    for r in reports:
        groups.setdefault(_group_key(r), []).append(r)
    out = {}
    for name, runs in groups.items():
        n_gen = min(len(r.trace) for r in runs)
        out[name] = {
            "best_hsi": [statistics.fmean(r.trace[g]["best_hsi"] for r in runs) for g in range(n_gen)],
            "avg_hsi": [statistics.fmean(r.trace[g]["avg_hsi"] for r in runs) for g in range(n_gen)],
        }
    return out


def plot_convergence(reports: list[RunReport], path) -> None:
    """Render the population-average convergence curves to an image file."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    curves = mean_curves(reports)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    styles = {"heuristic": ("tab:blue", "-"), "simple": ("tab:orange", "--")}
    for name, data in sorted(curves.items()):
        color, ls = styles.get(name, ("tab:gray", ":"))
        gens = range(len(data["avg_hsi"]))
        ax.plot(gens, data["avg_hsi"], ls, color=color, label=f"{name} (population avg)")
        ax.plot(gens, data["best_hsi"], "-", color=color, alpha=0.4, label=f"{name} (best)")
    ax.set_xlabel("generation")
    ax.set_ylabel("HSI (CV accuracy)")
    ax.legend(loc="lower right", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
