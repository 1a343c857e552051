"""Batch command line: rank, select, eval, report, and synth subcommands.

Exit codes: 0 success, 2 usage or ingestion error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from bbogenes import bbo, datasets, report as report_mod
from bbogenes.data import DataError, Dataset, load_csv, load_libsvm, save_libsvm
from bbogenes.fitness import FitnessCache, FitnessConfig, evaluate_hsi_detailed, make_folds
from bbogenes.infogain import GeneRanking, INFORMATIVE_TOL, rank_genes

log = logging.getLogger("bbogenes")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3


def _resolve_data_path(path: str) -> str:
    if os.path.exists(path):
        return path
    base = os.environ.get("BBOGENES_DATA_DIR")
    if base:
        alt = os.path.join(base, path)
        if os.path.exists(alt):
            return alt
    return path


def _load_dataset(args) -> Dataset:
    path = _resolve_data_path(args.data)
    fmt = args.format
    if fmt == "auto":
        fmt = "csv" if path.endswith(".csv") else "libsvm"
    if fmt == "csv":
        return load_csv(path, args.label_column)
    width = getattr(args, "width", None)
    if width is None:
        width = getattr(args, "genes", None) if isinstance(getattr(args, "genes", None), int) else None
    return load_libsvm(path, n_genes=width)


def _add_data_flags(p: argparse.ArgumentParser, width_flag: bool = True):
    p.add_argument("--data", required=True, help="dataset file (libsvm or CSV)")
    p.add_argument("--format", choices=["auto", "libsvm", "csv"], default="auto")
    p.add_argument("--label-column", default="label", help="label column name for CSV input")
    if width_flag:
        p.add_argument("--genes", type=int, default=None, metavar="N",
                       help="matrix width when trailing genes are absent from all libsvm rows")
    else:
        p.add_argument("--width", type=int, default=None, metavar="N",
                       help="matrix width when trailing genes are absent from all libsvm rows")


def cmd_rank(args) -> int:
    ds = _load_dataset(args)
    ranking = rank_genes(ds)
    if len(ranking.informative) == 0:
        log.warning("no informative genes: every information gain is zero")
    order = np.lexsort((np.arange(ds.n_genes), -ranking.ig))
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["gene_id", "ig", "rank"])
        for r, g in enumerate(order, start=1):
            w.writerow([ds.gene_ids[g], repr(float(ranking.ig[g])), r])
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def _load_ranking_csv(path: str, ds: Dataset) -> GeneRanking:
    by_id = {gid: i for i, gid in enumerate(ds.gene_ids)}
    ig = np.zeros(ds.n_genes)
    with open(path) as fh:
        for row in csv.DictReader(fh):
            gid = row["gene_id"]
            if gid not in by_id:
                raise DataError(f"{path}: unknown gene_id {gid!r}")
            ig[by_id[gid]] = float(row["ig"])
    candidates = np.flatnonzero(ig > INFORMATIVE_TOL)
    order = np.lexsort((candidates, -ig[candidates]))
    informative = candidates[order]
    return GeneRanking(ig, informative, float(ig[informative].sum()))


def cmd_select(args) -> int:
    ds = _load_dataset(args)
    bbo_cfg = bbo.BboConfig(
        n=args.pop, generations=args.gens, m=args.subset_size,
        mutation_prob=args.mutation, habitat_modification_prob=args.hmp,
        q0=args.q0, elite_count=args.elite,
        use_heuristic=(args.heuristic == "on"), seed=args.seed,
    )
    fit_cfg = FitnessConfig(
        classifier=args.classifier, svm_cost=args.svm_cost, svm_gamma=args.svm_gamma,
        folds=args.folds, rf_trees=args.rf_trees, rf_mtry=args.rf_mtry, seed=args.seed,
    )
    ranking = None
    ranking_source = "none"
    if bbo_cfg.use_heuristic:
        if args.rank_file:
            ranking = _load_ranking_csv(args.rank_file, ds)
            ranking_source = "file"
        else:
            log.info("no rank file given; computing the information-gain ranking internally")
            ranking = rank_genes(ds)
            ranking_source = "internal"
    cache = FitnessCache()
    reports = []
    for r in range(args.repeat):
        run_cfg = bbo.BboConfig(**{**bbo_cfg.to_dict(), "seed": bbo_cfg.seed + r})
        rep = bbo.run(ds, run_cfg, fit_cfg, ranking, n_jobs=args.jobs, cache=cache)
        rep.config["ranking_source"] = ranking_source
        reports.append(rep)
        log.info("run %d/%d: final HSI %.4f, genes %s", r + 1, args.repeat, rep.final_hsi, rep.selected_genes)
    if args.repeat == 1:
        reports[0].save(args.out)
    else:
        stem = args.out[:-5] if args.out.endswith(".json") else args.out
        for r, rep in enumerate(reports):
            rep.save(f"{stem}_run{r}.json")
        agg = report_mod.aggregate(reports)
        agg["runs"] = [f"{stem}_run{r}.json" for r in range(args.repeat)]
        with open(args.out, "w") as fh:
            json.dump(agg, fh, sort_keys=True, indent=2)
            fh.write("\n")
    if args.trace_csv:
        report_mod.write_convergence_csv(reports, args.trace_csv)
    return EXIT_OK


def cmd_eval(args) -> int:
    ds = _load_dataset(args)
    try:
        genes = [int(tok) for tok in args.genes.split(",") if tok.strip() != ""]
    except ValueError:
        raise DataError(f"bad --genes list {args.genes!r}") from None
    if len(set(genes)) != len(genes):
        raise DataError(f"duplicate gene index in --genes {args.genes!r}")
    cfg = FitnessConfig(
        classifier=args.classifier, svm_cost=args.svm_cost, svm_gamma=args.svm_gamma,
        folds=args.folds, rf_trees=args.rf_trees, rf_mtry=args.rf_mtry, seed=args.seed,
    )
    folds = make_folds(ds, cfg)
    hsi, per_fold = evaluate_hsi_detailed(ds, genes, cfg, folds)
    print(f"HSI: {hsi:.6f}")
    for f, acc in enumerate(per_fold):
        print(f"fold {f}: accuracy {acc:.6f}")
    return EXIT_OK


def cmd_report(args) -> int:
    if not args.runs:
        raise DataError("no run report files given")
    reports = [report_mod.RunReport.load(p) for p in args.runs]
    prefix = args.out_prefix
    report_mod.write_convergence_csv(reports, f"{prefix}_convergence.csv")
    summary = {
        "aggregate": report_mod.aggregate(reports),
        "group_mean_curves": report_mod.mean_curves(reports),
    }
    with open(f"{prefix}_summary.json", "w") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
    report_mod.plot_convergence(reports, f"{prefix}_convergence.png")
    log.info("wrote %s_convergence.csv, %s_summary.json, %s_convergence.png", prefix, prefix, prefix)
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.preset == "planted-sum":
        ds, planted = datasets.planted_sum_dataset(seed=args.seed if args.seed is not None else 2024)
        log.info("planted gene indices: %s", planted)
    else:
        ds = datasets.preset(args.preset, seed=args.seed)
    if args.out_format == "csv":
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["label"] + ds.gene_ids)
            for i in range(ds.n_samples):
                w.writerow([("B" if ds.labels[i] > 0 else "A")] + [repr(float(v)) for v in ds.values[i]])
    else:
        save_libsvm(ds, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bbogenes", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("rank", help="write the information-gain ranking CSV")
    _add_data_flags(pr)
    pr.add_argument("--out", default=None, help="output CSV (default: stdout)")
    pr.set_defaults(func=cmd_rank)

    def _classifier_flags(sp):
        sp.add_argument("--classifier", choices=["svm", "rf"], default="svm")
        sp.add_argument("--svm-cost", type=float, default=50.0)
        sp.add_argument("--svm-gamma", type=float, default=0.02)
        sp.add_argument("--folds", type=int, default=10)
        sp.add_argument("--rf-trees", type=int, default=500)
        sp.add_argument("--rf-mtry", type=int, default=None)
        sp.add_argument("--seed", type=int, default=0)

    ps = sub.add_parser("select", help="run the BBO gene subset search")
    _add_data_flags(ps)
    _classifier_flags(ps)
    ps.add_argument("--subset-size", type=int, required=True, metavar="M")
    ps.add_argument("--pop", type=int, default=50)
    ps.add_argument("--gens", type=int, default=25)
    ps.add_argument("--mutation", type=float, default=0.70)
    ps.add_argument("--hmp", type=float, default=1.00)
    ps.add_argument("--q0", type=float, default=0.55)
    ps.add_argument("--heuristic", choices=["on", "off"], default="on")
    ps.add_argument("--elite", type=int, default=2)
    ps.add_argument("--rank-file", default=None, help="precomputed ranking CSV from the rank subcommand")
    ps.add_argument("--repeat", type=int, default=1, metavar="R")
    ps.add_argument("--jobs", type=int, default=1, help="parallel fitness evaluations")
    ps.add_argument("--out", required=True, help="report JSON (aggregate JSON when --repeat > 1)")
    ps.add_argument("--trace-csv", default=None, help="also write the convergence trace CSV")
    ps.set_defaults(func=cmd_select)

    pe = sub.add_parser("eval", help="HSI of one explicit gene subset")
    _add_data_flags(pe, width_flag=False)
    _classifier_flags(pe)
    pe.add_argument("--genes", required=True, help="comma-separated gene indices, e.g. 12,345,26")
    pe.set_defaults(func=cmd_eval)

    pp = sub.add_parser("report", help="merge run JSONs into CSV, summary, and figure")
    pp.add_argument("runs", nargs="*", help="run report JSON files")
    pp.add_argument("--out-prefix", required=True)
    pp.set_defaults(func=cmd_report)

    py = sub.add_parser("synth", help="generate a synthetic benchmark dataset")
    py.add_argument("--preset", choices=["colon", "breast", "leukemia", "planted-sum"], required=True)
    py.add_argument("--out", required=True)
    py.add_argument("--out-format", choices=["libsvm", "csv"], default="libsvm")
    py.add_argument("--seed", type=int, default=None)
    py.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - contract: runtime failures exit 3
        log.exception("runtime failure: %s", exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
