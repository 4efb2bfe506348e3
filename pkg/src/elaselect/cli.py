"""Command-line front-end: features, performance, train, report, run-all.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
All output files are written atomically (temp file + rename); worker count
for feature computation comes from the ELASELECT_WORKERS environment
variable.
"""

from __future__ import annotations

import csv
import os
import sys
from contextlib import contextmanager
from pathlib import Path

import click
import numpy as np
from joblib import Parallel, delayed

from . import features as feat
from . import ingest, performance, problems, report
from .config import PipelineConfig
from .errors import DataError, ElaSelectError, EvaluationError
from .sampling import evaluate_design, improved_lhd
from .selection import (CvResult, cost_inclusive_relert, grid_search,
                        label_best, save_model, write_leaderboard)

WORKERS_ENV = "ELASELECT_WORKERS"


@contextmanager
def atomic_output(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp")
    try:
        yield tmp
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def _n_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


def _load_config(config_path, **overrides) -> PipelineConfig:
    cfg = (PipelineConfig.from_yaml(config_path) if config_path
           else PipelineConfig())
    return cfg.override(**overrides)


def _instance_features(instance, seed, design_mult):
    pid = instance.id
    design = improved_lhd(design_mult * pid.dim, instance.domain,
                         [seed, 1, pid.fid, pid.dim, pid.iid])
    try:
        evaluated = evaluate_design(design, instance.objective)
    except EvaluationError as exc:
        raise DataError(f"non-finite objective on instance "
                        f"fid={pid.fid} dim={pid.dim} iid={pid.iid}: {exc}")
    fv = feat.compute_all(evaluated)
    return (pid.fid, pid.dim, pid.iid), fv


def run_features(cfg: PipelineConfig, out_dir) -> feat.FeatureMatrix:
    """Evaluate designs on the synthetic suite and write feature tables."""
    out = Path(out_dir)
    instances = problems.suite(cfg.dims, cfg.fids, cfg.iids,
                               seed_scheme=cfg.seed)
    results = Parallel(n_jobs=_n_workers())(
        delayed(_instance_features)(inst, cfg.seed, cfg.design_mult)
        for inst in instances)
    rows = dict(results)
    matrix = feat.FeatureMatrix.from_rows(("fid", "dim", "iid"), rows)
    aggregated = feat.aggregate_median(matrix)

    with atomic_output(out / "features_instances.csv") as tmp:
        matrix.to_csv(tmp)
    with atomic_output(out / "features_median.csv") as tmp:
        aggregated.to_csv(tmp)
    with atomic_output(out / "suite_manifest.csv") as tmp:
        problems.write_manifest(instances, tmp)
    with atomic_output(out / "features_meta.json") as tmp:
        import json

        with open(tmp, "w") as fh:
            json.dump({"design_mult": cfg.design_mult,
                       "evals_per_instance": {
                           f"{i.id.fid}:{i.id.dim}:{i.id.iid}":
                               cfg.design_mult * i.id.dim
                           for i in instances},
                       "schema_version": feat.SCHEMA_VERSION,
                       "seed": cfg.seed}, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return aggregated


def run_performance(cfg: PipelineConfig, runs_csv, out_dir):
    """Ingest run logs, build ERT/relERT tables and the Top-k portfolio."""
    out = Path(out_dir)
    records = ingest.parse_runs_csv(runs_csv)
    sanity = ingest.sanity_check(records)
    with atomic_output(out / "sanity_report.txt") as tmp:
        tmp.write_text(sanity.to_text() + "\n")
    with atomic_output(out / "sanity_report.jsonl") as tmp:
        sanity.to_jsonl(tmp)

    records = ingest.first_run_only(records)
    full = performance.relert_table(records, epsilon=cfg.epsilon)
    portfolio = performance.build_portfolio(full, top_k=cfg.top_k)
    table = full.restrict_solvers(portfolio.members)

    with atomic_output(out / "ert_all.csv") as e, \
            atomic_output(out / "relert_all.csv") as r, \
            atomic_output(out / "perf_meta_all.json") as m:
        full.to_csv(e, r, m)
    with atomic_output(out / "ert.csv") as e, \
            atomic_output(out / "relert.csv") as r, \
            atomic_output(out / "perf_meta.json") as m:
        table.to_csv(e, r, m)
    with atomic_output(out / "portfolio.json") as tmp:
        portfolio.to_json(tmp)
    return table, portfolio


def _oracle_rows(table, design_mult):
    """Diagnostic baseline: the perfect selector with and without costs."""
    _, vbs_mean = performance.vbs(table)
    best_map, _ = performance.vbs(table)
    cost_mean = float(np.mean([
        cost_inclusive_relert(table, p, best_map[p], design_mult)
        for p in table.problems]))
    return cost_mean, vbs_mean


def run_train(cfg: PipelineConfig, features_path, perf_dir, out_dir):
    """Grid-search selectors under LOFO-CV and persist the leaderboard."""
    out = Path(out_dir)
    perf = Path(perf_dir)
    for required in ("ert.csv", "relert.csv", "perf_meta.json"):
        if not (perf / required).exists():
            raise DataError(f"missing {perf / required}; run the performance "
                            f"step first")
    matrix = feat.FeatureMatrix.from_csv(features_path)
    table = performance.PerformanceTable.from_csv(
        perf / "ert.csv", perf / "relert.csv", perf / "perf_meta.json")

    keep = [k in {tuple(p) for p in table.problems} for k in matrix.keys]
    if not all(keep):
        # features may cover more problems than the run archive; train on the
        # intersection but fail loudly when the table has orphans
        matrix = feat.FeatureMatrix(
            matrix.key_fields,
            [k for k, m in zip(matrix.keys, keep) if m],
            matrix.names, matrix.values[np.array(keep)])

    entries = grid_search(matrix, table, cfg.learners, cfg.paradigms,
                          cfg.fs_strategies, seed=cfg.seed,
                          design_mult=cfg.design_mult,
                          ga_generations=cfg.ga_generations)
    with atomic_output(out / "leaderboard.csv") as tmp:
        write_leaderboard(entries, tmp)
    oracle_cost, oracle_free = _oracle_rows(table, cfg.design_mult)
    with atomic_output(out / "baselines.csv") as tmp:
        with open(tmp, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["label", "mean_relert_cost",
                            "mean_relert_nocost"])
            writer.writerow(["oracle", format(oracle_cost, ".17g"),
                             format(oracle_free, ".17g")])
            solver, mean = performance.sbs(table)
            writer.writerow([f"sbs:{solver}", format(mean, ".17g"),
                             format(mean, ".17g")])

    best = next((e for e in entries if e.cv is not None), None)
    if best is None:
        raise DataError("every grid configuration failed; see leaderboard")
    with atomic_output(out / "best_model.bin") as tmp:
        save_model(best.model, tmp)
    with atomic_output(out / "predictions.csv") as tmp:
        best.cv.to_csv(tmp)
    return entries


def _read_predictions(path):
    predictions, relerts, nocost = {}, {}, {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (int(row["fid"]), int(row["dim"]))
            predictions[key] = row["predicted"]
            relerts[key] = float(row["relert_cost"])
            nocost[key] = float(row["relert_nocost"])
    return CvResult(predictions, relerts, nocost,
                    float(np.mean(list(relerts.values()))),
                    float(np.mean(list(nocost.values()))))


def run_report(cfg: PipelineConfig, artifacts_dir, svg: bool = False):
    """Emit summary matrix, scatter/ratio plot data and the confusion table."""
    art = Path(artifacts_dir)
    needed = ["ert.csv", "relert.csv", "perf_meta.json", "portfolio.json",
              "predictions.csv", "ert_all.csv", "relert_all.csv",
              "perf_meta_all.json"]
    for name in needed:
        if not (art / name).exists():
            raise DataError(
                f"missing artifact {art / name}; run the performance and "
                f"train steps into this directory first")
    table = performance.PerformanceTable.from_csv(
        art / "ert.csv", art / "relert.csv", art / "perf_meta.json")
    full = performance.PerformanceTable.from_csv(
        art / "ert_all.csv", art / "relert_all.csv",
        art / "perf_meta_all.json")
    portfolio = performance.Portfolio.from_json(art / "portfolio.json")
    cv = _read_predictions(art / "predictions.csv")

    with atomic_output(art / "summary_table.csv") as tmp:
        report.summary_table(table, {"selector": cv}, tmp)
    with atomic_output(art / "confusion.csv") as tmp:
        report.confusion_table(label_best(table, cfg.seed),
                               cv.fold_predictions, table.solvers, tmp)
    with atomic_output(art / "best_ert_ratios.csv") as tmp:
        report.best_ert_ratios(full, portfolio.members, tmp)
    for dim in sorted({d for _, d in table.problems}):
        sub_problems = [p for p in table.problems if p[1] == dim]
        sub = performance.PerformanceTable(
            table.solvers, sub_problems,
            table.ert[:, [table.problem_index(p) for p in sub_problems]],
            table.relert[:, [table.problem_index(p) for p in sub_problems]],
            table.epsilon, table.penalty)
        with atomic_output(art / f"scatter_dim{dim}.csv") as tmp:
            report.scatter_data(sub, cv.fold_predictions, tmp)
        if svg:
            with atomic_output(art / f"scatter_dim{dim}.svg") as tmp:
                report.render_scatter_svg(art / f"scatter_dim{dim}.csv", tmp)
    if svg:
        with atomic_output(art / "best_ert_ratios.svg") as tmp:
            report.render_ratio_svg(art / "best_ert_ratios.csv", tmp)


def _common_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(exists=True),
                      default=None, help="YAML pipeline config")(fn)
    fn = click.option("--seed", type=int, default=None)(fn)
    fn = click.option("--epsilon", type=float, default=None)(fn)
    fn = click.option("--design-mult", type=int, default=None)(fn)
    fn = click.option("--out", "out_dir", type=click.Path(), default=None)(fn)
    return fn


@click.group()
def cli():
    """Landscape-feature based algorithm selection pipeline."""


@cli.command("features")
@_common_options
def cmd_features(config_path, seed, epsilon, design_mult, out_dir):
    """Compute per-instance and median-aggregated landscape features."""
    cfg = _load_config(config_path, seed=seed, epsilon=epsilon,
                       design_mult=design_mult, out_dir=out_dir)
    run_features(cfg, cfg.out_dir)
    click.echo(f"features written to {cfg.out_dir}")


@cli.command("performance")
@click.argument("runs_csv", type=click.Path(exists=True))
@_common_options
def cmd_performance(runs_csv, config_path, seed, epsilon, design_mult,
                    out_dir):
    """Build ERT/relERT tables and the solver portfolio from run logs."""
    cfg = _load_config(config_path, seed=seed, epsilon=epsilon,
                       design_mult=design_mult, out_dir=out_dir)
    table, portfolio = run_performance(cfg, runs_csv, cfg.out_dir)
    click.echo(f"portfolio: {portfolio.members}")
    click.echo(f"performance tables written to {cfg.out_dir}")


@cli.command("train")
@click.option("--features", "features_path", type=click.Path(exists=True),
              required=True, help="median-aggregated feature CSV")
@click.option("--perf", "perf_dir", type=click.Path(exists=True),
              required=True, help="directory with ert/relert/meta files")
@_common_options
def cmd_train(features_path, perf_dir, config_path, seed, epsilon,
              design_mult, out_dir):
    """Grid-search algorithm selectors under LOFO cross-validation."""
    cfg = _load_config(config_path, seed=seed, epsilon=epsilon,
                       design_mult=design_mult, out_dir=out_dir)
    entries = run_train(cfg, features_path, perf_dir, cfg.out_dir)
    best = next(e for e in entries if e.cv is not None)
    click.echo(f"best: {best.learner}/{best.paradigm}/{best.fs_strategy} "
               f"mean relERT {best.cv.mean_relert:.4g}")


@cli.command("report")
@click.argument("artifacts_dir", type=click.Path(exists=True))
@click.option("--svg", is_flag=True, default=False)
@_common_options
def cmd_report(artifacts_dir, svg, config_path, seed, epsilon, design_mult,
               out_dir):
    """Emit summary tables and plot data from pipeline artifacts."""
    cfg = _load_config(config_path, seed=seed, epsilon=epsilon,
                       design_mult=design_mult, out_dir=out_dir)
    run_report(cfg, artifacts_dir, svg=svg)
    click.echo(f"reports written to {artifacts_dir}")


@cli.command("run-all")
@click.option("--runs", "runs_csv", type=click.Path(exists=True),
              default=None, help="run-log CSV (overrides config runs_csv)")
@click.option("--svg", is_flag=True, default=False)
@_common_options
def cmd_run_all(runs_csv, svg, config_path, seed, epsilon, design_mult,
                out_dir):
    """Full pipeline: features, performance, train, report."""
    cfg = _load_config(config_path, seed=seed, epsilon=epsilon,
                       design_mult=design_mult, out_dir=out_dir,
                       runs_csv=runs_csv)
    if cfg.runs_csv is None:
        raise click.UsageError("run-all needs a runs CSV (--runs or the "
                               "runs_csv config key)")
    out = Path(cfg.out_dir)
    aggregated = run_features(cfg, out)
    run_performance(cfg, cfg.runs_csv, out)
    run_train(cfg, out / "features_median.csv", out, out)
    run_report(cfg, out, svg=svg)
    click.echo(f"pipeline complete; artifacts in {out}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.Abort:
        return 1
    except (ElaSelectError, FileNotFoundError, OSError) as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    except Exception as exc:  # internal failure
        click.echo(f"internal error: {exc!r}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
