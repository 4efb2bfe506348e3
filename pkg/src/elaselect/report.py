"""Report emitters: summary matrices, scatter/box plot data, confusion tables.

All numbers are written to CSV; SVG rendering is a thin optional layer on top
of the CSV data.
"""

from __future__ import annotations

import csv

import numpy as np

from .performance import PerformanceTable, sbs

# canonical function-group partition of fids 1..24
BBOB_GROUPS = (
    ("F1-F5", range(1, 6)),
    ("F6-F9", range(6, 10)),
    ("F10-F14", range(10, 15)),
    ("F15-F19", range(15, 20)),
    ("F20-F24", range(20, 25)),
)


def bbob_group(fid: int) -> str:
    for label, fids in BBOB_GROUPS:
        if fid in fids:
            return label
    raise ValueError(f"fid {fid} outside the grouped range 1..24")


def _cell_mean(values) -> float:
    return float(np.mean(values)) if len(values) else np.nan


def summary_table(table: PerformanceTable, selector_results: dict,
                  path) -> None:
    """Mean relERT per (dim x function group) cell for every portfolio solver
    and selector; the per-cell best solver is recorded in an `sbs` column.

    selector_results maps a selector label to a CvResult whose cost-inclusive
    fold relERTs supply the selector cells.
    """
    dims = sorted({d for _, d in table.problems})
    groups = [label for label, _ in BBOB_GROUPS] + ["all"]
    selector_labels = sorted(selector_results)

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dim", "group"] + list(table.solvers)
                        + selector_labels + ["sbs"])
        for dim in [*dims, "all"]:
            for group in groups:
                cols = [j for j, (fid, d) in enumerate(table.problems)
                        if (dim == "all" or d == dim)
                        and (group == "all" or bbob_group(fid) == group)]
                if not cols:
                    continue
                solver_means = [_cell_mean(table.relert[i, cols])
                                for i in range(len(table.solvers))]
                row = [dim, group] + [format(v, ".6g") for v in solver_means]
                for label in selector_labels:
                    cv = selector_results[label]
                    vals = [cv.fold_relerts[p]
                            for j, p in enumerate(table.problems)
                            if j in set(cols) and p in cv.fold_relerts]
                    row.append(format(_cell_mean(vals), ".6g")
                               if vals else "")
                row.append(table.solvers[int(np.argmin(solver_means))])
                writer.writerow(row)


def scatter_data(table: PerformanceTable, predictions: dict, path) -> None:
    """Per problem: the best solver's ERT and the predicted solver's ERT."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fid", "dim", "vbs_ert", "selector_ert", "predicted"])
        for j, (fid, dim) in enumerate(table.problems):
            chosen = predictions.get((fid, dim))
            if chosen is None:
                continue
            sel_ert = table.ert[table.solver_index(chosen), j]
            writer.writerow([
                fid, dim,
                format(float(table.best_ert[j]), ".17g"),
                "inf" if np.isinf(sel_ert) else format(float(sel_ert), ".17g"),
                chosen,
            ])


def confusion_table(best_labels: dict, predictions: dict, solvers,
                    path) -> None:
    """Rows: true best solver; columns: predicted solver counts."""
    counts = {s: {t: 0 for t in solvers} for s in solvers}
    for problem, best in best_labels.items():
        pred = predictions.get(problem)
        if pred is not None:
            counts[best][pred] += 1
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["best_solver", "n_best"] + list(solvers))
        for s in solvers:
            writer.writerow([s, sum(counts[s].values())]
                            + [counts[s][t] for t in solvers])


def best_ert_ratios(full_table: PerformanceTable, portfolio_members,
                    path) -> None:
    """Per problem: best portfolio ERT over best overall ERT (boxplot data)."""
    idx = [full_table.solver_index(s) for s in portfolio_members]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fid", "dim", "ratio"])
        for j, (fid, dim) in enumerate(full_table.problems):
            best_all = float(full_table.best_ert[j])
            best_port = float(full_table.ert[idx, j].min())
            ratio = best_port / best_all if np.isfinite(best_port) else np.inf
            writer.writerow([fid, dim,
                             "inf" if np.isinf(ratio)
                             else format(ratio, ".17g")])


def render_scatter_svg(scatter_csv, path) -> None:
    """Log-log scatter of best vs selected ERT; requires matplotlib."""
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    xs, ys = [], []
    with open(scatter_csv, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["selector_ert"] != "inf":
                xs.append(float(row["vbs_ert"]))
                ys.append(float(row["selector_ert"]))
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.loglog(xs, ys, "o", alpha=0.7)
    lims = [min(xs + ys), max(xs + ys)] if xs else [1, 10]
    ax.loglog(lims, lims, "k--", linewidth=0.8)
    ax.set_xlabel("best solver ERT")
    ax.set_ylabel("selected solver ERT")
    fig.savefig(path, format="svg")
    plt.close(fig)


def render_ratio_svg(ratio_csv, path) -> None:
    """Boxplot of best-ERT ratios; requires matplotlib."""
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    ratios = []
    with open(ratio_csv, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["ratio"] != "inf":
                ratios.append(float(row["ratio"]))
    fig, ax = plt.subplots(figsize=(3, 5))
    ax.boxplot(ratios)
    ax.set_yscale("log")
    ax.set_ylabel("portfolio best ERT / overall best ERT")
    fig.savefig(path, format="svg")
    plt.close(fig)


def sbs_label(table: PerformanceTable) -> str:
    solver, _ = sbs(table)
    return solver
