"""Leave-one-function-out cross-validation with feature-cost accounting."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ..features import FeatureMatrix
from ..performance import PerformanceTable
from .models import align_problems, predict, train

DESIGN_MULTIPLIER = 50  # initial-design size per dimension


@dataclass
class CvResult:
    fold_predictions: dict  # (fid, dim) -> solver id
    fold_relerts: dict  # (fid, dim) -> cost-inclusive relERT
    fold_relerts_no_cost: dict
    mean_relert: float
    mean_relert_no_cost: float

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["fid", "dim", "predicted", "relert_cost",
                             "relert_nocost"])
            for key in sorted(self.fold_predictions):
                writer.writerow([key[0], key[1], self.fold_predictions[key],
                                 format(self.fold_relerts[key], ".17g"),
                                 format(self.fold_relerts_no_cost[key], ".17g")])


def cost_inclusive_relert(table: PerformanceTable, problem, solver,
                          design_mult: int = DESIGN_MULTIPLIER) -> float:
    """relERT of the chosen solver with the initial-design cost added.

    Finite entries become (ERT + design_mult * d) / best ERT; imputed
    (penalty) entries keep the penalty unchanged, since the penalty is
    already a cap.
    """
    j = table.problem_index(problem)
    i = table.solver_index(solver)
    raw = table.ert[i, j]
    if not np.isfinite(raw):
        return table.penalty
    dim = problem[1]
    return (raw + design_mult * dim) / float(table.best_ert[j])


def lofo_cv(features: FeatureMatrix, table: PerformanceTable, paradigm: str,
            learner: str, mask=None, seed: int = 0,
            design_mult: int = DESIGN_MULTIPLIER) -> CvResult:
    """One fold per (fid, dim) problem: train on the rest, predict the
    held-out problem, score its relERT with and without feature costs."""
    problems = align_problems(features, table)
    if len(problems) < 2:
        raise ValueError("need at least 2 problems for cross-validation")

    fold_predictions = {}
    fold_relerts = {}
    fold_nocost = {}
    for held_out in problems:
        rest = [p for p in problems if p != held_out]
        sub_features = _subset_rows(features, rest)
        sub_table = _subset_problems(table, rest)
        model = train(sub_features, sub_table, paradigm, learner,
                      mask=mask, seed=seed)
        chosen = predict(model, features.row(held_out))
        fold_predictions[held_out] = chosen
        fold_relerts[held_out] = cost_inclusive_relert(
            table, held_out, chosen, design_mult)
        j = table.problem_index(held_out)
        fold_nocost[held_out] = float(
            table.relert[table.solver_index(chosen), j])

    return CvResult(
        fold_predictions=fold_predictions,
        fold_relerts=fold_relerts,
        fold_relerts_no_cost=fold_nocost,
        mean_relert=float(np.mean(list(fold_relerts.values()))),
        mean_relert_no_cost=float(np.mean(list(fold_nocost.values()))),
    )


def _subset_rows(features: FeatureMatrix, problems) -> FeatureMatrix:
    keys = [tuple(p) for p in problems]
    rows = np.array([features.row(p) for p in keys])
    return FeatureMatrix(features.key_fields, keys, features.names, rows)


def _subset_problems(table: PerformanceTable, problems) -> PerformanceTable:
    """Column subset for training folds.

    relERT normalizers and the penalty are kept from the full table so fold
    targets stay on the scale the selector is evaluated on; the held-out
    problem's column is simply absent from training.
    """
    cols = [table.problem_index(p) for p in problems]
    return PerformanceTable(
        solvers=list(table.solvers),
        problems=[tuple(p) for p in problems],
        ert=table.ert[:, cols],
        relert=table.relert[:, cols],
        epsilon=table.epsilon,
        penalty=table.penalty,
    )
