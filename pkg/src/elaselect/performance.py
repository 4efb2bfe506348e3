"""Expected-runtime metrics, PAR10-imputed relative tables and the Top-k
intersection portfolio."""

from __future__ import annotations

import csv
import json
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyPortfolioError
from .ingest import RunRecord

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-2


def success(record: RunRecord, epsilon: float) -> bool:
    """A run succeeds iff its best gap to the optimum is at most epsilon."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return record.best_gap <= epsilon


def ert(records, epsilon: float = DEFAULT_EPSILON) -> float:
    """Sum of evaluations over all runs divided by the number of successes.

    Returns inf when no run succeeds (the value is undefined, not an error).
    """
    records = list(records)
    if not records:
        raise ValueError("need at least one record")
    successes = sum(success(r, epsilon) for r in records)
    if successes == 0:
        return float("inf")
    return sum(r.fe_count for r in records) / successes


@dataclass
class PerformanceTable:
    """ERT and PAR10-imputed relative ERT per solver (rows) and problem (cols)."""

    solvers: list
    problems: list  # (fid, dim) keys
    ert: np.ndarray  # inf marks undefined entries
    relert: np.ndarray  # finite everywhere after imputation
    epsilon: float
    penalty: float
    dropped_problems: list = field(default_factory=list)

    @property
    def best_ert(self) -> np.ndarray:
        return self.ert.min(axis=0)

    def solver_index(self, solver: str) -> int:
        return self.solvers.index(solver)

    def problem_index(self, problem) -> int:
        return self.problems.index(tuple(problem))

    def restrict_solvers(self, solvers) -> "PerformanceTable":
        """Sub-table over the given solvers, re-normalized and re-imputed."""
        idx = [self.solvers.index(s) for s in solvers]
        return _table_from_ert(list(solvers), list(self.problems),
                               self.ert[idx, :], self.epsilon)

    def to_csv(self, ert_path, relert_path, meta_path=None) -> None:
        for path, matrix in ((ert_path, self.ert), (relert_path, self.relert)):
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["solver"] + [f"{f}:{d}" for f, d in self.problems])
                for solver, row in zip(self.solvers, matrix):
                    writer.writerow([solver] + [
                        "inf" if np.isinf(v) else format(v, ".17g") for v in row])
        if meta_path is not None:
            with open(meta_path, "w") as fh:
                json.dump({"epsilon": self.epsilon, "penalty": self.penalty,
                           "dropped_problems": [list(p) for p in
                                                self.dropped_problems]},
                          fh, indent=2, sort_keys=True)
                fh.write("\n")

    @classmethod
    def from_csv(cls, ert_path, relert_path, meta_path) -> "PerformanceTable":
        def read(path):
            with open(path, newline="") as fh:
                reader = csv.reader(fh)
                header = next(reader)
                problems = [tuple(int(v) for v in col.split(":"))
                            for col in header[1:]]
                solvers, rows = [], []
                for row in reader:
                    if not row:
                        continue
                    solvers.append(row[0])
                    rows.append([float(v) for v in row[1:]])
            return solvers, problems, np.array(rows)

        solvers, problems, ert_m = read(ert_path)
        _, _, rel_m = read(relert_path)
        with open(meta_path) as fh:
            meta = json.load(fh)
        return cls(solvers, problems, ert_m, rel_m, meta["epsilon"],
                   meta["penalty"],
                   [tuple(p) for p in meta.get("dropped_problems", [])])


def _table_from_ert(solvers, problems, ert_matrix, epsilon) -> PerformanceTable:
    best = ert_matrix.min(axis=0)
    solvable = np.isfinite(best)
    dropped = [p for p, ok in zip(problems, solvable) if not ok]
    if dropped:
        warnings.warn(f"dropping {len(dropped)} problem(s) unsolved by every "
                      f"solver: {dropped}")
        logger.warning("dropped problems without any successful solver: %s",
                       dropped)
    problems = [p for p, ok in zip(problems, solvable) if ok]
    ert_matrix = ert_matrix[:, solvable]
    relert = ert_matrix / ert_matrix.min(axis=0)

    finite = relert[np.isfinite(relert)]
    penalty = 10.0 * float(finite.max()) if len(finite) else np.nan
    relert = np.where(np.isfinite(relert), relert, penalty)
    return PerformanceTable(list(solvers), list(problems), ert_matrix, relert,
                            epsilon, penalty, dropped)


def relert_table(records, solvers=None,
                 epsilon: float = DEFAULT_EPSILON) -> PerformanceTable:
    """Build the (solver x problem) ERT/relERT matrix from run records.

    relERT normalizes by the best solver per problem; entries without a single
    success are imputed with ten times the largest finite relERT (PAR10).
    Problems unsolved by every solver are dropped with a warning since no
    normalizer exists for them.
    """
    grouped: dict = {}
    problems = set()
    for rec in records:
        grouped.setdefault((rec.solver, rec.fid, rec.dim), []).append(rec)
        problems.add((rec.fid, rec.dim))
    if solvers is None:
        solvers = sorted({s for s, _, _ in grouped})
    problems = sorted(problems)

    ert_matrix = np.full((len(solvers), len(problems)), np.inf)
    for i, solver in enumerate(solvers):
        for j, (fid, dim) in enumerate(problems):
            group = grouped.get((solver, fid, dim))
            if group:
                ert_matrix[i, j] = ert(group, epsilon)
    return _table_from_ert(solvers, problems, ert_matrix, epsilon)


def vbs(table: PerformanceTable):
    """Per-problem argmin solver (ties to the first solver in table order)
    and the mean relERT of those choices, which is 1 by construction."""
    choice = {}
    for j, problem in enumerate(table.problems):
        choice[problem] = table.solvers[int(np.argmin(table.relert[:, j]))]
    mean = float(np.mean(table.relert.min(axis=0)))
    return choice, mean


def sbs(table: PerformanceTable):
    """The single solver minimizing mean relERT across all problems."""
    means = table.relert.mean(axis=1)
    idx = int(np.argmin(means))
    return table.solvers[idx], float(means[idx])


def sbs_per_fold(table: PerformanceTable) -> list:
    """SBS recomputed with each problem held out; parity check for sbs()."""
    out = []
    for j in range(len(table.problems)):
        keep = np.ones(len(table.problems), dtype=bool)
        keep[j] = False
        means = table.relert[:, keep].mean(axis=1)
        out.append(table.solvers[int(np.argmin(means))])
    return out


@dataclass
class Portfolio:
    members: list  # ordered by full-table mean relERT, ascending
    per_dim_sets: dict  # dim -> set of solver ids
    best_per_problem: dict  # (fid, dim) -> solver id

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump({
                "members": self.members,
                "per_dim_sets": {str(d): sorted(s)
                                 for d, s in self.per_dim_sets.items()},
                "best_per_problem": {f"{f}:{d}": s for (f, d), s
                                     in sorted(self.best_per_problem.items())},
            }, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "Portfolio":
        with open(path) as fh:
            data = json.load(fh)
        return cls(
            members=data["members"],
            per_dim_sets={int(d): set(s)
                          for d, s in data["per_dim_sets"].items()},
            best_per_problem={tuple(int(v) for v in k.split(":")): s
                              for k, s in data["best_per_problem"].items()},
        )


def _competition_ranks(values: np.ndarray) -> np.ndarray:
    """Rank with ties sharing the better rank ("1224"); inf ranks last."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=int)
    for pos, idx in enumerate(order):
        if pos > 0 and values[idx] == values[order[pos - 1]]:
            ranks[idx] = ranks[order[pos - 1]]
        else:
            ranks[idx] = pos + 1
    return ranks


def build_portfolio(table: PerformanceTable, top_k: int = 3) -> Portfolio:
    """Solvers ranked Top-k by ERT on at least one function in every dimension.

    Per dimension, solvers are ranked per function by ERT (undefined last,
    ties share the better rank); the union of Top-k appearances gives one set
    per dimension and the portfolio is their intersection.
    """
    dims = sorted({d for _, d in table.problems})
    per_dim_sets = {}
    for dim in dims:
        cols = [j for j, (_, d) in enumerate(table.problems) if d == dim]
        selected = set()
        for j in cols:
            ranks = _competition_ranks(table.ert[:, j])
            selected.update(s for s, r in zip(table.solvers, ranks)
                            if r <= top_k)
        per_dim_sets[dim] = selected

    members = set.intersection(*per_dim_sets.values()) if per_dim_sets else set()
    if not members:
        raise EmptyPortfolioError(per_dim_sets)

    means = {s: float(table.relert[table.solvers.index(s)].mean())
             for s in members}
    ordered = sorted(members, key=lambda s: (means[s], s))

    sub = table.restrict_solvers(ordered)
    best_per_problem, _ = vbs(sub)
    return Portfolio(ordered, per_dim_sets, best_per_problem)
