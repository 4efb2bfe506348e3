"""Grid evaluation over learners, paradigms and feature-selection strategies."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .cv import DESIGN_MULTIPLIER, CvResult, lofo_cv
from .featsel import ga_fs, sfbs, sffs
from .models import SelectorModel, train

logger = logging.getLogger(__name__)

FS_STRATEGIES = ("none", "sffs", "sfbs", "ga_10_5", "ga_10_50")


@dataclass
class GridEntry:
    learner: str
    paradigm: str
    fs_strategy: str
    seed: int
    mask: np.ndarray | None
    model: SelectorModel | None
    cv: CvResult | None
    error: str | None = None

    @property
    def score(self) -> float:
        return self.cv.mean_relert if self.cv is not None else float("inf")


def _select_mask(strategy, features, table, paradigm, learner, seed,
                 design_mult, ga_generations):
    if strategy == "none":
        return np.ones(len(features.names), dtype=bool)
    if strategy == "sffs":
        return sffs(features, table, paradigm, learner, seed=seed,
                    design_mult=design_mult).mask
    if strategy == "sfbs":
        return sfbs(features, table, paradigm, learner, seed=seed,
                    design_mult=design_mult).mask
    if strategy in ("ga_10_5", "ga_10_50"):
        lam = 5 if strategy == "ga_10_5" else 50
        return ga_fs(features, table, paradigm, learner, mu=10, lam=lam,
                     generations=ga_generations, seed=seed,
                     design_mult=design_mult).mask
    raise ValueError(f"unknown feature-selection strategy {strategy!r}; "
                     f"expected one of {FS_STRATEGIES}")


def grid_search(features, table, learners, paradigms, fs_strategies,
                seed: int = 0, design_mult: int = DESIGN_MULTIPLIER,
                ga_generations: int = 100) -> list:
    """Evaluate the full cartesian grid; failures are recorded, not fatal.

    Returns GridEntry objects ranked by cost-inclusive mean relERT ascending.
    Each cell gets its own derived seed so cells are independent of
    evaluation order.
    """
    if not learners or not paradigms or not fs_strategies:
        raise ValueError("learners, paradigms and fs_strategies must be "
                         "non-empty")
    entries = []
    for li, learner in enumerate(learners):
        for pi, paradigm in enumerate(paradigms):
            for si, strategy in enumerate(fs_strategies):
                cell_seed_parts = [seed, li, pi, si]
                cell_seed = int(np.random.SeedSequence(
                    cell_seed_parts).generate_state(1)[0] % (2 ** 31))
                try:
                    mask = _select_mask(strategy, features, table, paradigm,
                                        learner, cell_seed, design_mult,
                                        ga_generations)
                    model = train(features, table, paradigm, learner,
                                  mask=mask, seed=cell_seed,
                                  label=f"{learner}/{paradigm}/{strategy}")
                    cv = lofo_cv(features, table, paradigm, learner,
                                 mask=mask, seed=cell_seed,
                                 design_mult=design_mult)
                    entries.append(GridEntry(learner, paradigm, strategy,
                                             cell_seed, mask, model, cv))
                except Exception as exc:
                    logger.warning("grid cell %s/%s/%s failed: %s",
                                   learner, paradigm, strategy, exc)
                    entries.append(GridEntry(learner, paradigm, strategy,
                                             cell_seed, None, None, None,
                                             error=str(exc)))
    entries.sort(key=lambda e: (e.score, e.learner, e.paradigm, e.fs_strategy))
    return entries


def write_leaderboard(entries, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", "learner", "paradigm", "fs_strategy",
                         "mean_relert_cost", "mean_relert_nocost",
                         "n_features", "seed", "error"])
        for rank, entry in enumerate(entries, start=1):
            writer.writerow([
                rank, entry.learner, entry.paradigm, entry.fs_strategy,
                "" if entry.cv is None
                else format(entry.cv.mean_relert, ".17g"),
                "" if entry.cv is None
                else format(entry.cv.mean_relert_no_cost, ".17g"),
                "" if entry.mask is None else int(entry.mask.sum()),
                entry.seed,
                entry.error or "",
            ])
