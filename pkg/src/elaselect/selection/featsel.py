"""Wrapper feature-selection strategies over LOFO-CV performance.

All strategies minimize the cost-inclusive mean relERT of the candidate
feature subset and log every accepted step, so monotone improvement is
checkable after the fact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..sampling import make_rng
from .cv import DESIGN_MULTIPLIER, lofo_cv

IMPROVEMENT_TOL = 1e-6


@dataclass
class FeatureSelectionResult:
    mask: np.ndarray
    score: float  # CV mean relERT of the returned mask
    steps: list = field(default_factory=list)  # (action, feature_idx, score)
    n_evaluations: int = 0

    @property
    def selected(self) -> np.ndarray:
        return np.flatnonzero(self.mask)


class _Evaluator:
    def __init__(self, features, table, paradigm, learner, seed, design_mult):
        self.features = features
        self.table = table
        self.paradigm = paradigm
        self.learner = learner
        self.seed = seed
        self.design_mult = design_mult
        self.count = 0

    def __call__(self, mask) -> float:
        self.count += 1
        return lofo_cv(self.features, self.table, self.paradigm, self.learner,
                       mask=mask, seed=self.seed,
                       design_mult=self.design_mult).mean_relert


def _best_single_change(evaluate, mask, candidates, enable: bool):
    """Best score over flipping one candidate bit on (enable) or off."""
    best_idx, best_score = None, np.inf
    for idx in candidates:
        trial = mask.copy()
        trial[idx] = enable
        score = evaluate(trial)
        if score < best_score:
            best_idx, best_score = idx, score
    return best_idx, best_score


def _float_search(features, table, paradigm, learner, seed, design_mult,
                  start_full: bool, tol: float) -> FeatureSelectionResult:
    """Floating selection: greedy primary moves with opposite-direction
    backtracking after each accepted move."""
    p = len(features.names)
    evaluate = _Evaluator(features, table, paradigm, learner, seed, design_mult)
    mask = np.full(p, start_full)
    primary_enable = not start_full  # forward adds, backward removes
    steps = []
    score = evaluate(mask) if start_full else np.inf

    while True:
        if primary_enable:
            candidates = np.flatnonzero(~mask)
        else:
            candidates = np.flatnonzero(mask) if mask.sum() > 1 else []
        if len(candidates) == 0:
            break
        idx, new_score = _best_single_change(evaluate, mask, candidates,
                                             primary_enable)
        if new_score >= score - tol:
            break
        mask[idx] = primary_enable
        score = new_score
        steps.append(("add" if primary_enable else "remove", int(idx), score))

        # floating phase: opposite moves while they keep improving
        while True:
            if primary_enable:
                back = np.flatnonzero(mask) if mask.sum() > 1 else []
            else:
                back = np.flatnonzero(~mask)
            if len(back) == 0:
                break
            bidx, bscore = _best_single_change(evaluate, mask, back,
                                               not primary_enable)
            if bscore >= score - tol:
                break
            mask[bidx] = not primary_enable
            score = bscore
            steps.append(("remove" if primary_enable else "add",
                          int(bidx), score))

    if not mask.any():
        # forward search found no improving feature at all: fall back to the
        # single best candidate so the mask contract holds
        idx, score = _best_single_change(evaluate, mask, np.arange(p), True)
        mask[idx] = True
        steps.append(("add", int(idx), score))
    return FeatureSelectionResult(mask, score, steps, evaluate.count)


def sffs(features, table, paradigm, learner, seed: int = 0,
         design_mult: int = DESIGN_MULTIPLIER,
         tol: float = IMPROVEMENT_TOL) -> FeatureSelectionResult:
    """Greedy floating forward selection starting from the empty mask."""
    return _float_search(features, table, paradigm, learner, seed,
                         design_mult, start_full=False, tol=tol)


def sfbs(features, table, paradigm, learner, seed: int = 0,
         design_mult: int = DESIGN_MULTIPLIER,
         tol: float = IMPROVEMENT_TOL) -> FeatureSelectionResult:
    """Greedy floating backward selection starting from the full mask."""
    return _float_search(features, table, paradigm, learner, seed,
                         design_mult, start_full=True, tol=tol)


def ga_fs(features, table, paradigm, learner, mu: int = 10, lam: int = 5,
          generations: int = 100, mutation_rate: float = 0.05,
          crossover_rate: float = 0.5, seed: int = 0,
          design_mult: int = DESIGN_MULTIPLIER) -> FeatureSelectionResult:
    """(mu+lam) genetic bit-string search; elitist, reproducible under seed.

    Evaluates exactly mu + lam * generations candidate masks.
    """
    p = len(features.names)
    rng = make_rng([seed, 0xF5])
    evaluate = _Evaluator(features, table, paradigm, learner, seed, design_mult)

    def repair(mask):
        if not mask.any():
            mask[int(rng.integers(p))] = True
        return mask

    population = [repair(rng.random(p) < 0.5) for _ in range(mu)]
    scores = [evaluate(m) for m in population]
    order = np.argsort(scores, kind="stable")
    best_mask = population[order[0]].copy()
    best_score = scores[order[0]]
    history = [("init", -1, best_score)]

    for _ in range(generations):
        offspring = []
        for _ in range(lam):
            i, j = rng.integers(mu), rng.integers(mu)
            if rng.random() < crossover_rate:
                take = rng.random(p) < 0.5
                child = np.where(take, population[i], population[j])
            else:
                child = population[i].copy()
            flips = rng.random(p) < mutation_rate
            child = repair(np.logical_xor(child, flips))
            offspring.append(child)
        off_scores = [evaluate(m) for m in offspring]

        combined = population + offspring
        combined_scores = scores + off_scores
        keep = np.argsort(combined_scores, kind="stable")[:mu]
        population = [combined[k] for k in keep]
        scores = [combined_scores[k] for k in keep]
        if scores[0] < best_score:
            best_score = scores[0]
            best_mask = population[0].copy()
            history.append(("generation", -1, best_score))

    return FeatureSelectionResult(best_mask, best_score, history,
                                  evaluate.count)
