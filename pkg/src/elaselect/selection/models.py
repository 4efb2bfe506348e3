"""Selector training and prediction under the three supervised paradigms."""

from __future__ import annotations

import hashlib
import pickle
from dataclasses import dataclass, field

import numpy as np

from ..errors import AlignmentError
from ..features import FeatureMatrix
from ..performance import PerformanceTable
from ..sampling import make_rng
from .learners import ConstantPredictor, make_learner

PARADIGMS = ("classification", "regression", "pairwise-regression")

MODEL_FORMAT_VERSION = 1


def label_best(table: PerformanceTable, seed: int = 0) -> dict:
    """Best solver per problem; ties resolved by a seeded uniform draw keyed
    on the problem id so the choice is order-independent."""
    labels = {}
    for j, (fid, dim) in enumerate(table.problems):
        col = table.relert[:, j]
        tied = np.flatnonzero(col == col.min())
        if len(tied) == 1:
            pick = tied[0]
        else:
            rng = make_rng([seed, fid, dim])
            pick = tied[int(rng.integers(len(tied)))]
        labels[(fid, dim)] = table.solvers[int(pick)]
    return labels


def align_problems(features: FeatureMatrix, table: PerformanceTable) -> list:
    """Common problem ordering; raises listing orphan keys on mismatch."""
    f_keys = set(features.keys)
    t_keys = set(map(tuple, table.problems))
    if f_keys != t_keys:
        raise AlignmentError(f_keys - t_keys, t_keys - f_keys)
    return list(table.problems)


@dataclass
class SelectorModel:
    paradigm: str
    learner: str
    solvers: list
    feature_names: tuple
    mask: np.ndarray  # boolean over the full feature schema
    medians: np.ndarray  # training imputation values for masked features
    fitted: dict  # key -> estimator; see paradigm docs
    seed: int
    label: str = ""
    degenerate: bool = False

    @property
    def n_models(self) -> int:
        return len(self.fitted)

    def schema_hash(self) -> str:
        return hashlib.sha256(
            "\n".join(self.feature_names).encode()).hexdigest()


def _impute_fit(X: np.ndarray) -> np.ndarray:
    """Column medians over finite entries; 0 for all-NaN columns."""
    medians = np.zeros(X.shape[1])
    for j in range(X.shape[1]):
        col = X[:, j]
        finite = col[np.isfinite(col)]
        if len(finite):
            medians[j] = np.median(finite)
    return medians


def _impute_apply(X: np.ndarray, medians: np.ndarray) -> np.ndarray:
    X = np.array(X, dtype=float)
    bad = ~np.isfinite(X)
    X[bad] = np.broadcast_to(medians, X.shape)[bad]
    return X


def _fit_estimator(learner_id, task, seed, X, y):
    est = make_learner(learner_id, task, seed)
    if hasattr(est, "n_neighbors") and len(X) < est.n_neighbors:
        est.set_params(n_neighbors=len(X))
    est.fit(X, y)
    return est


def train(features: FeatureMatrix, table: PerformanceTable, paradigm: str,
          learner: str, mask=None, seed: int = 0,
          label: str = "") -> SelectorModel:
    """Fit a selector.

    classification: one multiclass model on best-solver labels.
    regression: one model per solver on log10(relERT).
    pairwise-regression: one model per unordered solver pair on the
    difference of the two log10(relERT) targets.
    """
    if paradigm not in PARADIGMS:
        raise ValueError(f"unknown paradigm {paradigm!r}, expected {PARADIGMS}")
    problems = align_problems(features, table)
    if mask is None:
        mask = np.ones(len(features.names), dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (len(features.names),):
        raise ValueError("mask length must match the feature schema")
    if not mask.any():
        raise ValueError("mask must select at least one feature")

    raw = np.array([features.row(p) for p in problems])[:, mask]
    medians = _impute_fit(raw)
    X = _impute_apply(raw, medians)
    log_rel = np.log10(table.relert)

    fitted = {}
    degenerate = False
    if paradigm == "classification":
        labels = label_best(table, seed)
        y = np.array([labels[tuple(p)] for p in problems])
        if len(np.unique(y)) < 2:
            fitted["classifier"] = ConstantPredictor(y[0])
            degenerate = True
        else:
            fitted["classifier"] = _fit_estimator(learner, "classification",
                                                  seed, X, y)
    elif paradigm == "regression":
        for i, solver in enumerate(table.solvers):
            y = log_rel[i, :]
            if np.ptp(y) == 0:
                fitted[solver] = ConstantPredictor(y[0])
            else:
                fitted[solver] = _fit_estimator(learner, "regression",
                                                seed, X, y)
    else:
        for i in range(len(table.solvers)):
            for j in range(i + 1, len(table.solvers)):
                y = log_rel[i, :] - log_rel[j, :]
                key = (table.solvers[i], table.solvers[j])
                if np.ptp(y) == 0:
                    fitted[key] = ConstantPredictor(y[0])
                else:
                    fitted[key] = _fit_estimator(learner, "regression",
                                                 seed, X, y)

    return SelectorModel(paradigm=paradigm, learner=learner,
                         solvers=list(table.solvers),
                         feature_names=tuple(features.names), mask=mask,
                         medians=medians, fitted=fitted, seed=seed,
                         label=label, degenerate=degenerate)


def predict(model: SelectorModel, feature_vector) -> str:
    """Solver choice for one feature row (full-schema vector or array).

    regression picks the argmin predicted performance; pairwise-regression
    scores each solver by the signed sum of its predicted pair differences
    (positive difference for pair (a, b) means a is predicted worse) and picks
    the smallest aggregate.  Ties fall to the earlier solver in table order.
    """
    row = np.asarray(getattr(feature_vector, "values", feature_vector),
                     dtype=float)
    if row.shape != (len(model.feature_names),):
        raise ValueError("feature vector does not match the model schema")
    X = _impute_apply(row[model.mask][None, :], model.medians)

    if model.paradigm == "classification":
        return str(model.fitted["classifier"].predict(X)[0])
    if model.paradigm == "regression":
        preds = [float(model.fitted[s].predict(X)[0]) for s in model.solvers]
        return model.solvers[int(np.argmin(preds))]
    scores = {s: 0.0 for s in model.solvers}
    for (a, b), est in model.fitted.items():
        diff = float(est.predict(X)[0])  # log-relERT(a) - log-relERT(b)
        scores[a] += diff
        scores[b] -= diff
    ordered = {s: i for i, s in enumerate(model.solvers)}
    return min(model.solvers, key=lambda s: (scores[s], ordered[s]))


def save_model(model: SelectorModel, path) -> None:
    """Versioned pickle container with a hash of the feature schema."""
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "schema_hash": model.schema_hash(),
        "model": model,
    }
    with open(path, "wb") as fh:
        pickle.dump(payload, fh)


def load_model(path) -> SelectorModel:
    with open(path, "rb") as fh:
        payload = pickle.load(fh)
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model container version "
                         f"{payload.get('format_version')}")
    model = payload["model"]
    if payload["schema_hash"] != model.schema_hash():
        raise ValueError("model container schema hash mismatch")
    return model


def model_fingerprint(model: SelectorModel) -> str:
    """Stable digest of the fitted state; used for leakage checks."""
    return hashlib.sha256(pickle.dumps(
        (model.paradigm, model.learner, model.solvers, model.mask.tolist(),
         model.medians.tolist(), sorted_fitted_bytes(model)))).hexdigest()


def sorted_fitted_bytes(model: SelectorModel) -> list:
    return [pickle.dumps(model.fitted[k])
            for k in sorted(model.fitted, key=str)]
