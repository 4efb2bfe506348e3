"""Pluggable learners behind a minimal fit/predict interface.

Three learner families are registered: a CART-style decision tree, a random
forest (500 trees, feature subsampling floor(sqrt(p)) for classification and
max(floor(p/3), 1) for regression) and a 5-nearest-neighbour baseline.  New
learners can be registered under their own id.
"""

from __future__ import annotations

from sklearn.ensemble import RandomForestClassifier, RandomForestRegressor
from sklearn.neighbors import KNeighborsClassifier, KNeighborsRegressor
from sklearn.tree import DecisionTreeClassifier, DecisionTreeRegressor

RF_TREES = 500
KNN_K = 5


def _rf_classifier(seed):
    return RandomForestClassifier(n_estimators=RF_TREES, max_features="sqrt",
                                  random_state=seed, n_jobs=1)


def _rf_regressor(seed):
    # sklearn floors float max_features, matching max(floor(p/3), 1)
    return RandomForestRegressor(n_estimators=RF_TREES, max_features=1.0 / 3.0,
                                 random_state=seed, n_jobs=1)


_REGISTRY = {
    "rpart": {
        "classification": lambda seed: DecisionTreeClassifier(random_state=seed),
        "regression": lambda seed: DecisionTreeRegressor(random_state=seed),
    },
    "rf": {
        "classification": _rf_classifier,
        "regression": _rf_regressor,
    },
    "knn": {
        "classification": lambda seed: KNeighborsClassifier(n_neighbors=KNN_K),
        "regression": lambda seed: KNeighborsRegressor(n_neighbors=KNN_K),
    },
}


def register_learner(learner_id: str, classification_factory,
                     regression_factory) -> None:
    """Add a learner plugin; factories take a seed and return fit/predict
    estimators."""
    _REGISTRY[learner_id] = {"classification": classification_factory,
                             "regression": regression_factory}


def available_learners() -> list:
    return sorted(_REGISTRY)


def make_learner(learner_id: str, task: str, seed: int = 0):
    """task is "classification" or "regression"."""
    try:
        return _REGISTRY[learner_id][task](seed)
    except KeyError:
        raise ValueError(
            f"unknown learner {learner_id!r} or task {task!r}; "
            f"registered: {available_learners()}") from None


class ConstantPredictor:
    """Fallback when training data is degenerate (e.g. a single class)."""

    def __init__(self, value):
        self.value = value

    def fit(self, X, y):
        return self

    def predict(self, X):
        import numpy as np

        return np.full(len(X), self.value)
