"""Algorithm-selector training, evaluation and feature selection."""

from .cv import DESIGN_MULTIPLIER, CvResult, cost_inclusive_relert, lofo_cv
from .featsel import (FeatureSelectionResult, ga_fs, sfbs, sffs)
from .grid import FS_STRATEGIES, GridEntry, grid_search, write_leaderboard
from .learners import (available_learners, make_learner, register_learner)
from .models import (PARADIGMS, SelectorModel, label_best, load_model,
                     model_fingerprint, predict, save_model, train)

__all__ = [
    "DESIGN_MULTIPLIER", "CvResult", "cost_inclusive_relert", "lofo_cv",
    "FeatureSelectionResult", "ga_fs", "sfbs", "sffs",
    "FS_STRATEGIES", "GridEntry", "grid_search", "write_leaderboard",
    "available_learners", "make_learner", "register_learner",
    "PARADIGMS", "SelectorModel", "label_best", "load_model",
    "model_fingerprint", "predict", "save_model", "train",
]
