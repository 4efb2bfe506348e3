"""Classical landscape features: y-distribution, levelset and meta-model sets."""

from __future__ import annotations

import warnings

import numpy as np
from scipy.stats import gaussian_kde
from sklearn.exceptions import ConvergenceWarning
from sklearn.mixture import GaussianMixture
from sklearn.model_selection import StratifiedKFold

from .vector import FeatureVector

DISTR_NAMES = ("ela_distr.skewness", "ela_distr.kurtosis", "ela_distr.n_peaks")

LEVEL_QUANTILES = (0.10, 0.25, 0.50)
META_NAMES = (
    "ela_meta.lin_r2_adj",
    "ela_meta.lin_coef_min",
    "ela_meta.lin_coef_max",
    "ela_meta.lin_coef_ratio",
    "ela_meta.quad_r2_adj",
    "ela_meta.quad_cond",
    "ela_meta.rank_deficient",
)

KDE_GRID_POINTS = 512


def level_names(quantiles=LEVEL_QUANTILES) -> tuple:
    names = []
    for q in quantiles:
        tag = f"{int(round(q * 100)):02d}"
        names += [
            f"ela_level.mmce_lda_{tag}",
            f"ela_level.mmce_qda_{tag}",
            f"ela_level.mmce_mda_{tag}",
            f"ela_level.lda_qda_{tag}",
            f"ela_level.lda_mda_{tag}",
            f"ela_level.qda_mda_{tag}",
        ]
    names.append("ela_level.degenerate")
    return tuple(names)


LEVEL_NAMES = level_names()


def _moments(y: np.ndarray):
    centered = y - y.mean()
    m2 = np.mean(centered ** 2)
    m3 = np.mean(centered ** 3)
    m4 = np.mean(centered ** 4)
    return m2, m3, m4


def ela_distribution(design) -> FeatureVector:
    """Skewness, excess kurtosis and KDE peak count of the objective values."""
    if design.values is None:
        raise ValueError("design must carry objective values")
    y = design.values
    if len(y) < 4:
        raise ValueError(f"need at least 4 observations, got {len(y)}")
    m2, m3, m4 = _moments(y)
    if m2 == 0.0:
        # constant objective: moments undefined, a single trivial peak
        values = [np.nan, np.nan, 1.0]
        return FeatureVector(DISTR_NAMES, np.array(values), design.n)
    skewness = m3 / m2 ** 1.5
    kurtosis = m4 / m2 ** 2 - 3.0
    kde = gaussian_kde(y, bw_method="silverman")
    grid = np.linspace(y.min(), y.max(), KDE_GRID_POINTS)
    dens = kde(grid)
    interior = (dens[1:-1] > dens[:-2]) & (dens[1:-1] > dens[2:])
    n_peaks = int(np.sum(interior))
    n_peaks += int(dens[0] > dens[1]) + int(dens[-1] > dens[-2])
    return FeatureVector(DISTR_NAMES,
                         np.array([skewness, kurtosis, float(n_peaks)]),
                         design.n)


class _LDA:
    """Linear discriminant with explicit covariance regularization."""

    def __init__(self):
        self.degenerate = False

    def fit(self, X, labels):
        self.classes = np.unique(labels)
        n, d = X.shape
        self.means = np.array([X[labels == c].mean(axis=0) for c in self.classes])
        self.priors = np.array([np.mean(labels == c) for c in self.classes])
        pooled = np.zeros((d, d))
        for c, mu in zip(self.classes, self.means):
            diff = X[labels == c] - mu
            pooled += diff.T @ diff
        pooled /= max(n - len(self.classes), 1)
        self.cov_inv, self.degenerate = _safe_inv(pooled)
        return self

    def predict(self, X):
        scores = np.empty((len(X), len(self.classes)))
        for k, (mu, prior) in enumerate(zip(self.means, self.priors)):
            proj = X @ (self.cov_inv @ mu)
            scores[:, k] = proj - 0.5 * mu @ self.cov_inv @ mu + np.log(prior)
        return self.classes[np.argmax(scores, axis=1)]


class _QDA:
    """Quadratic discriminant with per-class regularized covariances."""

    def __init__(self):
        self.degenerate = False

    def fit(self, X, labels):
        self.classes = np.unique(labels)
        self.params = []
        for c in self.classes:
            sub = X[labels == c]
            mu = sub.mean(axis=0)
            diff = sub - mu
            cov = diff.T @ diff / max(len(sub) - 1, 1)
            inv, degen = _safe_inv(cov)
            self.degenerate |= degen
            sign, logdet = np.linalg.slogdet(cov + (1e-8 * np.eye(len(mu)) if degen else 0.0))
            self.params.append((mu, inv, logdet, np.log(np.mean(labels == c))))
        return self

    def predict(self, X):
        scores = np.empty((len(X), len(self.classes)))
        for k, (mu, inv, logdet, logprior) in enumerate(self.params):
            diff = X - mu
            maha = np.einsum("ij,jk,ik->i", diff, inv, diff)
            scores[:, k] = -0.5 * (maha + logdet) + logprior
        return self.classes[np.argmax(scores, axis=1)]


class _MDA:
    """Mixture discriminant: a 2-component Gaussian mixture per class."""

    def __init__(self, seed=0):
        self.seed = seed
        self.degenerate = False

    def fit(self, X, labels):
        self.classes = np.unique(labels)
        self.models = []
        for c in self.classes:
            sub = X[labels == c]
            n_comp = min(2, len(sub))
            gm = GaussianMixture(
                n_components=n_comp, covariance_type="full", max_iter=20,
                init_params="k-means++", reg_covar=1e-8,
                random_state=self.seed)
            with warnings.catch_warnings():
                # the EM budget is pinned at 20 iterations; non-convergence
                # within that budget is expected, not a defect
                warnings.simplefilter("ignore", ConvergenceWarning)
                gm.fit(sub)
            self.models.append((gm, np.log(np.mean(labels == c))))
        return self

    def predict(self, X):
        scores = np.empty((len(X), len(self.classes)))
        for k, (gm, logprior) in enumerate(self.models):
            scores[:, k] = gm.score_samples(X) + logprior
        return self.classes[np.argmax(scores, axis=1)]


def _safe_inv(cov: np.ndarray):
    """Inverse, falling back to +1e-8*I regularization on singular input."""
    try:
        inv = np.linalg.inv(cov)
        if not np.all(np.isfinite(inv)):
            raise np.linalg.LinAlgError
        # reject inverses from numerically singular matrices
        if np.linalg.cond(cov) > 1e12:
            raise np.linalg.LinAlgError
        return inv, False
    except np.linalg.LinAlgError:
        return np.linalg.inv(cov + 1e-8 * np.eye(cov.shape[0])), True


def _ratio(a: float, b: float) -> float:
    if b == 0.0:
        return 1.0 if a == 0.0 else np.nan
    return a / b


def ela_levelset(design, quantiles=LEVEL_QUANTILES, seed=0) -> FeatureVector:
    """Cross-validated misclassification errors of LDA/QDA/MDA level splits."""
    if design.values is None:
        raise ValueError("design must carry objective values")
    X, y = design.points, design.values
    n = len(y)
    if n < 20:
        raise ValueError(f"need at least 20 observations, got {n}")
    values = []
    degenerate = False
    for q in quantiles:
        threshold = np.quantile(y, q)
        labels = (y <= threshold).astype(int)
        counts = np.bincount(labels, minlength=2)
        if counts.min() < 2:
            raise ValueError(
                f"quantile {q} split leaves fewer than 2 points on one side")
        n_splits = int(min(10, counts.min()))
        skf = StratifiedKFold(n_splits=n_splits, shuffle=False)
        errors = {"lda": [], "qda": [], "mda": []}
        for train_idx, test_idx in skf.split(X, labels):
            fitted = {
                "lda": _LDA().fit(X[train_idx], labels[train_idx]),
                "qda": _QDA().fit(X[train_idx], labels[train_idx]),
                "mda": _MDA(seed).fit(X[train_idx], labels[train_idx]),
            }
            for key, clf in fitted.items():
                pred = clf.predict(X[test_idx])
                errors[key].append(np.mean(pred != labels[test_idx]))
                degenerate |= clf.degenerate
        lda = float(np.mean(errors["lda"]))
        qda = float(np.mean(errors["qda"]))
        mda = float(np.mean(errors["mda"]))
        values += [lda, qda, mda,
                   _ratio(lda, qda), _ratio(lda, mda), _ratio(qda, mda)]
    values.append(1.0 if degenerate else 0.0)
    return FeatureVector(level_names(quantiles), np.array(values), design.n)


def _adjusted_r2(y, pred, n_params):
    n = len(y)
    ss_tot = np.sum((y - y.mean()) ** 2)
    if ss_tot == 0.0:
        return np.nan
    r2 = 1.0 - np.sum((y - pred) ** 2) / ss_tot
    return 1.0 - (1.0 - r2) * (n - 1) / (n - n_params - 1)


def ela_meta(design) -> FeatureVector:
    """Fit quality and coefficient spread of linear and quadratic surrogates."""
    if design.values is None:
        raise ValueError("design must carry objective values")
    X, y = design.points, design.values
    n, d = X.shape
    if n < 2 * d + 2:
        raise ValueError(f"need at least 2d+2 = {2 * d + 2} observations, got {n}")

    lin_mat = np.column_stack([np.ones(n), X])
    lin_coef, _, lin_rank, _ = np.linalg.lstsq(lin_mat, y, rcond=None)
    lin_pred = lin_mat @ lin_coef
    lin_r2 = _adjusted_r2(y, lin_pred, d)
    abs_coef = np.abs(lin_coef[1:])
    coef_min, coef_max = float(abs_coef.min()), float(abs_coef.max())
    coef_ratio = coef_max / coef_min if coef_min > 0 else np.nan

    quad_mat = np.column_stack([np.ones(n), X, X ** 2])
    quad_coef, _, quad_rank, _ = np.linalg.lstsq(quad_mat, y, rcond=None)
    quad_pred = quad_mat @ quad_coef
    quad_r2 = _adjusted_r2(y, quad_pred, 2 * d)
    abs_quad = np.abs(quad_coef[1 + d:])
    quad_cond = (float(abs_quad.max()) / float(abs_quad.min())
                 if abs_quad.min() > 0 else np.nan)

    rank_deficient = float(lin_rank < d + 1 or quad_rank < 2 * d + 1)
    values = np.array([lin_r2, coef_min, coef_max, coef_ratio,
                       quad_r2, quad_cond, rank_deficient])
    return FeatureVector(META_NAMES, values, design.n)
