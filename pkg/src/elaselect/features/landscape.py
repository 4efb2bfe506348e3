"""Sample-geometry feature sets: basic, dispersion, nearest-better clustering,
information content, cell-mapping angle and principal-component features."""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .vector import FeatureVector

BASIC_NAMES = ("basic.dim", "basic.n", "basic.lower_min", "basic.upper_max",
               "basic.best", "basic.worst")

DISP_QUANTILES = (0.02, 0.05, 0.10, 0.25)

NBC_NAMES = ("nbc.nn_nb_sd_ratio", "nbc.nn_nb_mean_ratio",
             "nbc.nn_nb_cor", "nbc.fitness_indegree_cor")

IC_NAMES = ("ic.h_max", "ic.eps_s", "ic.eps_max")
IC_SETTLING_THRESHOLD = 0.05

CM_NAMES = ("cm_angle.angle_mean", "cm_angle.angle_sd",
            "cm_angle.dist_best_mean", "cm_angle.dist_best_sd",
            "cm_angle.dist_worst_mean", "cm_angle.dist_worst_sd",
            "cm_angle.frac_nonempty")

PCA_NAMES = ("pca.expl_var_cov_x", "pca.expl_var_cor_x",
             "pca.expl_var_cov_init", "pca.expl_var_cor_init",
             "pca.pc1_cov_x", "pca.pc1_cor_x",
             "pca.pc1_cov_init", "pca.pc1_cor_init",
             "pca.degenerate")


def disp_names(quantiles=DISP_QUANTILES) -> tuple:
    names = []
    for q in quantiles:
        tag = f"{int(round(q * 100)):02d}"
        names += [f"disp.ratio_mean_{tag}", f"disp.ratio_median_{tag}",
                  f"disp.diff_mean_{tag}", f"disp.diff_median_{tag}"]
    return tuple(names)


DISP_NAMES = disp_names()


def basic(design) -> FeatureVector:
    if design.values is None:
        raise ValueError("design must carry objective values")
    values = np.array([
        float(design.dim),
        float(design.n),
        float(design.domain.lower.min()),
        float(design.domain.upper.max()),
        float(design.values.min()),
        float(design.values.max()),
    ])
    return FeatureVector(BASIC_NAMES, values, design.n)


def disp(design, quantiles=DISP_QUANTILES) -> FeatureVector:
    """Dispersion of the best-q-fraction points relative to the full sample."""
    if design.values is None:
        raise ValueError("design must carry objective values")
    X, y = design.points, design.values
    n = len(y)
    order = np.argsort(y, kind="stable")  # ties broken by point index
    all_dists = pdist(X)
    mean_all = float(all_dists.mean())
    median_all = float(np.median(all_dists))
    values = []
    for q in quantiles:
        k = int(np.ceil(q * n))
        if k < 2:
            values += [np.nan] * 4
            continue
        sub = pdist(X[order[:k]])
        mean_sub = float(sub.mean())
        median_sub = float(np.median(sub))
        values += [mean_sub / mean_all, median_sub / median_all,
                   mean_sub - mean_all, median_sub - median_all]
    return FeatureVector(disp_names(quantiles), np.array(values), design.n)


def nbc(design) -> FeatureVector:
    """Nearest-neighbour vs nearest-better-neighbour distance statistics.

    Ties in the objective are broken by point index: a point with equal value
    but smaller index counts as better.  The sample-best point has no better
    neighbour and is excluded from the nearest-better statistics.
    """
    if design.values is None:
        raise ValueError("design must carry objective values")
    X, y = design.points, design.values
    n = len(y)
    if n < 5:
        raise ValueError(f"need at least 5 observations, got {n}")
    dist = squareform(pdist(X))
    np.fill_diagonal(dist, np.inf)
    nn_dist = dist.min(axis=1)

    idx = np.arange(n)
    better = (y[None, :] < y[:, None]) | ((y[None, :] == y[:, None])
                                          & (idx[None, :] < idx[:, None]))
    nb_dist = np.full(n, np.nan)
    nb_target = np.full(n, -1)
    for i in range(n):
        cand = np.where(better[i])[0]
        if len(cand):
            j = cand[np.argmin(dist[i, cand])]
            nb_target[i] = j
            nb_dist[i] = dist[i, j]
    has_nb = nb_target >= 0

    nb = nb_dist[has_nb]
    sd_nn = float(np.std(nn_dist, ddof=1))
    sd_nb = float(np.std(nb, ddof=1)) if len(nb) > 1 else 0.0
    sd_ratio = sd_nn / sd_nb if sd_nb > 0 else (1.0 if sd_nn == 0 else np.nan)
    mean_ratio = (float(nn_dist.mean()) / float(nb.mean())
                  if nb.mean() > 0 else np.nan)
    cor = _pearson(nn_dist[has_nb], nb)

    indegree = np.bincount(nb_target[has_nb], minlength=n).astype(float)
    indegree_cor = _pearson(y, indegree)
    values = np.array([sd_ratio, mean_ratio, cor, indegree_cor])
    return FeatureVector(NBC_NAMES, values, design.n)


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    if len(a) < 2 or np.std(a) == 0 or np.std(b) == 0:
        return np.nan
    return float(np.corrcoef(a, b)[0, 1])


def default_eps_grid() -> np.ndarray:
    return np.logspace(-5.0, 15.0, 1000)


def greedy_tour(points: np.ndarray) -> np.ndarray:
    """Deterministic nearest-neighbour tour starting at index 0."""
    n = len(points)
    dist = squareform(pdist(points))
    np.fill_diagonal(dist, np.inf)
    tour = np.empty(n, dtype=int)
    tour[0] = 0
    visited = np.zeros(n, dtype=bool)
    visited[0] = True
    for step in range(1, n):
        row = dist[tour[step - 1]].copy()
        row[visited] = np.inf
        nxt = int(np.argmin(row))
        tour[step] = nxt
        visited[nxt] = True
    return tour


def ic(design, eps_grid: np.ndarray | None = None) -> FeatureVector:
    """Information content of slope symbols along a greedy sample tour."""
    if design.values is None:
        raise ValueError("design must carry objective values")
    if design.n < 10:
        raise ValueError(f"need at least 10 observations, got {design.n}")
    if eps_grid is None:
        eps_grid = default_eps_grid()
    tour = greedy_tour(design.points)
    X, y = design.points[tour], design.values[tour]
    steps = np.linalg.norm(np.diff(X, axis=0), axis=1)
    steps[steps == 0] = np.finfo(float).tiny
    delta = np.diff(y) / steps

    h = np.empty(len(eps_grid))
    n_pairs = len(delta) - 1
    for e, eps in enumerate(eps_grid):
        psi = np.sign(delta) * (np.abs(delta) > eps)
        codes = 3 * (psi[:-1] + 1) + (psi[1:] + 1)
        counts = np.bincount(codes.astype(int), minlength=9)
        probs = counts[[1, 2, 3, 5, 6, 7]] / n_pairs  # off-diagonal pairs only
        probs = probs[probs > 0]
        h[e] = float(-np.sum(probs * np.log(probs) / np.log(6.0)))

    h_max = float(max(h.max(), 0.0))
    eps_max = float(eps_grid[int(np.argmax(h))])
    below = np.where(h < IC_SETTLING_THRESHOLD)[0]
    eps_s = float(np.log10(eps_grid[below[0]])) if len(below) else np.nan
    return FeatureVector(IC_NAMES, np.array([h_max, eps_s, eps_max]), design.n)


def cm_angle(design, blocks_per_dim: int = 3) -> FeatureVector:
    """Angles between cell-center-to-best and cell-center-to-worst vectors.

    Cells are kept sparse: only occupied cells are materialized, so large
    dimensions with mostly empty grids stay cheap.
    """
    if design.values is None:
        raise ValueError("design must carry objective values")
    if blocks_per_dim < 2:
        raise ValueError("blocks_per_dim must be at least 2")
    X, y = design.points, design.values
    domain = design.domain
    cell_width = domain.width / blocks_per_dim
    idx = np.floor((X - domain.lower) / cell_width).astype(int)
    idx = np.clip(idx, 0, blocks_per_dim - 1)

    cells: dict = {}
    for i, key in enumerate(map(tuple, idx)):
        cells.setdefault(key, []).append(i)

    diag = float(np.linalg.norm(cell_width))
    angles, d_best, d_worst = [], [], []
    for key, members in cells.items():
        if len(members) < 2:
            continue
        members = np.array(members)
        center = domain.lower + (np.array(key) + 0.5) * cell_width
        best = members[int(np.argmin(y[members]))]
        worst = members[int(np.argmax(y[members]))]
        v_best = X[best] - center
        v_worst = X[worst] - center
        nb, nw = np.linalg.norm(v_best), np.linalg.norm(v_worst)
        if nb > 0 and nw > 0:
            cos = np.clip(v_best @ v_worst / (nb * nw), -1.0, 1.0)
            angles.append(float(np.degrees(np.arccos(cos))))
        else:
            angles.append(np.nan)
        d_best.append(nb / diag)
        d_worst.append(nw / diag)

    frac = len(cells) / float(blocks_per_dim) ** design.dim
    values = np.array([
        _mean_or_nan(angles), _sd_or_nan(angles),
        _mean_or_nan(d_best), _sd_or_nan(d_best),
        _mean_or_nan(d_worst), _sd_or_nan(d_worst),
        frac,
    ])
    return FeatureVector(CM_NAMES, values, design.n)


def _mean_or_nan(arr) -> float:
    arr = np.asarray(arr, dtype=float)
    arr = arr[np.isfinite(arr)]
    return float(arr.mean()) if len(arr) else np.nan


def _sd_or_nan(arr) -> float:
    arr = np.asarray(arr, dtype=float)
    arr = arr[np.isfinite(arr)]
    return float(arr.std(ddof=1)) if len(arr) > 1 else np.nan


def _expl_var(matrix: np.ndarray):
    eig = np.linalg.eigvalsh(matrix)[::-1]
    eig = np.clip(eig, 0.0, None)
    total = eig.sum()
    if total == 0:
        return np.nan, np.nan
    share = np.cumsum(eig) / total
    k = int(np.searchsorted(share, 0.9 - 1e-12) + 1)
    return k / len(eig), float(eig[0] / total)


def pca(design) -> FeatureVector:
    """Principal-component summaries of X and [X | y], covariance and correlation."""
    if design.values is None:
        raise ValueError("design must carry objective values")
    X, y = design.points, design.values
    n, d = X.shape
    if n <= d:
        raise ValueError(f"need more observations than dimensions ({n} <= {d})")
    init = np.column_stack([X, y])

    degenerate = False
    values = []
    pc1 = []
    for data in (X, init):
        cov = np.atleast_2d(np.cov(data.T))
        ev_cov, pc1_cov = _expl_var(cov)
        stds = np.std(data, axis=0, ddof=1)
        keep = stds > 0
        if not np.all(keep):
            degenerate = True
        if keep.sum() >= 1:
            cor = np.atleast_2d(np.corrcoef(data[:, keep].T))
            ev_cor, pc1_cor = _expl_var(cor)
        else:
            ev_cor, pc1_cor = np.nan, np.nan
        values += [ev_cov, ev_cor]
        pc1 += [pc1_cov, pc1_cor]
    all_values = np.array(values + pc1 + [1.0 if degenerate else 0.0])
    return FeatureVector(PCA_NAMES, all_values, design.n)
