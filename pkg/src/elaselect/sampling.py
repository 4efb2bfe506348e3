"""Space-filling initial designs over box-constrained decision spaces.

Designs are generated with a seeded counter-based generator (Philox) so the
same (n, domain, seed) always reproduces the same matrix, independent of
platform or call order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .errors import EvaluationError


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator used everywhere reproducibility matters."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box [lower, upper]^d."""

    dim: int
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if lower.shape != (self.dim,) or upper.shape != (self.dim,):
            raise ValueError("lower/upper must be vectors of length dim")
        if not np.all(lower < upper):
            raise ValueError("degenerate domain: need lower[k] < upper[k] for all k")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def default(cls, dim: int) -> "BoxDomain":
        """The conventional [-5, +5]^d search space."""
        return cls(dim, np.full(dim, -5.0), np.full(dim, 5.0))

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.all((points >= self.lower) & (points <= self.upper), axis=1)


@dataclass(frozen=True)
class SampleDesign:
    """An n x d matrix of decision-space points, optionally with objective values."""

    points: np.ndarray
    domain: BoxDomain
    values: np.ndarray | None = None
    evals_consumed: int = 0

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self.domain.dim:
            raise ValueError("points must be an n x d matrix matching the domain")
        if not np.all(self.domain.contains(points)):
            raise ValueError("design contains points outside the domain")
        object.__setattr__(self, "points", points)
        if self.values is not None:
            values = np.asarray(self.values, dtype=float)
            if values.shape != (points.shape[0],):
                raise ValueError("values must have one entry per point")
            object.__setattr__(self, "values", values)
        if self.evals_consumed < 0:
            raise ValueError("evals_consumed must be non-negative")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def to_csv(self, path) -> None:
        """Write `x1,...,xd,y`; the y column is omitted for unevaluated designs."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = [f"x{k + 1}" for k in range(self.dim)]
            if self.values is not None:
                header.append("y")
            writer.writerow(header)
            for i in range(self.n):
                row = [format(v, ".17g") for v in self.points[i]]
                if self.values is not None:
                    row.append(format(self.values[i], ".17g"))
                writer.writerow(row)

    @classmethod
    def from_csv(cls, path, domain: BoxDomain) -> "SampleDesign":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            has_y = header[-1] == "y"
            rows = [[float(v) for v in row] for row in reader if row]
        data = np.array(rows, dtype=float)
        if has_y:
            points, values = data[:, :-1], data[:, -1]
        else:
            points, values = data, None
        return cls(points=points, domain=domain, values=values,
                   evals_consumed=len(points))


def _min_sq_dist_rows(points: np.ndarray, i: int) -> np.ndarray:
    d = np.sum((points - points[i]) ** 2, axis=1)
    d[i] = np.inf
    return d


def improved_lhd(n: int, domain: BoxDomain, seed, iters: int = 1000) -> SampleDesign:
    """Maximin-improved Latin hypercube design.

    Starts from a seeded random LHS (one point per axis bin) and performs
    `iters` random within-column row swaps, accepting a swap iff it strictly
    increases the minimum pairwise Euclidean distance.  Swapping rows inside
    one column preserves the Latin property.
    """
    if n < 2:
        raise ValueError(f"need n >= 2 sample points, got {n}")
    rng = make_rng(seed)
    d = domain.dim

    # one point per axis bin, uniform position inside the bin
    bins = np.array([rng.permutation(n) for _ in range(d)], dtype=float).T
    offsets = rng.random((n, d))
    unit = (bins + offsets) / n
    points = domain.lower + unit * domain.width

    if iters > 0 and n >= 2:
        dist = np.full((n, n), np.inf)
        for i in range(n):
            row = _min_sq_dist_rows(points, i)
            dist[i, :] = row
        cur_min = dist.min()
        for _ in range(iters):
            col = int(rng.integers(d))
            i, j = (int(v) for v in rng.choice(n, size=2, replace=False))
            points[i, col], points[j, col] = points[j, col], points[i, col]
            row_i = _min_sq_dist_rows(points, i)
            row_j = _min_sq_dist_rows(points, j)
            old_i = dist[i, :].copy()
            old_j = dist[j, :].copy()
            dist[i, :] = row_i
            dist[:, i] = row_i
            dist[j, :] = row_j
            dist[:, j] = row_j
            dist[i, j] = dist[j, i] = row_i[j]
            dist[i, i] = dist[j, j] = np.inf
            new_min = dist.min()
            if new_min > cur_min:
                cur_min = new_min
            else:
                points[i, col], points[j, col] = points[j, col], points[i, col]
                dist[i, :] = old_i
                dist[:, i] = old_i
                dist[j, :] = old_j
                dist[:, j] = old_j
                dist[i, i] = dist[j, j] = np.inf

    return SampleDesign(points=points, domain=domain, values=None,
                        evals_consumed=n)


def evaluate_design(design: SampleDesign, f) -> SampleDesign:
    """Attach objective values; each point costs exactly one evaluation."""
    if design.values is not None:
        raise ValueError("design already carries objective values")
    values = np.empty(design.n)
    for i in range(design.n):
        y = float(f(design.points[i]))
        if not np.isfinite(y):
            raise EvaluationError(i, design.points[i], y)
        values[i] = y
    return replace(design, values=values)
