"""Synthetic suite of BBOB-style test functions with seeded instance transforms.

Each function is defined in a canonical frame with its optimum at the origin.
An instance applies z = R (x - x_shift) plus an additive objective offset,
where R is a seeded orthonormal rotation and x_shift a seeded interior shift.
Instance id 0 is reserved for the untransformed base function.  These are
deliberately simplified stand-ins for the official benchmark instances; real
archive data enters through the ingest module instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedFunctionError
from .sampling import BoxDomain, make_rng

DEFAULT_DIMS = (2, 3, 5, 10)
DEFAULT_IIDS = (1, 2, 3, 4, 5)


@dataclass(frozen=True, order=True)
class ProblemId:
    fid: int
    dim: int
    iid: int

    def __post_init__(self):
        if self.fid < 1 or self.dim < 1 or self.iid < 0:
            raise ValueError(f"invalid problem id {self}")


def _sphere(z):
    return float(np.sum(z * z))


def _rastrigin(z):
    d = len(z)
    return float(10.0 * (d - np.sum(np.cos(2.0 * np.pi * z))) + np.sum(z * z))


def _bueche_rastrigin(z):
    # axis-wise conditioning on top of the rastrigin shape
    d = len(z)
    s = 10.0 ** (0.5 * np.arange(d) / max(d - 1, 1))
    w = s * z
    return float(10.0 * (d - np.sum(np.cos(2.0 * np.pi * w))) + np.sum(w * w))


def _ellipsoid(z):
    d = len(z)
    c = 10.0 ** (6.0 * np.arange(d) / max(d - 1, 1))
    return float(np.sum(c * z * z))


def _rosenbrock(z):
    w = z + 1.0  # canonical optimum moved to the origin
    return float(np.sum(100.0 * (w[:-1] ** 2 - w[1:]) ** 2 + (w[:-1] - 1.0) ** 2))


def _different_powers(z):
    d = len(z)
    e = 2.0 + 4.0 * np.arange(d) / max(d - 1, 1)
    return float(np.sum(np.abs(z) ** e))


def _schaffers_f7(z):
    if len(z) == 1:
        return float(np.abs(z[0]))
    s = np.sqrt(z[:-1] ** 2 + z[1:] ** 2)
    t = np.sqrt(s) * (1.0 + np.sin(50.0 * s ** 0.2) ** 2)
    return float((np.mean(t)) ** 2)


_SCHWEFEL_W0 = 420.9687462275036


def _schwefel(z):
    # w*sin(sqrt(|w|)) attains its max over [-500, 500] at w0; the quadratic
    # boundary penalty keeps shifted evaluations from escaping that window
    w = 100.0 * z + _SCHWEFEL_W0
    terms = (_SCHWEFEL_W0 * np.sin(np.sqrt(_SCHWEFEL_W0))
             - w * np.sin(np.sqrt(np.abs(w))))
    penalty = 100.0 * np.sum(np.maximum(0.0, np.abs(w) - 500.0) ** 2)
    return float(np.sum(terms) + penalty)


def _lunacek(z):
    d = len(z)
    mu0 = 2.5
    s = 1.0 - 1.0 / (2.0 * np.sqrt(d + 20.0) - 8.2)
    mu1 = -np.sqrt((mu0 ** 2 - 1.0) / s)
    w = z + mu0
    sphere0 = np.sum((w - mu0) ** 2)
    sphere1 = d + s * np.sum((w - mu1) ** 2)
    return float(min(sphere0, sphere1)
                 + 10.0 * (d - np.sum(np.cos(2.0 * np.pi * (w - mu0)))))


_BASE_FUNCTIONS = {
    1: ("Sphere", _sphere, False),
    3: ("Rastrigin", _rastrigin, True),
    4: ("Bueche-Rastrigin", _bueche_rastrigin, False),
    5: ("Linear Slope", None, False),  # handled separately (boundary optimum)
    8: ("Rosenbrock", _rosenbrock, True),
    10: ("Ellipsoidal", _ellipsoid, True),
    14: ("Different Powers", _different_powers, True),
    17: ("Schaffers F7", _schaffers_f7, True),
    20: ("Schwefel", _schwefel, False),
    24: ("Lunacek bi-Rastrigin", _lunacek, True),
}

SUPPORTED_FIDS = tuple(sorted(_BASE_FUNCTIONS))

# fids whose canonical shape is unimodal; useful for constructing scenarios
UNIMODAL_FIDS = (1, 5, 8, 10, 14)
MULTIMODAL_FIDS = (3, 4, 17, 20, 24)


@dataclass(frozen=True)
class ProblemInstance:
    id: ProblemId
    name: str
    domain: BoxDomain
    x_opt: np.ndarray
    y_opt: float
    _objective: object = field(repr=False)

    def objective(self, x) -> float:
        return self._objective(np.asarray(x, dtype=float))

    def __call__(self, x) -> float:
        return self.objective(x)


def _rotation(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Orthonormal matrix from QR of a seeded Gaussian, sign-normalized."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def make_instance(fid: int, dim: int, iid: int, seed_scheme: int = 0) -> ProblemInstance:
    """Deterministic instance of a suite function.

    The shift, rotation and objective offset derive from (fid, dim, iid) and
    the seed scheme only.  iid 0 returns the untransformed base function.
    """
    if fid not in _BASE_FUNCTIONS:
        raise UnsupportedFunctionError(
            f"fid {fid} not in supported set {SUPPORTED_FIDS}")
    name, base, rotatable = _BASE_FUNCTIONS[fid]
    domain = BoxDomain.default(dim)
    pid = ProblemId(fid, dim, iid)
    rng = make_rng([seed_scheme, fid, dim, iid])

    if fid == 5:
        # linear slope: optimum sits on a corner of the box
        signs = np.ones(dim) if iid == 0 else np.where(rng.random(dim) < 0.5, -1.0, 1.0)
        coeffs = (1.0 + np.arange(dim)) * signs
        x_opt = np.where(coeffs > 0, domain.upper, domain.lower)
        y_off = 0.0 if iid == 0 else float(np.round(rng.uniform(-100.0, 100.0), 2))

        def objective(x, _c=coeffs, _xo=x_opt, _b=y_off):
            return float(np.sum(_c * (_xo - np.asarray(x, dtype=float))) + _b)

        y_opt = objective(x_opt)
        return ProblemInstance(pid, name, domain, x_opt, y_opt, objective)

    if iid == 0:
        shift = np.zeros(dim)
        rot = np.eye(dim)
        y_off = 0.0
    else:
        shift = rng.uniform(0.8 * domain.lower, 0.8 * domain.upper)
        rot = _rotation(rng, dim) if rotatable else np.eye(dim)
        y_off = float(np.round(rng.uniform(-100.0, 100.0), 2))

    def objective(x, _f=base, _R=rot, _s=shift, _b=y_off):
        z = _R @ (np.asarray(x, dtype=float) - _s)
        return _f(z) + _b

    x_opt = shift
    y_opt = objective(x_opt)
    return ProblemInstance(pid, name, domain, x_opt, y_opt, objective)


def suite(dims, fids, iids, seed_scheme: int = 0) -> list[ProblemInstance]:
    """Cartesian product of the requested ids, ordered by (dim, fid, iid)."""
    if not dims or not fids or not iids:
        raise ValueError("dims, fids and iids must all be non-empty")
    out = []
    for dim in sorted(dims):
        for fid in sorted(fids):
            for iid in sorted(iids):
                out.append(make_instance(fid, dim, iid, seed_scheme))
    return out


def write_manifest(instances, path) -> None:
    """Suite manifest CSV: `fid,dim,iid,y_opt`."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fid", "dim", "iid", "y_opt"])
        for inst in instances:
            writer.writerow([inst.id.fid, inst.id.dim, inst.id.iid,
                             format(inst.y_opt, ".17g")])
