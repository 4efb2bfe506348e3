"""Shared fixtures: run-record tables and small evaluated designs."""

import numpy as np
import pytest

from elaselect.ingest import RunRecord
from elaselect.sampling import BoxDomain, SampleDesign, make_rng

# The 20 first-instance runs of the Bueche-Rastrigin function (fid 4) for the
# single best solver, plus per-dimension runs of the virtual best solver used
# as the relERT normalizer.  (dim, iid, best_gap, fe_count)
FID4_RUNS = [
    (2, 1, 8.44e-03, 215),
    (2, 2, 6.91e-03, 545),
    (2, 3, 8.84e-05, 440),
    (2, 4, 5.44e-03, 248),
    (2, 5, 4.29e-03, 578),
    (3, 1, 4.48e-03, 976690),
    (3, 2, 9.99e-01, 570925),
    (3, 3, 9.62e-04, 781),
    (3, 4, 1.72e-03, 1373),
    (3, 5, 8.24e-03, 1369),
    (5, 1, 6.52e-03, 2048),
    (5, 2, 8.09e-04, 2248),
    (5, 3, 1.00e+00, 91882),
    (5, 4, 2.16e-03, 2382),
    (5, 5, 8.54e-03, 2228),
    (10, 1, 3.75e-03, 4253),
    (10, 2, 6.72e-03, 4495),
    (10, 3, 2.58e-03, 4632),
    (10, 4, 2.79e-03, 4032),
    (10, 5, 5.43e-03, 4021),
]

# per-dimension ERT of the virtual best solver on fid 4
FID4_VBS_ERT = {2: 98.8, 3: 219.6, 5: 486.2, 10: 1067.8}

FID4_EXPECTED_ERT = {2: 405.2, 3: 387784.5, 5: 25197.0, 10: 4286.6}
FID4_EXPECTED_RELERT = {2: 4.1, 3: 1765.9, 5: 51.8, 10: 4.0}


def fid4_records():
    """Run records reproducing the fid-4 ERT/relERT oracle values."""
    records = [
        RunRecord("hcma", 4, dim, iid, 1, fe, gap)
        for dim, iid, gap, fe in FID4_RUNS
    ]
    for dim, vbs_ert in FID4_VBS_ERT.items():
        total = int(round(5 * vbs_ert))
        base, rem = divmod(total, 5)
        for iid in range(1, 6):
            fe = base + (1 if iid <= rem else 0)
            records.append(RunRecord("vbs", 4, dim, iid, 1, fe, 1e-8))
    return records


@pytest.fixture
def fid4_table_records():
    return fid4_records()


def random_design(seed, n=40, dim=2, f=None):
    """A seeded uniform design over the default box, evaluated with f.

    f defaults to a mildly multimodal smooth function so that every feature
    set has non-degenerate input.
    """
    rng = make_rng(seed)
    domain = BoxDomain.default(dim)
    points = domain.lower + rng.random((n, dim)) * domain.width
    if f is None:
        def f(x):
            return float(np.sum(x ** 2) + 3.0 * np.sum(np.sin(2.0 * x)))
    values = np.array([f(p) for p in points])
    return SampleDesign(points=points, domain=domain, values=values,
                        evals_consumed=n)


def shifted_copy(design, offset):
    """The same sample translated by a constant vector, domain included."""
    offset = np.asarray(offset, dtype=float)
    domain = BoxDomain(design.dim, design.domain.lower + offset,
                       design.domain.upper + offset)
    return SampleDesign(points=design.points + offset, domain=domain,
                        values=design.values,
                        evals_consumed=design.evals_consumed)


def scaled_copy(design, factor):
    """The same sample with x -> factor * x, domain included (factor > 0)."""
    domain = BoxDomain(design.dim, design.domain.lower * factor,
                       design.domain.upper * factor)
    return SampleDesign(points=design.points * factor, domain=domain,
                        values=design.values,
                        evals_consumed=design.evals_consumed)


def with_values(design, values):
    return SampleDesign(points=design.points, domain=design.domain,
                        values=np.asarray(values, dtype=float),
                        evals_consumed=design.evals_consumed)
