"""Landscape feature computation and per-function aggregation.

Nine feature sets are implemented, all computable from the initial design
alone (no extra objective evaluations): basic, y-distribution, levelset,
meta-model, cell-mapping angle, dispersion, information content, nearest
better clustering and principal components.
"""

from __future__ import annotations

import numpy as np

from ..errors import SchemaMismatchError
from .classical import (DISTR_NAMES, LEVEL_NAMES, META_NAMES,
                        ela_distribution, ela_levelset, ela_meta)
from .landscape import (BASIC_NAMES, CM_NAMES, DISP_NAMES, IC_NAMES,
                        NBC_NAMES, PCA_NAMES, basic, cm_angle, disp, ic,
                        nbc, pca)
from .vector import FeatureMatrix, FeatureVector

# fixed computation order; the concatenated name list is the feature schema
FEATURE_SETS = (
    ("basic", basic, BASIC_NAMES),
    ("ela_distr", ela_distribution, DISTR_NAMES),
    ("ela_level", ela_levelset, LEVEL_NAMES),
    ("ela_meta", ela_meta, META_NAMES),
    ("cm_angle", cm_angle, CM_NAMES),
    ("disp", disp, DISP_NAMES),
    ("ic", ic, IC_NAMES),
    ("nbc", nbc, NBC_NAMES),
    ("pca", pca, PCA_NAMES),
)

SCHEMA_VERSION = 1


def schema(sets=None) -> tuple:
    """The fixed feature-name schema, including per-set status flags."""
    names = []
    for set_name, _, set_names in FEATURE_SETS:
        if sets is not None and set_name not in sets:
            continue
        names.extend(set_names)
        names.append(f"{set_name}.status")
    return tuple(names)


def compute_all(design, sets=None) -> FeatureVector:
    """All feature sets in schema order; total cost is the design size.

    A failing set degrades to NaN values with its `<set>.status` flag set to 1
    instead of aborting the whole vector.
    """
    names = []
    values = []
    for set_name, fn, set_names in FEATURE_SETS:
        if sets is not None and set_name not in sets:
            continue
        names.extend(set_names)
        names.append(f"{set_name}.status")
        try:
            fv = fn(design)
            if fv.names != set_names:
                raise SchemaMismatchError(f"{set_name} produced a drifting schema")
            values.extend(fv.values.tolist())
            values.append(0.0)
        except SchemaMismatchError:
            raise
        except Exception:
            values.extend([np.nan] * len(set_names))
            values.append(1.0)
    return FeatureVector(tuple(names), np.array(values), design.n)


def aggregate_median(matrix: FeatureMatrix) -> FeatureMatrix:
    """Median over instance ids per (fid, dim); NaN-ignoring per feature."""
    if matrix.key_fields != ("fid", "dim", "iid"):
        raise ValueError("expected a per-instance matrix keyed by (fid, dim, iid)")
    groups: dict = {}
    for key, row in zip(matrix.keys, matrix.values):
        groups.setdefault((key[0], key[1]), []).append(row)
    keys = sorted(groups)
    data = np.array([_nanmedian_rows(groups[k]) for k in keys])
    return FeatureMatrix(("fid", "dim"), keys, matrix.names, data)


def _nanmedian_rows(rows) -> np.ndarray:
    stacked = np.vstack(rows)
    with np.errstate(all="ignore"):
        out = np.full(stacked.shape[1], np.nan)
        for j in range(stacked.shape[1]):
            col = stacked[:, j]
            finite = col[~np.isnan(col)]
            if len(finite):
                out[j] = np.median(finite)
    return out


__all__ = [
    "FeatureVector", "FeatureMatrix", "FEATURE_SETS", "SCHEMA_VERSION",
    "schema", "compute_all", "aggregate_median",
    "basic", "ela_distribution", "ela_levelset", "ela_meta",
    "cm_angle", "disp", "ic", "nbc", "pca",
]
