"""Containers for named landscape features and per-problem feature tables."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from ..errors import SchemaMismatchError


@dataclass(frozen=True)
class FeatureVector:
    """Named numeric features plus the evaluation budget they consumed."""

    names: tuple
    values: np.ndarray
    cost_evals: int

    def __post_init__(self):
        names = tuple(self.names)
        values = np.asarray(self.values, dtype=float)
        if len(names) != len(values):
            raise ValueError("names and values must be parallel")
        if len(set(names)) != len(names):
            raise ValueError("feature names must be unique")
        if self.cost_evals < 0:
            raise ValueError("cost_evals must be non-negative")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "values", values)

    def as_dict(self) -> dict:
        return dict(zip(self.names, self.values.tolist()))

    def __getitem__(self, name: str) -> float:
        return float(self.values[self.names.index(name)])

    @staticmethod
    def concat(parts: list["FeatureVector"], cost_evals: int) -> "FeatureVector":
        names = []
        values = []
        for part in parts:
            names.extend(part.names)
            values.extend(part.values.tolist())
        return FeatureVector(tuple(names), np.array(values), cost_evals)


@dataclass
class FeatureMatrix:
    """One FeatureVector per problem key; all rows share one name schema.

    key_fields is ("fid", "dim", "iid") for per-instance tables and
    ("fid", "dim") after aggregation.
    """

    key_fields: tuple
    keys: list
    names: tuple
    values: np.ndarray

    def __post_init__(self):
        self.key_fields = tuple(self.key_fields)
        self.keys = [tuple(k) for k in self.keys]
        self.names = tuple(self.names)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.keys), len(self.names)):
            raise ValueError("values shape must be (len(keys), len(names))")
        if len(set(self.keys)) != len(self.keys):
            raise ValueError("row keys must be unique")

    @classmethod
    def from_rows(cls, key_fields, rows: dict) -> "FeatureMatrix":
        """Build from {key: FeatureVector}; raises on inconsistent schemas."""
        keys = sorted(rows)
        names = None
        data = []
        for key in keys:
            fv = rows[key]
            if names is None:
                names = fv.names
            elif fv.names != names:
                raise SchemaMismatchError(
                    f"row {key} has a different feature schema")
            data.append(fv.values)
        return cls(key_fields, keys, names or (), np.array(data))

    def row(self, key) -> np.ndarray:
        return self.values[self.keys.index(tuple(key))]

    def subset_names(self, mask: np.ndarray) -> "FeatureMatrix":
        mask = np.asarray(mask, dtype=bool)
        names = tuple(n for n, m in zip(self.names, mask) if m)
        return FeatureMatrix(self.key_fields, list(self.keys), names,
                             self.values[:, mask])

    def to_csv(self, path) -> None:
        """Key columns first, then one column per feature; NaN as empty cell."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(list(self.key_fields) + list(self.names))
            for key, row in zip(self.keys, self.values):
                cells = [str(int(k)) for k in key]
                cells += ["" if math.isnan(v) else format(v, ".17g") for v in row]
                writer.writerow(cells)

    @classmethod
    def from_csv(cls, path) -> "FeatureMatrix":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            n_key = 3 if len(header) >= 3 and header[2] == "iid" else 2
            key_fields = tuple(header[:n_key])
            names = tuple(header[n_key:])
            keys, data = [], []
            for row in reader:
                if not row:
                    continue
                keys.append(tuple(int(v) for v in row[:n_key]))
                data.append([float(v) if v != "" else float("nan")
                             for v in row[n_key:]])
        return cls(key_fields, keys, names, np.array(data))
