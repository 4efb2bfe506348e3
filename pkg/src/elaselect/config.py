"""Declarative pipeline configuration: one YAML file plus flag overrides."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import yaml

from .errors import DataError
from .problems import DEFAULT_DIMS, DEFAULT_IIDS, SUPPORTED_FIDS


@dataclass
class PipelineConfig:
    """Defaults follow the standard benchmarking setup: 50 x d initial
    designs, precision threshold 1e-2, Top-3 portfolio construction."""

    dims: list = field(default_factory=lambda: list(DEFAULT_DIMS))
    fids: list = field(default_factory=lambda: list(SUPPORTED_FIDS))
    iids: list = field(default_factory=lambda: list(DEFAULT_IIDS))
    runs_csv: str | None = None
    design_mult: int = 50
    epsilon: float = 1e-2
    top_k: int = 3
    learners: list = field(default_factory=lambda: ["rpart", "rf", "knn"])
    paradigms: list = field(default_factory=lambda: ["classification"])
    fs_strategies: list = field(default_factory=lambda: ["none"])
    ga_generations: int = 100
    seed: int = 0
    out_dir: str = "out"

    @classmethod
    def from_yaml(cls, path) -> "PipelineConfig":
        with open(path) as fh:
            raw = yaml.safe_load(fh) or {}
        if not isinstance(raw, dict):
            raise DataError(f"config {path} must be a mapping")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise DataError(f"unknown config keys {sorted(unknown)}; "
                            f"valid keys: {sorted(known)}")
        return cls(**raw)

    def override(self, **kwargs) -> "PipelineConfig":
        """Flag overrides win over the config file; None values are ignored."""
        for key, value in kwargs.items():
            if value is not None:
                setattr(self, key, value)
        return self

    def to_yaml(self, path) -> None:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        with open(path, "w") as fh:
            yaml.safe_dump(data, fh, sort_keys=True)
