"""Landscape-feature based algorithm selection for continuous black-box
optimization: space-filling designs, landscape features, expected-runtime
performance tables and cross-validated selector training."""

from .config import PipelineConfig
from .sampling import BoxDomain, SampleDesign, evaluate_design, improved_lhd
from .problems import ProblemId, ProblemInstance, make_instance, suite
from .ingest import RunRecord, first_run_only, parse_runs_csv, sanity_check
from .performance import (PerformanceTable, Portfolio, build_portfolio, ert,
                          relert_table, sbs, success, vbs)

__version__ = "0.1.0"

__all__ = [
    "PipelineConfig",
    "BoxDomain", "SampleDesign", "evaluate_design", "improved_lhd",
    "ProblemId", "ProblemInstance", "make_instance", "suite",
    "RunRecord", "first_run_only", "parse_runs_csv", "sanity_check",
    "PerformanceTable", "Portfolio", "build_portfolio", "ert",
    "relert_table", "sbs", "success", "vbs",
    "__version__",
]
