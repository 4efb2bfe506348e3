"""Parsing and validation of solver run logs.

The canonical interchange format is a CSV with header
`solver,fid,dim,iid,run,fe_count,best_gap`; one row per run.  Archive data
from external benchmarking platforms must be converted to this format before
ingestion (a converter for their native log formats is out of scope).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

from .errors import DuplicateRecordError, ParseError

CSV_HEADER = ["solver", "fid", "dim", "iid", "run", "fe_count", "best_gap"]


@dataclass(frozen=True)
class RunRecord:
    solver: str
    fid: int
    dim: int
    iid: int
    run: int
    fe_count: int
    best_gap: float
    budget_exhausted: bool = False

    def __post_init__(self):
        if self.fe_count < 1:
            raise ValueError(f"fe_count must be >= 1, got {self.fe_count}")
        if self.best_gap < 0:
            raise ValueError(f"best_gap must be >= 0, got {self.best_gap}")


def parse_runs_csv(path) -> list[RunRecord]:
    """Strictly-typed parse; failures carry the offending line number."""
    records = []
    seen = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file, expected header "
                             + ",".join(CSV_HEADER)) from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise ParseError(f"bad header {header!r}, expected {CSV_HEADER}",
                             line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise ParseError(f"expected {len(CSV_HEADER)} fields, got "
                                 f"{len(row)}", line=lineno)
            try:
                rec = RunRecord(
                    solver=row[0].strip(),
                    fid=int(row[1]), dim=int(row[2]), iid=int(row[3]),
                    run=int(row[4]), fe_count=int(row[5]),
                    best_gap=float(row[6]),
                )
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            key = (rec.solver, rec.fid, rec.dim, rec.iid, rec.run)
            if key in seen:
                raise DuplicateRecordError(
                    f"duplicate record {key}, first seen on line {seen[key]}",
                    line=lineno)
            seen[key] = lineno
            records.append(rec)
    return records


def serialize_runs_csv(records, path) -> None:
    """Inverse of parse_runs_csv; reals carry 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow([rec.solver, rec.fid, rec.dim, rec.iid, rec.run,
                             rec.fe_count, format(rec.best_gap, ".17g")])


@dataclass
class SanityIssue:
    solver: str
    issue_kind: str  # missing_instance | duplicate_run | bad_fe_count
    fid: int
    dim: int
    iid: int

    def as_dict(self) -> dict:
        return {"solver": self.solver, "issue_kind": self.issue_kind,
                "fid": self.fid, "dim": self.dim, "iid": self.iid}


@dataclass
class SanityReport:
    issues: list = field(default_factory=list)
    valid_solvers: list = field(default_factory=list)
    invalid_solvers: list = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"valid solvers: {len(self.valid_solvers)}",
                 f"invalid solvers: {len(self.invalid_solvers)}"]
        for issue in self.issues:
            lines.append(f"{issue.solver}: {issue.issue_kind} at "
                         f"fid={issue.fid} dim={issue.dim} iid={issue.iid}")
        return "\n".join(lines)

    def to_jsonl(self, path) -> None:
        with open(path, "w") as fh:
            for issue in self.issues:
                fh.write(json.dumps(issue.as_dict()) + "\n")


def sanity_check(records, required_iids=(1, 2, 3, 4, 5)) -> SanityReport:
    """Coverage and consistency report; a solver is valid iff it covers every
    required instance id for each (fid, dim) it appears in."""
    required = set(required_iids)
    report = SanityReport()
    by_solver: dict = {}
    run_keys: dict = {}
    for rec in records:
        by_solver.setdefault(rec.solver, {}).setdefault(
            (rec.fid, rec.dim), set()).add(rec.iid)
        key = (rec.solver, rec.fid, rec.dim, rec.iid, rec.run)
        run_keys[key] = run_keys.get(key, 0) + 1
        if rec.fe_count < 1:
            report.issues.append(SanityIssue(
                rec.solver, "bad_fe_count", rec.fid, rec.dim, rec.iid))

    for (solver, fid, dim, iid, _run), count in sorted(run_keys.items()):
        if count > 1:
            report.issues.append(SanityIssue(
                solver, "duplicate_run", fid, dim, iid))

    for solver in sorted(by_solver):
        valid = True
        for (fid, dim), iids in sorted(by_solver[solver].items()):
            for iid in sorted(required - iids):
                report.issues.append(SanityIssue(
                    solver, "missing_instance", fid, dim, iid))
                valid = False
        (report.valid_solvers if valid else report.invalid_solvers).append(solver)
    return report


def first_run_only(records) -> list[RunRecord]:
    """Keep the record with the smallest run index per (solver, fid, dim, iid)."""
    best: dict = {}
    for rec in records:
        key = (rec.solver, rec.fid, rec.dim, rec.iid)
        if key not in best or rec.run < best[key].run:
            best[key] = rec
    return [best[k] for k in sorted(best)]
