"""Exception types shared across the toolkit."""


class ElaSelectError(Exception):
    """Base class for all toolkit errors."""


class EvaluationError(ElaSelectError):
    """An objective function returned a non-finite value."""

    def __init__(self, index, point, value):
        self.index = index
        self.point = point
        self.value = value
        super().__init__(
            f"non-finite objective value {value!r} at sample index {index}"
        )


class UnsupportedFunctionError(ElaSelectError):
    """Requested function id is not part of the synthetic suite."""


class ParseError(ElaSelectError):
    """A run-log file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateRecordError(ParseError):
    """Two run records share the same (solver, fid, dim, iid, run) key."""


class SchemaMismatchError(ElaSelectError):
    """Feature rows do not share the same feature-name schema."""


class EmptyPortfolioError(ElaSelectError):
    """No solver is Top-k in every dimension; carries per-dimension sets."""

    def __init__(self, per_dim_sets):
        self.per_dim_sets = per_dim_sets
        super().__init__(
            "portfolio intersection over dimensions is empty; "
            f"per-dimension set sizes: { {d: len(s) for d, s in per_dim_sets.items()} }"
        )


class AlignmentError(ElaSelectError):
    """Feature rows and performance columns do not cover the same problems."""

    def __init__(self, only_features, only_table):
        self.only_features = sorted(only_features)
        self.only_table = sorted(only_table)
        super().__init__(
            f"misaligned problem keys; only in features: {self.only_features}, "
            f"only in performance table: {self.only_table}"
        )


class DataError(ElaSelectError):
    """Input data violates a pipeline precondition (CLI exit code 2)."""
