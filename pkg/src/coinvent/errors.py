"""Exception types shared across the coinvent package."""


class CoinventError(Exception):
    """Base class for all coinvent errors."""


class ConfigError(CoinventError):
    """Invalid or incomplete configuration."""


class MalformedRow(CoinventError):
    """A data row could not be parsed or violates a record invariant."""

    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class DuplicateId(CoinventError):
    """A primary key appeared more than once in an input file."""


class UnknownNode(CoinventError):
    """A requested node is not present in the graph."""


class EmptyGraph(CoinventError):
    """Operation requires a graph with at least one node / nonzero weight."""


class NodeSetMismatch(CoinventError):
    """Two partitions do not cover the same node set."""


class UnpartitionedNode(CoinventError):
    """An LCC inventor has no community assignment."""


class ConvergenceError(CoinventError):
    """An iterative algorithm hit its iteration cap without stabilizing."""


class EmptySample(CoinventError):
    """Statistic requested on an empty sample."""


class DegenerateSample(CoinventError):
    """Both samples have zero variance; the t statistic is undefined."""


class SampleTooSmall(CoinventError):
    """Sample smaller than the requested subsample size."""


class InsufficientData(CoinventError):
    """Not enough populated histogram bins to fit a distribution."""


class FitDiverged(CoinventError):
    """Nonlinear least squares failed to converge."""


class MissingBins(CoinventError):
    """Histogram lacks the bins required by a peak adjustment."""


class InfeasibleConfig(CoinventError):
    """Synthetic-cohort configuration cannot be realized."""
