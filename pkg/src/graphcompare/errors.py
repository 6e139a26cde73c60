"""Exception hierarchy shared across the package.

The CLI maps these onto stable exit codes: parse failures are exit 1,
graph invariant violations exit 2, an empty validated indicator set
exit 3 and infeasible run configurations exit 4.
"""


class GraphCompareError(Exception):
    """Base class for all errors raised by this package."""


# -- graph ingestion ---------------------------------------------------------

class ParseError(GraphCompareError):
    """Input stream is not well-formed in the declared file format."""


class GraphInvariantError(GraphCompareError):
    """A structurally parseable graph violates a construction invariant."""


class DuplicateIdError(GraphInvariantError):
    """The same identifier is used twice (node/node, edge/edge or node/edge)."""


class DanglingEdgeError(GraphInvariantError):
    """An edge references a source or target node that does not exist."""


class LabelHeterogeneityError(GraphInvariantError):
    """Two edges share a label but differ in endpoint labels."""


# -- schema / instance -------------------------------------------------------

class InvalidInstanceError(GraphCompareError):
    """The graph is not a valid instance of the given graph type."""


class UnknownNodeTypeError(GraphCompareError):
    """A node type name is not declared in the graph type."""


# -- indicator evaluation & validation ---------------------------------------

class TypeMismatchError(GraphCompareError):
    """A non-numeric value was fed to a numeric operator."""


class EmptyCollectionError(GraphCompareError):
    """Percentile scaling was asked to rank against an empty collection."""


class InsufficientOverlapError(GraphCompareError):
    """Fewer than two rows where both columns are non-null."""


class NoIndicatorsSurviveError(GraphCompareError):
    """Validation rejected every candidate indicator."""


# -- optimization ------------------------------------------------------------

class ConstraintViolationError(GraphCompareError):
    """A partition or clustering breaks one of the feasibility constraints."""


class DegenerateGraphError(GraphCompareError):
    """All matrix rows are identical; no neighbour structure exists."""


class ZeroMeanError(GraphCompareError):
    """Coefficient of variation is undefined for a zero-mean column."""


class TooShortError(GraphCompareError):
    """Elbow detection needs at least two scores."""


class TooFewIndicatorsError(GraphCompareError):
    """Indicator partitioning needs at least two indicators."""


class SearchSpaceTooLargeError(GraphCompareError):
    """Exhaustive enumeration refused beyond the configured indicator limit."""


class InfeasibleKError(GraphCompareError):
    """Not enough rows for K clusters of at least two members each."""


# -- file formats & generators ------------------------------------------------

class InconsistentSpecError(GraphCompareError):
    """Synthetic graph spec references undeclared types or is malformed."""


class VersionMismatchError(GraphCompareError):
    """A data file declares an unsupported format version."""
