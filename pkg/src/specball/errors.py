"""Exception hierarchy shared by all specball modules."""

from __future__ import annotations


class SpecballError(Exception):
    """Base class; the CLI turns these into machine-readable error objects."""

    kind = "specball_error"

    def to_dict(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class RootFindingError(SpecballError):
    kind = "root_finding"


class ClusteringError(SpecballError):
    kind = "eigenvalue_clustering"


class MatrixFormError(SpecballError):
    """Raised when a matrix is not in the shape an operation requires."""

    kind = "matrix_form"


class SplittingError(SpecballError):
    kind = "splitting"


class DomainError(SpecballError):
    """Precondition on a point, radius or parameter range violated."""

    kind = "domain"


class SolverError(SpecballError):
    kind = "solver"


class UsageError(SpecballError):
    """Malformed command line."""

    kind = "usage"
