"""Exception hierarchy shared by the solvers, the optimizer and the CLI."""


class RiocError(Exception):
    """Base class for all rioc errors."""
    pass


class ValidationError(RiocError):
    """Raised when inputs are inconsistent (dimensions, grids, NaN, missing files)."""
    pass


class SolverError(RiocError):
    """Raised when a numerical procedure cannot produce a result."""
    pass


class LineSearchError(SolverError):
    """Raised when Armijo backtracking finds no descent."""
    pass
