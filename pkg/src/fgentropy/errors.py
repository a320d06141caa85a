"""Exception hierarchy shared across the workbench.

The split mirrors how failures must be reported at the command line:
usage problems, violated mathematical invariants, and exhausted
precision or resource budgets are distinct exit codes, so they are
distinct exception types here.
"""


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class StructureError(WorkbenchError):
    """Malformed or incompatible arguments (rank mismatch, bad letters,
    a class not drawn from the chain, and so on)."""


class PrecisionError(WorkbenchError):
    """A finite boundary prefix is too shallow for the requested
    operation.  The caller must resample at greater depth."""


class ResourceLimitError(WorkbenchError):
    """An enumeration or exact-computation cap was exceeded.  The
    message names the cap and how to override it."""


class InvariantViolation(WorkbenchError):
    """An internal consistency check failed.  Always a bug or a
    genuinely violated theorem hypothesis, never user error."""


class UsageError(WorkbenchError):
    """Bad configuration at the CLI layer.  Names the offending key."""
