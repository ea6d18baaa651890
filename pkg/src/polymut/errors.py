"""Shared exception hierarchy.

Domain errors (bad mathematical input, failed preconditions) derive from
DomainError so the CLI can map them to exit code 1 with a structured JSON
error object; genuine usage errors are left to argparse (exit code 2).
"""


class DomainError(ValueError):
    """A mathematically invalid input or an unsatisfiable precondition."""
