"""Exception types shared across the package."""

from __future__ import annotations


class PlanError(Exception):
    """Base error for plan manipulation failures."""


class UnknownIdError(PlanError):
    """A referenced id does not exist in the plan."""


class CycleError(PlanError):
    """The dependency graph contains a directed cycle."""

    def __init__(self, path: list[str]):
        super().__init__("cycle: " + " -> ".join(path))
        self.path = list(path)


class LedgerError(PlanError):
    """A progress event could not be appended to the ledger."""


class PlanFileError(PlanError):
    """A plan document could not be parsed or failed validation.

    ``location`` is a dotted path into the document ("allocations[3].milestone");
    ``report`` carries validation diagnostics when structural parsing succeeded
    but the plan content is invalid.
    """

    def __init__(self, message: str, location: str | None = None, report=None):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
        self.report = report or []
