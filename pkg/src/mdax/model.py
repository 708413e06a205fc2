"""Plan document model: work breakdown, milestones, allocation matrix, calendar.

The plan is a value object: every type here is an immutable dataclass and all
mutation helpers return a new document with ``version`` bumped by one.
Validation never raises for content problems; it returns :class:`Diagnostic`
lists so callers can show every violation at once.
"""

from __future__ import annotations

import calendar as _stdcal
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from fractions import Fraction
from functools import cached_property
from typing import TYPE_CHECKING

from .errors import UnknownIdError

if TYPE_CHECKING:
    from .schedule import WorkPackageSchedule
    from .tracking import ProgressLedger

WI_KINDS = ("output", "work")
WI_STATES = ("identified", "ready", "scheduled", "done", "removed")
MILESTONE_KINDS = ("output", "state", "commitment")
PERIOD_LENGTHS = ("week", "month")


@dataclass(frozen=True)
class Diagnostic:
    """One rule violation: which item, which rule, human-readable detail."""

    subject: str
    rule: str
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.subject}: {self.rule}"
        return f"{text} {self.detail}" if self.detail else text


@dataclass(frozen=True)
class WorkItem:
    """A node of the work breakdown: an output or a work element.

    Only structural leaves carry ``effort`` (positive integer person-hours);
    internal nodes derive theirs via :func:`rollup_effort`. ``state`` follows
    the item through its life; ``removed`` takes it out of scope without
    deleting history.
    """

    id: str
    name: str
    kind: str = "output"
    parent: str | None = None
    effort: int | None = None
    release: str | None = None
    state: str = "identified"


@dataclass(frozen=True)
class WorkBreakdownStructure:
    """Hierarchical enumeration of all outputs and work elements."""

    items: tuple[WorkItem, ...] = ()
    roots: tuple[str, ...] = ()

    @cached_property
    def by_id(self) -> dict[str, WorkItem]:
        # first occurrence wins; duplicates are reported by validate_wbs
        index: dict[str, WorkItem] = {}
        for item in self.items:
            index.setdefault(item.id, item)
        return index

    @cached_property
    def children(self) -> dict[str, tuple[str, ...]]:
        kids: dict[str, list[str]] = {}
        for item in self.items:
            if item.parent is not None:
                kids.setdefault(item.parent, []).append(item.id)
        return {pid: tuple(ids) for pid, ids in kids.items()}

    def is_leaf(self, item_id: str) -> bool:
        return item_id not in self.children

    def leaf_ids(self, item_id: str) -> list[str]:
        """Structural leaf descendants of ``item_id`` (itself if a leaf)."""
        out: list[str] = []
        stack = [item_id]
        while stack:
            cur = stack.pop()
            kids = self.children.get(cur)
            if kids:
                stack.extend(reversed(kids))
            else:
                out.append(cur)
        return out

    def ancestors(self, item_id: str) -> list[str]:
        out: list[str] = []
        seen = {item_id}
        cur = self.by_id.get(item_id)
        while cur is not None and cur.parent is not None and cur.parent not in seen:
            out.append(cur.parent)
            seen.add(cur.parent)
            cur = self.by_id.get(cur.parent)
        return out


@dataclass(frozen=True)
class Milestone:
    """A project state to be reached; hard milestones carry a fixed date.

    ``kind`` is "output", "state" or "commitment"; commitment milestones are
    promises by an external party and never own allocated effort.
    """

    id: str
    name: str
    kind: str = "state"
    hard_date: date | None = None
    completion_criteria: str = ""
    responsible: str | None = None

    @property
    def is_hard(self) -> bool:
        return self.hard_date is not None


@dataclass(frozen=True)
class DependencyEdge:
    """Finish-to-finish link: successor cannot complete before predecessor."""

    predecessor: str
    successor: str


@dataclass(frozen=True)
class Allocation:
    """One cell of the planning matrix: hours of a work item for a milestone."""

    work_item: str
    milestone: str
    hours: int


def _add_months(d: date, months: int) -> date:
    month0 = d.month - 1 + months
    year = d.year + month0 // 12
    month = month0 % 12 + 1
    day = min(d.day, _stdcal.monthrange(year, month)[1])
    return date(year, month, day)


@dataclass(frozen=True)
class Calendar:
    """Time grid for the schedule: 1-based periods of a week or a month.

    A week period's right edge is its fifth day (Friday for a Monday start);
    a month period's right edge is the day before the next period starts.
    """

    start_date: date
    period_length: str = "week"
    hours_per_fte_period: int = 40
    blackouts: frozenset[int] = frozenset()

    def period_start(self, index: int) -> date:
        if self.period_length == "week":
            return self.start_date + timedelta(days=7 * (index - 1))
        return _add_months(self.start_date, index - 1)

    def period_end(self, index: int) -> date:
        """Right edge of a period; ``index`` 0 maps to the day before start."""
        if index <= 0:
            return self.start_date - timedelta(days=1)
        if self.period_length == "week":
            return self.period_start(index) + timedelta(days=4)
        return self.period_start(index + 1) - timedelta(days=1)

    def containing_period(self, d: date) -> int:
        """Period whose span covers ``d``; 0 when ``d`` precedes the start."""
        if d < self.start_date:
            return 0
        if self.period_length == "week":
            return (d - self.start_date).days // 7 + 1
        months = (d.year - self.start_date.year) * 12 + d.month - self.start_date.month
        index = months + 1
        while self.period_start(index + 1) <= d:
            index += 1
        while index > 1 and self.period_start(index) > d:
            index -= 1
        return index

    def deadline_period(self, d: date) -> int:
        """Latest period whose right edge is on or before ``d`` (0 if none)."""
        index = self.containing_period(d)
        if index >= 1 and self.period_end(index) <= d:
            return index
        return index - 1 if index >= 1 else 0


@dataclass(frozen=True)
class ResourceProfile:
    """Team size and the recurring-overhead share of each period.

    The overhead fraction defaults to meeting hours divided by working hours
    per person per iteration; an explicit override wins. Math is exact
    (fractions), so capacity like 4 x 40 x 0.85 floors to 136, never 135.
    """

    fte: int
    meeting_hours_per_person_per_iteration: int = 0
    hours_per_person_per_iteration: int = 40
    overhead_fraction_override: float | None = None

    def overhead_fraction(self) -> Fraction:
        if self.overhead_fraction_override is not None:
            return Fraction(str(self.overhead_fraction_override))
        if self.hours_per_person_per_iteration <= 0:
            return Fraction(0)
        return Fraction(
            self.meeting_hours_per_person_per_iteration,
            self.hours_per_person_per_iteration,
        )


@dataclass(frozen=True)
class PlanDocument:
    """Aggregate plan value: scope, milestones, matrix, calendar, resources.

    ``buffers`` adds per-milestone slack hours to a work package before
    scheduling; ``parallelism`` caps how many FTE a single package may use in
    one period (defaults to the whole team).
    """

    name: str
    wbs: WorkBreakdownStructure
    milestones: tuple[Milestone, ...]
    edges: tuple[DependencyEdge, ...]
    allocations: tuple[Allocation, ...]
    calendar: Calendar
    resources: ResourceProfile
    releases: dict[str, tuple[str, ...]] = field(default_factory=dict)
    buffers: dict[str, int] = field(default_factory=dict)
    parallelism: dict[str, int] = field(default_factory=dict)
    schedule: WorkPackageSchedule | None = None
    ledger: ProgressLedger | None = None
    version: int = 1

    @cached_property
    def milestone_by_id(self) -> dict[str, Milestone]:
        index: dict[str, Milestone] = {}
        for m in self.milestones:
            index.setdefault(m.id, m)
        return index

    def milestone(self, milestone_id: str) -> Milestone:
        try:
            return self.milestone_by_id[milestone_id]
        except KeyError:
            raise UnknownIdError(f"unknown milestone id {milestone_id!r}") from None

    def work_item(self, item_id: str) -> WorkItem:
        try:
            return self.wbs.by_id[item_id]
        except KeyError:
            raise UnknownIdError(f"unknown work item id {item_id!r}") from None

    def bump(self, **changes) -> PlanDocument:
        """New document with ``changes`` applied and the version incremented."""
        return replace(self, version=self.version + 1, **changes)


# ---------------------------------------------------------------------------
# Work breakdown operations


def validate_wbs(wbs: WorkBreakdownStructure) -> list[Diagnostic]:
    """Check every structural rule of the breakdown; empty report means valid."""
    report: list[Diagnostic] = []
    seen: set[str] = set()
    for item in wbs.items:
        if item.id in seen:
            report.append(Diagnostic(item.id, "duplicate-id", "id appears more than once"))
        seen.add(item.id)
        if item.kind not in WI_KINDS:
            report.append(Diagnostic(item.id, "invalid-kind", f"({item.kind})"))
        if item.state not in WI_STATES:
            report.append(Diagnostic(item.id, "invalid-state", f"({item.state})"))

    for item in wbs.items:
        if item.parent is not None and item.parent not in wbs.by_id:
            report.append(Diagnostic(item.id, "unknown-parent", f"({item.parent})"))

    # parent links must form a forest
    for item in wbs.items:
        hops = 0
        cur = item
        while cur.parent is not None and hops <= len(wbs.items):
            nxt = wbs.by_id.get(cur.parent)
            if nxt is None:
                break
            if nxt.id == item.id:
                report.append(Diagnostic(item.id, "parent-cycle", "parent chain loops"))
                break
            cur = nxt
            hops += 1

    parentless = tuple(i.id for i in wbs.items if i.parent is None)
    if set(wbs.roots) != set(parentless) or len(wbs.roots) != len(set(wbs.roots)):
        report.append(
            Diagnostic(
                ",".join(wbs.roots) or "(empty)",
                "root-mismatch",
                f"roots {list(wbs.roots)} != parentless items {list(parentless)}",
            )
        )

    # work elements may only contain work elements
    for item in wbs.items:
        if item.kind != "work":
            continue
        for child_id in wbs.children.get(item.id, ()):
            child = wbs.by_id[child_id]
            if child.kind == "output":
                report.append(
                    Diagnostic(item.id, "work-contains-output", f"child {child_id} is an output")
                )

    # exactly the leaves carry effort
    for item in wbs.items:
        if wbs.is_leaf(item.id):
            if item.state == "removed":
                continue
            if item.effort is None:
                report.append(Diagnostic(item.id, "missing-effort", "leaf without an estimate"))
            elif item.effort <= 0:
                report.append(Diagnostic(item.id, "nonpositive-effort", f"({item.effort})"))
        elif item.effort is not None:
            rolled = rollup_effort(wbs, item.id)
            report.append(
                Diagnostic(
                    item.id,
                    "internal-effort",
                    f"stored {item.effort} on internal item (roll-up {rolled})",
                )
            )
    return report


def rollup_effort(wbs: WorkBreakdownStructure, item_id: str) -> int:
    """A leaf's own effort, or the sum over non-removed leaf descendants."""
    if item_id not in wbs.by_id:
        raise UnknownIdError(f"unknown work item id {item_id!r}")
    if wbs.is_leaf(item_id):
        return wbs.by_id[item_id].effort or 0
    total = 0
    for leaf_id in wbs.leaf_ids(item_id):
        leaf = wbs.by_id[leaf_id]
        if leaf.state != "removed":
            total += leaf.effort or 0
    return total


def wbs_total_scope(wbs: WorkBreakdownStructure) -> int:
    """Sum of leaf efforts over non-removed items (the whole-scope rule)."""
    return sum(
        item.effort or 0
        for item in wbs.items
        if wbs.is_leaf(item.id) and item.state != "removed"
    )


# ---------------------------------------------------------------------------
# Planning-matrix operations


def _active_allocations(plan: PlanDocument) -> list[Allocation]:
    """Allocations whose row item exists and is not removed."""
    out = []
    for cell in plan.allocations:
        item = plan.wbs.by_id.get(cell.work_item)
        if item is not None and item.state == "removed":
            continue
        out.append(cell)
    return out


def validate_mpm(plan: PlanDocument) -> list[Diagnostic]:
    """Check the allocation matrix: references, row sums, coverage, columns."""
    report: list[Diagnostic] = []
    wbs = plan.wbs

    seen_cells: set[tuple[str, str]] = set()
    for cell in plan.allocations:
        if cell.work_item not in wbs.by_id:
            report.append(Diagnostic(cell.work_item, "unknown-work-item", ""))
        if cell.milestone not in plan.milestone_by_id:
            report.append(Diagnostic(cell.milestone, "unknown-milestone", ""))
        if cell.hours <= 0:
            report.append(
                Diagnostic(f"{cell.work_item}/{cell.milestone}", "nonpositive-allocation", f"({cell.hours})")
            )
        key = (cell.work_item, cell.milestone)
        if key in seen_cells:
            report.append(
                Diagnostic(f"{cell.work_item}/{cell.milestone}", "duplicate-allocation", "")
            )
        seen_cells.add(key)

    # row-sum rule: each mapped item's allocations add up to its roll-up
    active = [c for c in _active_allocations(plan) if c.work_item in wbs.by_id]
    row_totals: dict[str, int] = {}
    for cell in active:
        row_totals[cell.work_item] = row_totals.get(cell.work_item, 0) + cell.hours
    for item_id, total in sorted(row_totals.items()):
        rolled = rollup_effort(wbs, item_id)
        if total != rolled:
            report.append(
                Diagnostic(item_id, "row-sum-mismatch", f"({total} != {rolled})")
            )

    # no ancestor/descendant pair among the mapped rows
    mapped = set(row_totals)
    for item_id in sorted(mapped):
        for anc in wbs.ancestors(item_id):
            if anc in mapped:
                report.append(
                    Diagnostic(item_id, "ancestor-descendant-overlap", f"ancestor {anc} also mapped")
                )

    # commitment milestones own no effort
    column_totals: dict[str, int] = {}
    for cell in active:
        column_totals[cell.milestone] = column_totals.get(cell.milestone, 0) + cell.hours
    for m in plan.milestones:
        if m.kind == "commitment" and column_totals.get(m.id, 0) != 0:
            report.append(
                Diagnostic(m.id, "commitment-has-effort", f"({column_totals[m.id]} h allocated)")
            )

    # coverage: the matrix partitions the whole (non-removed) scope
    covered = sum(c.hours for c in active)
    scope = wbs_total_scope(wbs)
    if covered != scope:
        report.append(
            Diagnostic("(plan)", "coverage-mismatch", f"(allocated {covered} != scope {scope})")
        )
    return report


def work_package_effort(plan: PlanDocument, milestone_id: str) -> int:
    """Column sum of the milestone's allocations; commitments always own 0."""
    milestone = plan.milestone(milestone_id)
    if milestone.kind == "commitment":
        return 0
    return sum(c.hours for c in _active_allocations(plan) if c.milestone == milestone_id)


def total_scope(plan: PlanDocument) -> int:
    """Sum of all allocation cells whose row item is in scope."""
    return sum(c.hours for c in _active_allocations(plan))
