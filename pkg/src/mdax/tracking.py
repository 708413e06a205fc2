"""Execution tracking: progress ledger, earned value, forecasts, slip chart.

All series are pure replays of (plan, ledger): the ledger is append-only and
earning is all-or-nothing at work-item completion. Reopening work never takes
earned value back; rework enters as new scope so the accomplished-work curve
stays monotone and its slope stays readable.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from fractions import Fraction
from math import ceil

from .errors import LedgerError, PlanError, UnknownIdError
from .graph import plan_graph, topological_order
from .model import PlanDocument, rollup_effort, work_package_effort
from .schedule import WorkPackageSchedule

EVENT_KINDS = (
    "wi-ready",
    "wi-done",
    "task-status",
    "effort-logged",
    "scope-added",
    "scope-removed",
    "milestone-completed",
    "review-snapshot",
)

TASK_STATUSES = ("to-be-done", "in-progress", "blocked", "done")


@dataclass(frozen=True)
class Task:
    """One board entry: a bite of a work item with its own status."""

    id: str
    work_item: str
    description: str = ""
    estimate: int = 0
    status: str = "to-be-done"
    actual_hours: int = 0


@dataclass(frozen=True)
class ProgressEvent:
    timestamp: date
    kind: str
    subject: str | None = None
    hours: int | None = None
    new_status: str | None = None
    new_date: date | None = None


@dataclass(frozen=True)
class ProgressLedger:
    """Append-only event log; replay order is exactly append order."""

    events: tuple[ProgressEvent, ...] = ()

    def append(self, event: ProgressEvent) -> ProgressLedger:
        if self.events and event.timestamp < self.events[-1].timestamp:
            raise LedgerError(
                f"event at {event.timestamp.isoformat()} precedes ledger head "
                f"{self.events[-1].timestamp.isoformat()}"
            )
        if event.kind not in EVENT_KINDS:
            raise LedgerError(f"unknown event kind {event.kind!r}")
        return ProgressLedger(self.events + (event,))

    def until(self, cutoff: date) -> ProgressLedger:
        return ProgressLedger(tuple(e for e in self.events if e.timestamp <= cutoff))


def record_progress(
    plan: PlanDocument, ledger: ProgressLedger, event: ProgressEvent
) -> ProgressLedger:
    """Validate an event against the plan, then append it."""
    if event.kind in ("wi-ready", "wi-done", "scope-removed"):
        if event.subject is None or (
            event.subject not in plan.wbs.by_id and not _is_added_scope(ledger, event.subject)
        ):
            raise UnknownIdError(f"unknown work item id {event.subject!r}")
    if event.kind == "milestone-completed":
        plan.milestone(event.subject or "")
    if event.kind == "scope-added":
        if event.subject is None or event.hours is None or event.hours <= 0:
            raise LedgerError("scope-added needs a subject and positive hours")
    if event.kind == "effort-logged" and (event.hours is None or event.hours <= 0):
        raise LedgerError("effort-logged needs positive hours")
    if event.kind == "task-status" and event.new_status not in TASK_STATUSES:
        raise LedgerError(f"invalid task status {event.new_status!r}")
    return ledger.append(event)


def _is_added_scope(ledger: ProgressLedger, subject: str) -> bool:
    return any(
        e.kind == "scope-added" and e.subject == subject for e in ledger.events
    )


def transition_task(
    ledger: ProgressLedger, task: Task, new_status: str, *, timestamp: date
) -> ProgressLedger:
    """Append a status move for a known task; any of the four states is legal."""
    if new_status not in TASK_STATUSES:
        raise LedgerError(f"invalid task status {new_status!r}")
    return ledger.append(
        ProgressEvent(timestamp=timestamp, kind="task-status", subject=task.id, new_status=new_status)
    )


def task_board(
    tasks: dict[str, Task], ledger: ProgressLedger
) -> tuple[dict[str, Task], tuple[str, ...]]:
    """Replay status and effort events onto task definitions.

    Returns the updated board plus the ids of tasks that were reopened
    (left "done" for any other state) at some point.
    """
    board = dict(tasks)
    reopened: list[str] = []
    for event in ledger.events:
        if event.subject not in board:
            continue
        task = board[event.subject]
        if event.kind == "task-status" and event.new_status:
            if task.status == "done" and event.new_status != "done":
                reopened.append(task.id)
            board[task.id] = replace(task, status=event.new_status)
        elif event.kind == "effort-logged" and event.hours:
            board[task.id] = replace(task, actual_hours=task.actual_hours + event.hours)
    return board, tuple(dict.fromkeys(reopened))


# ---------------------------------------------------------------------------
# Earned-value replay


class _ScopeState:
    """Running scope table: id -> hours, with the done set and totals."""

    def __init__(self, plan: PlanDocument):
        self.plan = plan
        self.scope: dict[str, int] = {}
        for item in plan.wbs.items:
            if plan.wbs.is_leaf(item.id) and item.state != "removed":
                self.scope[item.id] = item.effort or 0
        self.done: set[str] = set()
        self.actual = 0

    @property
    def planned(self) -> int:
        return sum(self.scope.values())

    @property
    def accomplished(self) -> int:
        return sum(self.scope[i] for i in self.done)

    def _entries_under(self, subject: str) -> list[str]:
        if subject in self.plan.wbs.by_id and not self.plan.wbs.is_leaf(subject):
            return [i for i in self.plan.wbs.leaf_ids(subject) if i in self.scope]
        return [subject] if subject in self.scope else []

    def apply(self, event: ProgressEvent) -> None:
        if event.kind == "effort-logged" and event.hours:
            self.actual += event.hours
        elif event.kind == "scope-added" and event.subject and event.hours:
            self.scope[event.subject] = self.scope.get(event.subject, 0) + event.hours
        elif event.kind == "scope-removed" and event.subject:
            for entry in self._entries_under(event.subject):
                if entry not in self.done:  # earned value is never taken back
                    del self.scope[entry]
        elif event.kind == "wi-done" and event.subject:
            self.done.update(self._entries_under(event.subject))

    def done_hours_of(self, subject: str) -> int:
        return sum(self.scope[i] for i in self._entries_under(subject) if i in self.done)


@dataclass(frozen=True)
class EvPoint:
    time: int  # day offset from the calendar start, or iteration index
    planned: int
    accomplished: int
    actual: int


@dataclass(frozen=True)
class EvSeries:
    granularity: str  # "day" | "iteration"
    origin: date
    points: tuple[EvPoint, ...]

    def time_label(self, point: EvPoint) -> str:
        if self.granularity == "day":
            return (self.origin + timedelta(days=point.time)).isoformat()
        return str(point.time)


def earned_value_series(
    plan: PlanDocument, ledger: ProgressLedger, granularity: str = "iteration"
) -> EvSeries:
    """Planned, accomplished and actual hours sampled on a fixed grid."""
    if granularity not in ("day", "iteration"):
        raise PlanError(f"granularity must be day or iteration, not {granularity!r}")
    cal = plan.calendar
    state = _ScopeState(plan)
    events = list(ledger.events)
    last_event = max((e.timestamp for e in events), default=cal.start_date)

    points: list[EvPoint] = []
    applied = 0
    if granularity == "day":
        span = max(0, (last_event - cal.start_date).days)
        for day in range(span + 1):
            cutoff = cal.start_date + timedelta(days=day)
            while applied < len(events) and events[applied].timestamp <= cutoff:
                state.apply(events[applied])
                applied += 1
            points.append(EvPoint(day, state.planned, state.accomplished, state.actual))
    else:
        horizon = max(1, cal.containing_period(last_event))
        for iteration in range(horizon + 1):
            cutoff = cal.period_end(iteration)
            while applied < len(events) and events[applied].timestamp <= cutoff:
                state.apply(events[applied])
                applied += 1
            points.append(
                EvPoint(iteration, state.planned, state.accomplished, state.actual)
            )
    return EvSeries(granularity=granularity, origin=cal.start_date, points=tuple(points))


@dataclass(frozen=True)
class Forecast:
    finish_time: float  # in the series' time units
    effort_at_finish: float
    velocity: float


def _lsq_slope(xs: list[float], ys: list[float]) -> float:
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    if sxx == 0:
        return 0.0
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    return sxy / sxx


def forecast_completion(series: EvSeries, window: int | None = None) -> Forecast | None:
    """Extrapolate the accomplished-work trend to the remaining plan.

    ``None`` means no forecast is possible: fewer than two points showing
    progress in the window, or a flat/negative trend.
    """
    points = list(series.points[-window:] if window else series.points)
    progressed = [p for p in points]
    if len(progressed) < 2 or len({p.accomplished for p in progressed}) < 2:
        return None
    xs = [float(p.time) for p in progressed]
    velocity = _lsq_slope(xs, [float(p.accomplished) for p in progressed])
    if velocity <= 0:
        return None
    last = points[-1]
    remaining = last.planned - last.accomplished
    finish_time = last.time + (remaining / velocity if remaining > 0 else 0.0)
    effort_slope = _lsq_slope(xs, [float(p.actual) for p in progressed])
    effort_at_finish = last.actual + effort_slope * (finish_time - last.time)
    return Forecast(finish_time=finish_time, effort_at_finish=effort_at_finish, velocity=velocity)


# ---------------------------------------------------------------------------
# Look-ahead view


def lookahead_view(
    plan: PlanDocument,
    schedule: WorkPackageSchedule,
    now: date,
    depth: int = 2,
) -> list[str]:
    """Work items whose time boxes touch the next ``depth`` iterations.

    Ordered by package finish, ready items first within a package; done and
    removed items never appear. Purely a view: nothing is mutated.
    """
    if schedule is None or not schedule.boxes:
        raise PlanError("no schedule present")
    if not 1 <= depth <= 3:
        raise PlanError(f"depth must be between 1 and 3, got {depth}")
    cal = plan.calendar
    first = max(1, cal.containing_period(now))
    window = range(first, first + depth)

    entries: list[tuple[int, int, str, str]] = []
    seen: set[str] = set()
    for mid, box in schedule.boxes.items():
        if not any(box.intensity.get(p, 0) > 0 for p in window):
            continue
        for cell in plan.allocations:
            if cell.milestone != mid or cell.work_item in seen:
                continue
            item = plan.wbs.by_id.get(cell.work_item)
            if item is None or item.state in ("done", "removed"):
                continue
            seen.add(cell.work_item)
            entries.append(
                (box.finish, 0 if item.state == "ready" else 1, cell.work_item, mid)
            )
    entries.sort()
    return [item_id for _, _, item_id, _ in entries]


# ---------------------------------------------------------------------------
# Milestone slip chart


@dataclass(frozen=True)
class SlipPoint:
    review: date
    milestone: str
    planned: date
    forecast: date | None
    completed: bool


@dataclass(frozen=True)
class SlipSeries:
    reviews: tuple[date, ...]
    points: tuple[SlipPoint, ...]


def _remaining_package_hours(
    plan: PlanDocument, state: _ScopeState, milestone_id: str
) -> Fraction:
    """Allocated hours not yet earned, split rows credited proportionally."""
    remaining = Fraction(0)
    for cell in plan.allocations:
        if cell.milestone != milestone_id:
            continue
        item = plan.wbs.by_id.get(cell.work_item)
        if item is None or item.state == "removed":
            continue
        rolled = rollup_effort(plan.wbs, cell.work_item)
        if rolled <= 0:
            continue
        done_fraction = Fraction(state.done_hours_of(cell.work_item), rolled)
        remaining += cell.hours * (1 - done_fraction)
    return remaining


def slip_series(
    plan: PlanDocument,
    schedule: WorkPackageSchedule,
    ledger: ProgressLedger,
    review_dates: list[date],
) -> SlipSeries:
    """Planned vs forecast date per milestone at every review.

    The forecast shifts the planned date by how many hours the package is
    behind its own scheduled burn, converted to days at the current
    accomplished-work velocity, and never lands before the review itself.
    Completed milestones freeze at their actual completion date. Forecasts
    propagate along dependencies so a successor never beats its predecessor.
    """
    if not schedule.dates:
        raise PlanError("schedule has no derived dates")
    cal = plan.calendar
    graph = plan_graph(plan)
    order = topological_order(graph, plan.milestone_by_id)
    preds = graph.predecessors()

    points: list[SlipPoint] = []
    for review in sorted(review_dates):
        visible = ledger.until(review)
        state = _ScopeState(plan)
        for event in visible.events:
            state.apply(event)

        completed_on: dict[str, date] = {}
        revised: dict[str, date] = {}
        for event in visible.events:
            if event.kind == "milestone-completed" and event.subject:
                completed_on[event.subject] = event.new_date or event.timestamp
            elif (
                event.kind == "review-snapshot"
                and event.subject in plan.milestone_by_id
                and event.new_date
            ):
                revised[event.subject] = event.new_date

        day_series = earned_value_series(plan, visible, "day")
        xs = [float(p.time) for p in day_series.points]
        velocity = (
            _lsq_slope(xs, [float(p.accomplished) for p in day_series.points])
            if len(xs) >= 2
            else 0.0
        )

        forecast: dict[str, date | None] = {}
        for mid in order:
            milestone = plan.milestone_by_id[mid]
            planned = schedule.dates[mid]
            if mid in completed_on:
                forecast[mid] = completed_on[mid]
                continue
            if milestone.kind == "commitment":
                promised = revised.get(mid, planned)
                forecast[mid] = max(promised, review)
            elif work_package_effort(plan, mid) == 0:
                forecast[mid] = planned
            else:
                remaining = _remaining_package_hours(plan, state, mid)
                box = schedule.boxes.get(mid)
                scheduled_left = sum(
                    h
                    for p, h in (box.intensity.items() if box else ())
                    if cal.period_end(p) > review
                )
                gap = remaining - scheduled_left
                if gap == 0:
                    forecast[mid] = max(planned, review)
                elif velocity > 0:
                    shift = ceil(float(gap) / velocity)
                    forecast[mid] = max(planned + timedelta(days=shift), review)
                elif gap < 0:
                    forecast[mid] = max(planned, review)
                else:
                    forecast[mid] = None
            # a successor never completes before its open predecessors
            pred_fcs = [
                forecast[p]
                for p in preds[mid]
                if p in forecast and forecast[p] is not None and p not in completed_on
            ]
            if pred_fcs and forecast[mid] is not None:
                forecast[mid] = max([forecast[mid], *pred_fcs])

        for mid in order:
            points.append(
                SlipPoint(
                    review=review,
                    milestone=mid,
                    planned=schedule.dates[mid],
                    forecast=forecast[mid],
                    completed=mid in completed_on,
                )
            )
    return SlipSeries(reviews=tuple(sorted(review_dates)), points=tuple(points))
