"""Capacity grid, greedy work-package scheduling, and date derivation.

The scheduler is a serial earliest-fit pass: milestones are visited in
topological order (hard-dated ones first among ties) and each work package is
poured into the earliest periods that still have capacity. A package may not
finish before any predecessor's committed finish, and a dated predecessor
commits at the period containing its date even if its work lands earlier, so
derived dates stay non-decreasing along every dependency edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date

from .errors import CycleError, PlanError
from .graph import MilestoneGraph, check_acyclic, plan_graph, topological_order
from .model import Calendar, PlanDocument, ResourceProfile, total_scope, work_package_effort


@dataclass(frozen=True)
class CapacityProfile:
    """Available working hours per period, overhead and blackouts applied."""

    hours: tuple[int, ...]

    def hour(self, period: int) -> int:
        if 1 <= period <= len(self.hours):
            return self.hours[period - 1]
        return 0


@dataclass(frozen=True)
class TimeBox:
    """Per-period effort intensities for one work package."""

    milestone: str
    intensity: dict[int, int]

    @property
    def area(self) -> int:
        return sum(self.intensity.values())

    @property
    def finish(self) -> int:
        positive = [p for p, h in self.intensity.items() if h > 0]
        return max(positive) if positive else 0

    @property
    def start(self) -> int:
        positive = [p for p, h in self.intensity.items() if h > 0]
        return min(positive) if positive else 0


@dataclass(frozen=True)
class WorkPackageSchedule:
    """Time boxes per worked milestone plus the dates they imply."""

    boxes: dict[str, TimeBox]
    dates: dict[str, date] = field(default_factory=dict)
    draft: bool = False

    def finish_period(self, milestone_id: str) -> int:
        box = self.boxes.get(milestone_id)
        return box.finish if box else 0


@dataclass(frozen=True)
class InfeasibilityReport:
    """Why no schedule exists: the broken constraint and what is achievable."""

    rule: str  # "hard-date-missed" | "horizon-exhausted"
    milestone: str
    earliest_achievable: int | None = None
    detail: str = ""


def capacity_profile(
    calendar: Calendar, resources: ResourceProfile, horizon: int
) -> CapacityProfile:
    """Per-period available hours over ``horizon`` periods.

    Non-blackout periods supply fte x hours-per-period x (1 - overhead),
    floored to whole hours; blackout periods supply none.
    """
    if horizon <= 0:
        raise PlanError(f"horizon must be positive, got {horizon}")
    if resources.fte <= 0:
        raise PlanError(f"fte must be positive, got {resources.fte}")
    overhead = resources.overhead_fraction()
    if overhead < 0 or overhead >= 1:
        raise PlanError(f"overhead fraction {overhead} outside [0, 1)")
    per_period = math.floor(
        resources.fte * calendar.hours_per_fte_period * (1 - overhead)
    )
    hours = tuple(
        0 if period in calendar.blackouts else per_period
        for period in range(1, horizon + 1)
    )
    return CapacityProfile(hours)


def default_horizon(plan: PlanDocument) -> int:
    """Enough periods to cover every hard date plus the whole scope."""
    cal = plan.calendar
    latest_deadline = max(
        (cal.containing_period(m.hard_date) for m in plan.milestones if m.hard_date),
        default=0,
    )
    capacity = capacity_profile(cal, plan.resources, 1).hour(1) or 1
    work_periods = math.ceil((total_scope(plan) + sum(plan.buffers.values())) / capacity)
    return max(latest_deadline, 1) + work_periods + len(cal.blackouts) + 8


def _anchor_period(calendar: Calendar, milestone) -> int:
    return calendar.containing_period(milestone.hard_date) if milestone.hard_date else 0


def _package_hours(plan: PlanDocument, milestone_id: str, overrides) -> int:
    if overrides and milestone_id in overrides:
        base = max(0, int(overrides[milestone_id]))
    else:
        base = work_package_effort(plan, milestone_id)
    return base + plan.buffers.get(milestone_id, 0)


def auto_schedule(
    plan: PlanDocument,
    horizon: int | None = None,
    *,
    package_effort_overrides: dict[str, int] | None = None,
) -> WorkPackageSchedule | InfeasibilityReport:
    """Pack every work package onto the capacity grid, or say why it fails.

    Commitment milestones consume no capacity and pin their date; hard
    milestones must finish by theirs or an :class:`InfeasibilityReport` with
    the earliest achievable finish comes back instead of a schedule.
    """
    if horizon is None:
        horizon = default_horizon(plan)
    graph = plan_graph(plan)
    cycle = check_acyclic(graph)
    if cycle is not None:
        raise CycleError(cycle)

    cal = plan.calendar
    capacity = capacity_profile(cal, plan.resources, horizon)
    free = list(capacity.hours)  # index 0 -> period 1
    preds = graph.predecessors()
    committed: dict[str, int] = {}  # period a successor may not finish before
    boxes: dict[str, TimeBox] = {}

    for mid in topological_order(graph, plan.milestone_by_id):
        milestone = plan.milestone_by_id[mid]
        floor_period = max((committed[p] for p in preds[mid]), default=0)
        anchor = _anchor_period(cal, milestone)

        if milestone.kind == "commitment":
            committed[mid] = max(floor_period, anchor)
            continue

        effort = _package_hours(plan, mid, package_effort_overrides)
        if effort == 0:
            finish = floor_period
            if milestone.hard_date and finish > cal.deadline_period(milestone.hard_date):
                return InfeasibilityReport(
                    "hard-date-missed",
                    mid,
                    earliest_achievable=finish,
                    detail=f"predecessors finish in period {finish}, "
                    f"after the {milestone.hard_date.isoformat()} deadline",
                )
            committed[mid] = max(finish, anchor)
            continue

        box_cap = plan.parallelism.get(mid, plan.resources.fte) * cal.hours_per_fte_period
        intensity: dict[int, int] = {}
        remaining = effort
        last = 0
        for period in range(1, horizon + 1):
            if remaining == 0:
                break
            take = min(remaining, free[period - 1], box_cap)
            if take > 0:
                intensity[period] = take
                free[period - 1] -= take
                remaining -= take
                last = period
        if remaining > 0:
            return InfeasibilityReport(
                "horizon-exhausted",
                mid,
                earliest_achievable=None,
                detail=f"{remaining} h of {effort} h left after period {horizon}",
            )

        if last < floor_period:
            # completion is gated by a predecessor: keep the final hour there
            target = floor_period
            while target <= horizon and free[target - 1] < 1:
                target += 1
            if target > horizon:
                return InfeasibilityReport(
                    "horizon-exhausted",
                    mid,
                    earliest_achievable=None,
                    detail=f"no capacity at or after period {floor_period}",
                )
            intensity[last] -= 1
            free[last - 1] += 1
            if intensity[last] == 0:
                del intensity[last]
            intensity[target] = intensity.get(target, 0) + 1
            free[target - 1] -= 1
            last = target

        if milestone.hard_date and last > cal.deadline_period(milestone.hard_date):
            return InfeasibilityReport(
                "hard-date-missed",
                mid,
                earliest_achievable=last,
                detail=f"earliest achievable finish is period {last}, "
                f"deadline {milestone.hard_date.isoformat()} "
                f"is period {cal.deadline_period(milestone.hard_date)}",
            )
        boxes[mid] = TimeBox(mid, intensity)
        committed[mid] = max(last, anchor)

    schedule = WorkPackageSchedule(boxes=boxes)
    dates = derive_milestone_dates(plan, schedule)
    return WorkPackageSchedule(boxes=boxes, dates=dates)


def derive_milestone_dates(
    plan: PlanDocument, schedule: WorkPackageSchedule
) -> dict[str, date]:
    """Date every milestone: set dates stand, soft ones read their box edge.

    A soft milestone with a box is dated by the right edge of its finish
    period; a soft milestone without work completes with its predecessors.
    """
    graph = plan_graph(plan)
    cycle = check_acyclic(graph)
    if cycle is not None:
        raise CycleError(cycle)
    cal = plan.calendar
    preds = graph.predecessors()
    dates: dict[str, date] = {}
    for mid in topological_order(graph, plan.milestone_by_id):
        milestone = plan.milestone_by_id[mid]
        if milestone.hard_date is not None:
            dates[mid] = milestone.hard_date
            continue
        box = schedule.boxes.get(mid)
        if box is not None and box.area > 0:
            dates[mid] = cal.period_end(box.finish)
        elif work_package_effort(plan, mid) > 0:
            raise PlanError(f"milestone {mid!r} has effort but no time box")
        else:
            pred_dates = [dates[p] for p in preds[mid] if p in dates]
            dates[mid] = max(pred_dates, default=cal.start_date)
    return dates


# ---------------------------------------------------------------------------
# Scenario comparison


@dataclass(frozen=True)
class WhatIfDelta:
    """A single planning knob to turn: effort, an edge, team size, blackouts.

    ``package_efforts`` replaces a milestone's scheduled hours (matrix
    untouched); ``new_edges`` adds dependencies; ``fte`` resizes the team;
    ``add_blackouts``/``remove_blackouts`` adjust the calendar.
    """

    package_efforts: dict[str, int] = field(default_factory=dict)
    new_edges: tuple = ()
    fte: int | None = None
    add_blackouts: frozenset[int] = frozenset()
    remove_blackouts: frozenset[int] = frozenset()


@dataclass(frozen=True)
class DateShift:
    milestone: str
    before: date | None
    after: date | None

    @property
    def shift_days(self) -> int | None:
        if self.before is None or self.after is None:
            return None
        return (self.after - self.before).days


@dataclass(frozen=True)
class WhatIfReport:
    feasible_before: bool
    feasible_after: bool
    shifts: tuple[DateShift, ...]
    infeasibility_before: InfeasibilityReport | None = None
    infeasibility_after: InfeasibilityReport | None = None
    new_violations: tuple = ()


def apply_delta(plan: PlanDocument, delta: WhatIfDelta) -> PlanDocument:
    """Scenario plan with the delta's structural changes applied."""
    for mid in delta.package_efforts:
        plan.milestone(mid)  # raises on unknown ids
    edges = plan.edges
    if delta.new_edges:
        known = set(plan.milestone_by_id)
        for e in delta.new_edges:
            for endpoint in (e.predecessor, e.successor):
                if endpoint not in known:
                    raise PlanError(f"delta edge references unknown milestone {endpoint!r}")
        edges = edges + tuple(delta.new_edges)
    resources = plan.resources
    if delta.fte is not None:
        from dataclasses import replace

        resources = replace(resources, fte=delta.fte)
    calendar = plan.calendar
    if delta.add_blackouts or delta.remove_blackouts:
        from dataclasses import replace

        blackouts = (calendar.blackouts | delta.add_blackouts) - delta.remove_blackouts
        calendar = replace(calendar, blackouts=frozenset(blackouts))
    return plan.bump(edges=edges, resources=resources, calendar=calendar)


def what_if(
    plan: PlanDocument, delta: WhatIfDelta, horizon: int | None = None
) -> WhatIfReport:
    """Schedule the plan before and after a delta and compare the dates."""
    from .checker import validate_schedule

    before = auto_schedule(plan, horizon)
    scenario = apply_delta(plan, delta)
    after = auto_schedule(
        scenario, horizon, package_effort_overrides=delta.package_efforts or None
    )

    dates_before = before.dates if isinstance(before, WorkPackageSchedule) else {}
    dates_after = after.dates if isinstance(after, WorkPackageSchedule) else {}
    shifts = tuple(
        DateShift(m.id, dates_before.get(m.id), dates_after.get(m.id))
        for m in plan.milestones
    )
    violations = ()
    if isinstance(after, WorkPackageSchedule):
        violations = tuple(
            validate_schedule(
                scenario, after, package_effort_overrides=delta.package_efforts or None
            )
        )
    return WhatIfReport(
        feasible_before=isinstance(before, WorkPackageSchedule),
        feasible_after=isinstance(after, WorkPackageSchedule),
        shifts=shifts,
        infeasibility_before=None if isinstance(before, WorkPackageSchedule) else before,
        infeasibility_after=None if isinstance(after, WorkPackageSchedule) else after,
        new_violations=violations,
    )
