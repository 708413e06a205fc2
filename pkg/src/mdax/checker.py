"""Independent schedule validation: no logic shared with the scheduler.

Everything here re-derives what it needs (capacity, completion dates) from
first principles so a scheduler bug cannot hide behind shared code. The rule
set is closed: cycle, capacity-exceeded, area-mismatch, precedence-order,
blackout-allocation, hard-date-missed, overlap-double-booking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta

from .graph import check_acyclic, plan_graph, topological_order
from .model import PlanDocument, work_package_effort
from .schedule import TimeBox, WorkPackageSchedule

RULES = (
    "cycle",
    "capacity-exceeded",
    "area-mismatch",
    "precedence-order",
    "blackout-allocation",
    "hard-date-missed",
    "overlap-double-booking",
)


@dataclass(frozen=True)
class Violation:
    rule: str
    subjects: tuple[str, ...]
    period: int | None = None
    detail: str = ""

    def __str__(self) -> str:
        where = f" @p{self.period}" if self.period is not None else ""
        return f"{self.rule}[{','.join(self.subjects)}]{where} {self.detail}".rstrip()


def _grid_capacity(plan: PlanDocument, period: int) -> int:
    """Checker-local capacity math; deliberately not the scheduler's."""
    if period in plan.calendar.blackouts:
        return 0
    res = plan.resources
    fraction = res.overhead_fraction()
    return math.floor(res.fte * plan.calendar.hours_per_fte_period * (1 - fraction))


def _expected_area(plan: PlanDocument, milestone_id: str, overrides) -> int:
    if overrides and milestone_id in overrides:
        base = max(0, int(overrides[milestone_id]))
    else:
        base = work_package_effort(plan, milestone_id)
    return base + plan.buffers.get(milestone_id, 0)


def _completion_dates(
    plan: PlanDocument, boxes: dict[str, TimeBox]
) -> dict[str, date]:
    """When each milestone counts as complete: set dates stand, boxes date
    themselves by their right edge, workless soft milestones follow their
    predecessors."""
    graph = plan_graph(plan)
    preds = graph.predecessors()
    out: dict[str, date] = {}
    for mid in topological_order(graph, plan.milestone_by_id):
        milestone = plan.milestone_by_id[mid]
        if milestone.hard_date is not None:
            out[mid] = milestone.hard_date
        elif mid in boxes and boxes[mid].area > 0:
            out[mid] = plan.calendar.period_end(boxes[mid].finish)
        else:
            pred_dates = [out[p] for p in preds[mid] if p in out]
            out[mid] = max(pred_dates, default=plan.calendar.start_date - timedelta(days=1))
    return out


def validate_schedule(
    plan: PlanDocument,
    schedule: WorkPackageSchedule,
    *,
    package_effort_overrides: dict[str, int] | None = None,
) -> list[Violation]:
    """Every broken rule in the schedule, empty when it is sound."""
    violations: list[Violation] = []
    cal = plan.calendar
    boxes = schedule.boxes

    graph = plan_graph(plan)
    cycle = check_acyclic(graph)
    if cycle is not None:
        violations.append(
            Violation("cycle", tuple(cycle), detail="dependency graph is cyclic")
        )

    # area: each worked milestone's box holds exactly its package (plus buffer)
    for milestone in plan.milestones:
        expected = _expected_area(plan, milestone.id, package_effort_overrides)
        if milestone.kind == "commitment":
            expected = 0
        box = boxes.get(milestone.id)
        area = box.area if box else 0
        if area != expected and (expected > 0 or area > 0):
            violations.append(
                Violation(
                    "area-mismatch",
                    (milestone.id,),
                    detail=f"box holds {area} h, package needs {expected} h",
                )
            )

    # capacity and blackout, column by column
    periods = sorted({p for box in boxes.values() for p in box.intensity})
    for period in periods:
        stacked = sum(box.intensity.get(period, 0) for box in boxes.values())
        if period in cal.blackouts:
            if stacked > 0:
                offenders = tuple(
                    sorted(m for m, b in boxes.items() if b.intensity.get(period, 0) > 0)
                )
                violations.append(
                    Violation(
                        "blackout-allocation",
                        offenders,
                        period=period,
                        detail=f"{stacked} h placed in a blackout period",
                    )
                )
            continue
        available = _grid_capacity(plan, period)
        if stacked > available:
            offenders = tuple(
                sorted(m for m, b in boxes.items() if b.intensity.get(period, 0) > 0)
            )
            violations.append(
                Violation(
                    "capacity-exceeded",
                    offenders,
                    period=period,
                    detail=f"{stacked} h stacked against {available} h available",
                )
            )

    # a single package may not claim more people than it is allowed
    for mid, box in sorted(boxes.items()):
        cap = plan.parallelism.get(mid, plan.resources.fte) * cal.hours_per_fte_period
        for period, hours in sorted(box.intensity.items()):
            if hours > cap:
                violations.append(
                    Violation(
                        "overlap-double-booking",
                        (mid,),
                        period=period,
                        detail=f"{hours} h in one period exceeds the {cap} h package lane",
                    )
                )

    if cycle is None:
        completion = _completion_dates(plan, boxes)
        for edge in plan.edges:
            if completion[edge.predecessor] > completion[edge.successor]:
                violations.append(
                    Violation(
                        "precedence-order",
                        (edge.predecessor, edge.successor),
                        detail=f"{edge.predecessor} completes "
                        f"{completion[edge.predecessor].isoformat()}, after "
                        f"{edge.successor} at {completion[edge.successor].isoformat()}",
                    )
                )

        preds = graph.predecessors()
        for milestone in plan.milestones:
            if milestone.hard_date is None:
                continue
            box = boxes.get(milestone.id)
            if box is not None and box.area > 0:
                edge_date = cal.period_end(box.finish)
                if edge_date > milestone.hard_date:
                    violations.append(
                        Violation(
                            "hard-date-missed",
                            (milestone.id,),
                            period=box.finish,
                            detail=f"work ends {edge_date.isoformat()}, "
                            f"due {milestone.hard_date.isoformat()}",
                        )
                    )
            elif milestone.kind != "commitment":
                latest = max(
                    (completion[p] for p in preds[milestone.id]),
                    default=cal.start_date - timedelta(days=1),
                )
                if latest > milestone.hard_date:
                    violations.append(
                        Violation(
                            "hard-date-missed",
                            (milestone.id,),
                            detail=f"predecessors complete {latest.isoformat()}, "
                            f"due {milestone.hard_date.isoformat()}",
                        )
                    )
    return violations


@dataclass(frozen=True)
class EdgeCheck:
    predecessor: str
    successor: str
    ok: bool


@dataclass(frozen=True)
class PlacementReport:
    """Live feedback for a manual (possibly partial) placement."""

    violations: tuple[Violation, ...]
    derived_dates: dict[str, date]
    unplaced_effort: dict[str, int]
    edge_checks: tuple[EdgeCheck, ...]


def validate_placement(
    plan: PlanDocument, boxes: dict[str, dict[int, int]]
) -> PlacementReport:
    """Check a manual placement where packages may be only partly placed.

    Hours still missing from a box are reported as unplaced, not as an area
    violation; every other rule fires exactly as for a complete schedule.
    """
    tboxes = {m: TimeBox(m, dict(cells)) for m, cells in boxes.items()}
    schedule = WorkPackageSchedule(boxes=tboxes)
    violations = [
        v
        for v in validate_schedule(plan, schedule)
        if v.rule != "area-mismatch"
    ]
    unplaced: dict[str, int] = {}
    for milestone in plan.milestones:
        expected = _expected_area(plan, milestone.id, None)
        if milestone.kind == "commitment":
            expected = 0
        placed = tboxes[milestone.id].area if milestone.id in tboxes else 0
        if placed > expected:
            violations.append(
                Violation(
                    "area-mismatch",
                    (milestone.id,),
                    detail=f"box holds {placed} h, package needs {expected} h",
                )
            )
        else:
            unplaced[milestone.id] = expected - placed

    completion = _completion_dates(plan, tboxes) if check_acyclic(plan_graph(plan)) is None else {}
    edge_checks = tuple(
        EdgeCheck(e.predecessor, e.successor, completion[e.predecessor] <= completion[e.successor])
        for e in plan.edges
        if e.predecessor in completion and e.successor in completion
    )
    violations.sort(key=lambda v: (RULES.index(v.rule), v.subjects))
    return PlacementReport(
        violations=tuple(violations),
        derived_dates=completion,
        unplaced_effort=unplaced,
        edge_checks=edge_checks,
    )
