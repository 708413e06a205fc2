"""Golden demo plan: the RestoLight tablet ordering project.

A four-developer, 1810-hour plan starting the last week of September with a
two-week year-end closure. Milestones run from kick-off to project close;
three fixed dates anchor it: kick-off in early October, the customer's tablet
delivery in the first week of November, deployment by the beginning of May.
"""

from __future__ import annotations

from datetime import date

from .model import (
    Allocation,
    Calendar,
    DependencyEdge,
    Milestone,
    PlanDocument,
    ResourceProfile,
    WorkBreakdownStructure,
    WorkItem,
)

# (id, name, kind, parent, effort)
_WBS_ROWS = (
    ("1", "RestoLight ordering system", "output", None, None),
    ("1.a", "UX design", "work", "1", 140),
    ("1.b", "Development platform", "output", "1", None),
    ("1.b.1", "Select Platform", "work", "1.b", 110),
    ("1.b.2", "Install development stack", "work", "1.b", 20),
    ("1.b.3", "Set-up build distribution", "work", "1.b", 30),
    ("1.c", "Order-taking app", "output", "1", None),
    ("1.c.1", "Browse menu", "output", "1.c", None),
    ("1.c.1.1", "Browse savoury items", "output", "1.c.1", 50),
    ("1.c.1.2", "Browse drink items", "output", "1.c.1", 50),
    ("1.c.1.3", "Browse sweet items", "output", "1.c.1", 50),
    ("1.c.1.4", "Browse promotion items", "output", "1.c.1", 50),
    ("1.c.2", "Order management", "output", "1.c", None),
    ("1.c.2.1", "Add item to order", "output", "1.c.2", 90),
    ("1.c.2.2", "Remove item from order", "output", "1.c.2", 50),
    # the source table reuses id 1.c.3.3 for this row; 1.c.2.3 is the gap in
    # its numbering and matches the story order, so the fixture uses it
    ("1.c.2.3", "Customize ordered item", "output", "1.c.2", 100),
    ("1.c.2.4", "Order", "output", "1.c.2", 50),
    ("1.c.2.5", "Clear order", "output", "1.c.2", 10),
    ("1.c.3", "Payments", "output", "1.c", None),
    ("1.c.3.1", "Add tip", "output", "1.c.3", 40),
    ("1.c.3.2", "Pay with credit card", "output", "1.c.3", 80),
    ("1.c.3.3", "Pay with cash", "output", "1.c.3", 50),
    ("1.c.3.4", "Pay with loyalty points", "output", "1.c.3", 30),
    ("1.c.4", "Menu management", "output", "1.c", None),
    ("1.c.4.1", "Add item to menu", "output", "1.c.4", 60),
    ("1.c.4.2", "Remove item from menu", "output", "1.c.4", 40),
    ("1.c.4.3", "Modify menu item", "output", "1.c.4", 60),
    ("1.c.4.4", "Update all devices", "output", "1.c.4", 50),
    ("1.c.5", "Refactoring & Feedback", "work", "1.c", 300),
    ("1.d", "Beta testing", "work", "1", 50),
    ("1.e", "Acceptance testing", "work", "1", 100),
    ("1.f", "System Deployment", "work", "1", 150),
)

# (id, name, kind, hard date, responsible, completion criteria)
_MILESTONES = (
    ("m01-kickoff", "Project kick-off", "state", date(2025, 10, 3), "Project leader",
     "Team on board and the opening session with the sponsor held"),
    ("m02-design-concept", "Design concept approved", "state", None, "Product owner",
     "Sponsor has signed off the information architecture and visual direction"),
    ("m03-platform-selected", "Platform selected", "state", None, "Team",
     "Target tablet model and OS stack chosen"),
    ("m04-design-completed", "Design completed", "state", None, "Team",
     "User testing done and sponsor feedback folded into the design"),
    ("m05-platform-available", "Platform available", "commitment", date(2025, 11, 7), "Customer",
     "Customer has handed over the tablets the teams develop against"),
    ("m06-release-1", "Release 1", "output", None, "Team",
     "Browsing, ordering, card/cash payment, tips and device publishing live at 90% coverage"),
    ("m07-beta-launched", "Beta testing launched", "state", None, "Product owner",
     "First release in beta users' hands with instrumentation recording"),
    ("m08-release-2", "Release 2", "output", None, "Team",
     "Item customization plus menu add/remove live at 90% coverage"),
    ("m09-beta-reviewed", "Beta testing results reviewed", "state", None, "Product owner",
     "Every beta insight triaged and dispositioned"),
    ("m10-release-3", "Release 3", "output", None, "Team",
     "Loyalty payment and menu editing live; beta follow-ups and debt cleared"),
    ("m11-atp-approved", "Acceptance testing procedure approved", "state", None, "Product owner",
     "Sponsor-approved test suite covering positive, negative and invalid cases"),
    ("m12-atp-completed", "Acceptance test completed", "state", None, "Team",
     "Full acceptance run green with no sponsor objection"),
    ("m13-system-deployed", "System deployed", "state", date(2026, 5, 1), "Team",
     "Production running 15 straight days without a software fault, operators trained"),
    ("m14-sign-off", "Customer sign-off", "state", None, "Customer",
     "Customer has accepted ownership of the system"),
    ("m15-closed", "Project closed", "state", None, "Project leader",
     "Postmortem held and records archived"),
)

# chronological chain; platform-selected -> platform-available and
# release-1 -> beta-launched are the two load-bearing links
_EDGE_CHAIN = tuple(m[0] for m in _MILESTONES)

# (work item, milestone, hours)
_ALLOCATIONS = (
    ("1.a", "m02-design-concept", 130),
    ("1.a", "m04-design-completed", 10),
    ("1.b.1", "m03-platform-selected", 110),
    ("1.b.2", "m06-release-1", 20),
    ("1.b.3", "m06-release-1", 30),
    ("1.c.1", "m06-release-1", 200),
    ("1.c.2.1", "m06-release-1", 90),
    ("1.c.2.2", "m06-release-1", 50),
    ("1.c.2.3", "m08-release-2", 100),
    ("1.c.2.4", "m06-release-1", 50),
    ("1.c.2.5", "m06-release-1", 10),
    ("1.c.3.1", "m06-release-1", 40),
    ("1.c.3.2", "m06-release-1", 80),
    ("1.c.3.3", "m06-release-1", 50),
    ("1.c.3.4", "m10-release-3", 30),
    ("1.c.4.1", "m08-release-2", 60),
    ("1.c.4.2", "m08-release-2", 40),
    ("1.c.4.3", "m10-release-3", 60),
    ("1.c.4.4", "m06-release-1", 50),
    ("1.c.5", "m08-release-2", 100),
    ("1.c.5", "m10-release-3", 200),
    ("1.d", "m07-beta-launched", 40),
    ("1.d", "m09-beta-reviewed", 10),
    ("1.e", "m11-atp-approved", 50),
    ("1.e", "m12-atp-completed", 50),
    ("1.f", "m13-system-deployed", 150),
)

_RELEASES = {
    "release-1": (
        "1.c.1", "1.c.2.1", "1.c.2.2", "1.c.2.4", "1.c.2.5",
        "1.c.3.1", "1.c.3.2", "1.c.3.3", "1.c.4.4",
    ),
    "release-2": ("1.c.2.3", "1.c.4.1", "1.c.4.2"),
    "release-3": ("1.c.3.4", "1.c.4.3"),
}


def restolight_plan() -> PlanDocument:
    """Build the demo plan from scratch (always version 1)."""
    release_of = {wi: rel for rel, members in _RELEASES.items() for wi in members}
    items = tuple(
        WorkItem(
            id=row[0],
            name=row[1],
            kind=row[2],
            parent=row[3],
            effort=row[4],
            release=release_of.get(row[0]),
        )
        for row in _WBS_ROWS
    )
    milestones = tuple(
        Milestone(
            id=m[0], name=m[1], kind=m[2], hard_date=m[3],
            responsible=m[4], completion_criteria=m[5],
        )
        for m in _MILESTONES
    )
    edges = tuple(
        DependencyEdge(a, b) for a, b in zip(_EDGE_CHAIN, _EDGE_CHAIN[1:])
    )
    return PlanDocument(
        name="RestoLight",
        wbs=WorkBreakdownStructure(items=items, roots=("1",)),
        milestones=milestones,
        edges=edges,
        allocations=tuple(Allocation(*row) for row in _ALLOCATIONS),
        calendar=Calendar(
            start_date=date(2025, 9, 22),
            period_length="week",
            hours_per_fte_period=40,
            blackouts=frozenset({14, 15}),
        ),
        resources=ResourceProfile(
            fte=4,
            meeting_hours_per_person_per_iteration=6,
            hours_per_person_per_iteration=40,
        ),
        releases=dict(_RELEASES),
    )


MILESTONE_ORDER = _EDGE_CHAIN
"""Milestone ids in matrix column order (also the only topological order)."""

PACKAGE_EFFORTS = {
    "m01-kickoff": 0,
    "m02-design-concept": 130,
    "m03-platform-selected": 110,
    "m04-design-completed": 10,
    "m05-platform-available": 0,
    "m06-release-1": 670,
    "m07-beta-launched": 40,
    "m08-release-2": 300,
    "m09-beta-reviewed": 10,
    "m10-release-3": 290,
    "m11-atp-approved": 50,
    "m12-atp-completed": 50,
    "m13-system-deployed": 150,
    "m14-sign-off": 0,
    "m15-closed": 0,
}
"""Expected work-package effort per milestone; grand total 1810."""
