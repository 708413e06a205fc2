"""Finish-to-finish milestone graph: cycle detection, ordering, reduction."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from datetime import date
from typing import Mapping

from .errors import CycleError, UnknownIdError
from .model import DependencyEdge, Milestone, PlanDocument


@dataclass(frozen=True)
class MilestoneGraph:
    nodes: tuple[str, ...]
    edges: tuple[DependencyEdge, ...]

    def successors(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {n: [] for n in self.nodes}
        for e in self.edges:
            adj[e.predecessor].append(e.successor)
        return adj

    def predecessors(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {n: [] for n in self.nodes}
        for e in self.edges:
            adj[e.successor].append(e.predecessor)
        return adj


def plan_graph(plan: PlanDocument) -> MilestoneGraph:
    """Graph over the plan's milestones; rejects dangling edge endpoints."""
    known = set(plan.milestone_by_id)
    for e in plan.edges:
        for endpoint in (e.predecessor, e.successor):
            if endpoint not in known:
                raise UnknownIdError(f"edge references unknown milestone {endpoint!r}")
    return MilestoneGraph(tuple(m.id for m in plan.milestones), tuple(plan.edges))


def check_acyclic(graph: MilestoneGraph) -> list[str] | None:
    """None when the graph is acyclic, otherwise one witness cycle [a,..,a]."""
    adj = graph.successors()
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in graph.nodes}
    for start in graph.nodes:
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        path = [start]
        color[start] = GREY
        while stack:
            node, i = stack[-1]
            if i < len(adj[node]):
                stack[-1] = (node, i + 1)
                nxt = adj[node][i]
                if color[nxt] == GREY:
                    cycle = path[path.index(nxt):] + [nxt]
                    return cycle
                if color[nxt] == WHITE:
                    color[nxt] = GREY
                    stack.append((nxt, 0))
                    path.append(nxt)
            else:
                color[node] = BLACK
                stack.pop()
                path.pop()
    return None


def topological_order(
    graph: MilestoneGraph, milestones: Mapping[str, Milestone]
) -> list[str]:
    """Predecessors-first order; ties prefer the earliest hard date, then id."""
    cycle = check_acyclic(graph)
    if cycle is not None:
        raise CycleError(cycle)

    def key(node: str) -> tuple[int, date, str]:
        m = milestones.get(node)
        if m is not None and m.hard_date is not None:
            return (0, m.hard_date, node)
        return (1, date.max, node)

    indegree = {n: 0 for n in graph.nodes}
    for e in graph.edges:
        indegree[e.successor] += 1
    adj = graph.successors()
    ready = [(key(n), n) for n, d in indegree.items() if d == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        _, node = heapq.heappop(ready)
        order.append(node)
        for nxt in adj[node]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                heapq.heappush(ready, (key(nxt), nxt))
    return order


def transitive_reduction(graph: MilestoneGraph) -> MilestoneGraph:
    """Smallest edge subset with the same reachability (unique for a DAG)."""
    cycle = check_acyclic(graph)
    if cycle is not None:
        raise CycleError(cycle)

    index = {n: i for i, n in enumerate(graph.nodes)}
    adj = graph.successors()
    # bitmask of nodes reachable from each node, built leaves-first
    order = topological_order(graph, {})
    reach = {n: 0 for n in graph.nodes}
    for node in reversed(order):
        mask = 0
        for nxt in adj[node]:
            mask |= (1 << index[nxt]) | reach[nxt]
        reach[node] = mask

    kept = []
    for e in graph.edges:
        redundant = any(
            other != e.successor and reach[other] >> index[e.successor] & 1
            for other in adj[e.predecessor]
        )
        if not redundant:
            kept.append(e)
    return MilestoneGraph(graph.nodes, tuple(kept))
