"""Uninformed ground truth: exact C* by uniform-cost search."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .policies import as_rational


class OracleBudgetError(RuntimeError):
    """The state budget ran out before C* was proven."""


@dataclass(frozen=True)
class OracleResult:
    cost: Optional[int]
    expanded_states: int


def optimal_cost(domain, instance, state_budget: int = 2_000_000) -> OracleResult:
    """Dijkstra from ``instance.start``; cost None means the goal is unreachable."""
    start, goal = instance.start, instance.goal
    dist = {start: 0}
    heap = [(0, 0, start)]
    done = set()
    tie = 0
    while heap:
        g, _, s = heapq.heappop(heap)
        if s in done:
            continue
        if s == goal:
            return OracleResult(g, len(done))
        done.add(s)
        if len(dist) > state_budget:
            raise OracleBudgetError(f"state budget {state_budget} exhausted")
        for t, c in domain.successors(s):
            ng = g + c
            if t not in done and ng < dist.get(t, ng + 1):
                dist[t] = ng
                tie += 1
                heapq.heappush(heap, (ng, tie, t))
    return OracleResult(None, len(done))


def distances_from(domain, source, state_budget: int = 2_000_000) -> dict:
    """Full single-source shortest-path map (small spaces only)."""
    dist = {source: 0}
    heap = [(0, 0, source)]
    done = set()
    tie = 0
    while heap:
        g, _, s = heapq.heappop(heap)
        if s in done:
            continue
        done.add(s)
        if len(done) > state_budget:
            raise OracleBudgetError(f"state budget {state_budget} exhausted")
        for t, c in domain.successors(s):
            ng = g + c
            if ng < dist.get(t, ng + 1):
                dist[t] = ng
                tie += 1
                heapq.heappush(heap, (ng, tie, t))
    return dist


def verify_bound(result_cost: int, W, cstar: int) -> bool:
    return Fraction(result_cost) <= as_rational(W) * cstar
