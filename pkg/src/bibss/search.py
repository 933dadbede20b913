"""Generic bidirectional best-first search loop.

One loop serves every algorithm: WA* runs the forward frontier alone and
treats the goal as the meeting point, the bidirectional algorithms differ
only in the key function, the direction policy and the termination bound
supplied by :mod:`bibss.policies`.
"""
from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Hashable, List, Optional

from .policies import (
    B,
    F,
    Algorithm,
    CompiledPolicy,
    ConfigurationError,
    DirectionPolicy,
    SearchConfig,
    choose_direction,
)

COST_MAX = 2**63 - 1

State = Hashable


class SearchLimitExceeded(RuntimeError):
    status = "limit"


class SearchTimeout(SearchLimitExceeded):
    status = "timeout"


class SearchMemoryLimit(SearchLimitExceeded):
    status = "memory"


@dataclass(frozen=True)
class DomainInstance:
    id: str
    start: Any
    goal: Any


@dataclass(slots=True)
class SearchNode:
    state: State
    g: int
    h_same: int
    h_opp: Optional[int]
    parent: Optional[State]
    status: str = "open"


class Frontier:
    """Open/closed bookkeeping for one search direction.

    Open entries live in a binary heap ordered by (key, -g, -seq), i.e.
    smallest key, then larger g, then most recent insertion. Re-keying pushes
    a fresh entry; entries whose g no longer matches the recorded g (or whose
    state has since closed) are stale and skipped. Auxiliary heaps track the
    minima of unweighted companion keys the same way.
    """

    def __init__(self, n_aux: int = 0):
        self._heap: list = []
        self._aux: List[list] = [[] for _ in range(n_aux)]
        self.g: dict = {}
        self.parent: dict = {}
        self.h: dict = {}
        self.key: dict = {}
        self.closed: set = set()
        self.trimmed: set = set()
        self.size = 0
        self._seq = 0

    def __len__(self) -> int:
        return self.size

    def is_open(self, state) -> bool:
        return state in self.g and state not in self.closed and state not in self.trimmed

    def is_closed(self, state) -> bool:
        return state in self.closed

    def push(self, state, g: int, key: int, parent, h_same: int, h_opp, aux=None) -> None:
        if state in self.closed:
            raise AssertionError(f"closed state {state!r} reinserted")
        if state not in self.g or state in self.trimmed:
            self.size += 1
            self.trimmed.discard(state)
        self.g[state] = g
        self.parent[state] = parent
        self.h[state] = (h_same, h_opp)
        self.key[state] = key
        self._seq += 1
        heapq.heappush(self._heap, (key, -g, -self._seq, state))
        if aux is not None:
            for heap, value in zip(self._aux, aux):
                heapq.heappush(heap, (value, g, state))

    def record_trimmed(self, state, g: int, parent, h_same: int, h_opp) -> None:
        """Remember a reached state (for U and the path) without opening it."""
        if self.is_open(state):
            self.size -= 1
        self.trimmed.add(state)
        self.g[state] = g
        self.parent[state] = parent
        self.h[state] = (h_same, h_opp)

    def _clean(self, heap, g_pos: int, negate: bool) -> None:
        closed, gs = self.closed, self.g
        while heap:
            entry = heap[0]
            st = entry[-1]
            g = -entry[g_pos] if negate else entry[g_pos]
            if st in closed or gs[st] != g:
                heapq.heappop(heap)
            else:
                return

    def peek_key(self) -> Optional[int]:
        self._clean(self._heap, 1, True)
        return self._heap[0][0] if self._heap else None

    def peek_aux(self, i: int) -> Optional[int]:
        heap = self._aux[i]
        self._clean(heap, 1, False)
        return heap[0][0] if heap else None

    def pop_best(self) -> SearchNode:
        self._clean(self._heap, 1, True)
        if not self._heap:
            raise IndexError("pop from an empty frontier")
        key, neg_g, _, state = heapq.heappop(self._heap)
        self.closed.add(state)
        self.size -= 1
        h_same, h_opp = self.h[state]
        return SearchNode(state, -neg_g, h_same, h_opp, self.parent[state], "closed")

    def open_items(self):
        """Yield (state, g, key) for every open state (full scan)."""
        for state, g in self.g.items():
            if state not in self.closed and state not in self.trimmed:
                yield state, g, self.key[state]


@dataclass
class BiSearchState:
    forward: Frontier
    backward: Frontier
    U: Optional[int] = None
    meet: Optional[State] = None
    last_direction: Optional[str] = None
    expansions_f: int = 0
    expansions_b: int = 0
    generated: int = 0

    def frontier(self, d: str) -> Frontier:
        return self.forward if d == F else self.backward


@dataclass
class SearchResult:
    cost: Optional[int]
    path: list
    expansions_f: int
    expansions_b: int
    generated: int
    terminal_lb: Optional[Fraction]
    wall_time: float
    status: str = "ok"
    meet: Optional[State] = None

    @property
    def expansions(self) -> int:
        return self.expansions_f + self.expansions_b


@dataclass
class SearchLimits:
    time_limit: Optional[float] = None
    max_nodes: Optional[int] = None
    check_every: int = 1024


def reconstruct_path(bss: BiSearchState, start=None, goal=None) -> list:
    """Forward parent chain start->meet followed by the backward chain meet->goal."""
    if bss.meet is None or bss.U is None:
        raise ValueError("no meeting point recorded")
    meet = bss.meet
    path = []
    s = meet
    seen = set()
    while s is not None:
        if s in seen or s not in bss.forward.parent:
            raise RuntimeError(f"broken forward parent chain at {s!r}")
        seen.add(s)
        path.append(s)
        s = bss.forward.parent[s]
    path.reverse()
    if meet in bss.backward.parent:
        s = bss.backward.parent[meet]
        seen = {meet}
        while s is not None:
            if s in seen or s not in bss.backward.parent:
                raise RuntimeError(f"broken backward parent chain at {s!r}")
            seen.add(s)
            path.append(s)
            s = bss.backward.parent[s]
    if start is not None and path[0] != start:
        raise RuntimeError("path does not begin at start")
    if goal is not None and path[-1] != goal:
        raise RuntimeError("path does not end at goal")
    return path


def _bound_parts(policy: CompiledPolicy, bss: BiSearchState, bidir: bool):
    """(base, alb) numerators over ``policy.Q``; None when a list is empty.

    ``alb`` is None unless the bound variant uses the alternative bound.
    """
    kf = bss.forward.peek_key()
    if kf is None:
        return None
    if bidir:
        kb = bss.backward.peek_key()
        if kb is None:
            return None
    else:
        kb = None
    base = policy.base_bound(kf, kb)
    alb = None
    if policy.n_aux:
        n = policy.n_aux
        af = [bss.forward.peek_aux(i) for i in range(n)]
        ab = [bss.backward.peek_aux(i) for i in range(n)] if bidir else None
        alb = policy.alb(af, ab)
    return base, alb


def _bound(policy: CompiledPolicy, bss: BiSearchState, bidir: bool) -> Optional[int]:
    """Current termination bound numerator over ``policy.Q``; None when a list is empty."""
    parts = _bound_parts(policy, bss, bidir)
    return None if parts is None else policy.finish(*parts)


def _bound_function(policy: CompiledPolicy, bss: BiSearchState, bidir: bool):
    """``_bound`` specialised for the common bidirectional, no-ALB case."""
    if policy.n_aux or not bidir:
        return lambda: _bound(policy, bss, bidir)
    peek_f, peek_b = bss.forward.peek_key, bss.backward.peek_key
    base, step = policy.base_bound, policy.step

    def bound():
        kf = peek_f()
        if kf is None:
            return None
        kb = peek_b()
        if kb is None:
            return None
        lb = base(kf, kb)
        if step:
            lb = -(-lb // step) * step
        return lb

    return bound


class _Expander:
    """Per-run, per-direction constants for successor relaxation."""

    def __init__(self, bss: BiSearchState, domain, policy: CompiledPolicy, heuristics,
                 goal=None, monitor=None):
        self.bss = bss
        self.successors = domain.successor_function()
        self.monitor = monitor
        self.goal = goal
        self.trim = policy.config.algorithm is Algorithm.WBS
        self.scale = policy.scale
        self.key_fn = policy.key_function()
        self.aux_fn = policy.aux_function()
        h_f, h_b = heuristics
        use_opp = policy.uses_opp_h
        self.sides = {
            F: (bss.forward, bss.backward, h_f, h_b if use_opp else None),
            B: (bss.backward, bss.forward, h_b, h_f if use_opp else None),
        }

    def __call__(self, node: SearchNode, d: str) -> None:
        bss = self.bss
        own, opp, h_same_fn, h_opp_fn = self.sides[d]
        key_fn, aux_fn = self.key_fn, self.aux_fn
        trim, scale, monitor = self.trim, self.scale, self.monitor
        unidir = self.goal is not None
        goal = self.goal
        own_g, own_closed, own_h = own.g, own.closed, own.h
        own_parent, own_key, own_trimmed, own_heap = own.parent, own.key, own.trimmed, own._heap
        heappush = heapq.heappush
        opp_g = opp.g
        g0 = node.g
        parent = node.state

        if d == F:
            bss.expansions_f += 1
        else:
            bss.expansions_b += 1
        if monitor is not None:
            monitor.on_expand(node, d)

        succ = self.successors(parent)
        bss.generated += len(succ)
        for s, c in succ:
            gs = g0 + c
            if s in own_closed:
                continue
            old = own_g.get(s)
            if old is not None and old <= gs:
                continue
            if gs > COST_MAX:
                raise OverflowError("path cost exceeds 64-bit range")
            U = bss.U
            if unidir:
                if s == goal and (U is None or gs < U):
                    bss.U = U = gs
                    bss.meet = s
            else:
                og = opp_g.get(s)
                if og is not None and (U is None or gs + og < U):
                    bss.U = U = gs + og
                    bss.meet = s
            cached = own_h.get(s)
            if cached is not None:
                hs, ho = cached
            else:
                hs = h_same_fn(s)
                ho = h_opp_fn(s) if h_opp_fn is not None else None
            key = key_fn(gs, hs, ho)
            if trim and U is not None and key >= U * scale:
                own.record_trimmed(s, gs, parent, hs, ho)
                continue
            # inlined Frontier.push (s is known not to be closed here)
            if old is None:
                own.size += 1
            elif s in own_trimmed:
                own.size += 1
                own_trimmed.discard(s)
            own_g[s] = gs
            own_parent[s] = parent
            own_h[s] = (hs, ho)
            own_key[s] = key
            own._seq += 1
            heappush(own_heap, (key, -gs, -own._seq, s))
            if aux_fn is not None:
                for heap, value in zip(own._aux, aux_fn(gs, hs, ho)):
                    heappush(heap, (value, gs, s))
            if monitor is not None:
                monitor.on_insert(d, s, gs, hs, ho, key)


def expand_node(bss: BiSearchState, node: SearchNode, d: str, domain, policy: CompiledPolicy,
                heuristics, goal=None, monitor=None) -> None:
    """Generate the successors of ``node`` in direction ``d`` and update U.

    Successors closed in ``d`` or already reached with an equal or smaller g
    are skipped (they still count as generated). ``heuristics`` is the
    (h_forward, h_backward) pair for the instance. For unidirectional search
    pass ``goal``: U is then updated when the goal is generated.
    """
    _Expander(bss, domain, policy, heuristics, goal, monitor)(node, d)


def _direction_chooser(policy: DirectionPolicy, bss: BiSearchState):
    if policy is DirectionPolicy.ALTERNATE:
        return lambda: B if bss.last_direction == F else F
    if policy is DirectionPolicy.CARDINALITY:
        fw, bw = bss.forward, bss.backward
        return lambda: F if fw.size <= bw.size else B
    return lambda: choose_direction(policy, bss)


def run_search(config: SearchConfig, domain, instance: DomainInstance, *,
               limits: Optional[SearchLimits] = None, monitor=None) -> SearchResult:
    """Run one bounded-suboptimal search and return its result.

    The domain's edge-cost GCD and minimum edge cost override the ones in
    ``config``. Raises :class:`SearchTimeout` / :class:`SearchMemoryLimit`
    when ``limits`` are exceeded.
    """
    if not isinstance(config, SearchConfig):
        raise ConfigurationError("config must be a SearchConfig")
    config = config.with_domain_costs(domain.iota, domain.epsilon)
    policy = CompiledPolicy(config)
    t0 = time.perf_counter()
    start, goal = instance.start, instance.goal
    bidir = config.bidirectional
    heuristics = domain.heuristics(instance)
    h_f, h_b = heuristics
    key_fn = policy.key_function()
    aux_fn = policy.aux_function()

    bss = BiSearchState(Frontier(policy.n_aux), Frontier(policy.n_aux))
    if monitor is not None:
        monitor.begin(config, policy, bss, domain, instance)

    def seed(front: Frontier, d: str, s, h_same, h_opp):
        ho = h_opp if policy.uses_opp_h else None
        key = key_fn(0, h_same, ho)
        front.push(s, 0, key, None, h_same, ho, aux_fn(0, h_same, ho) if aux_fn else None)
        if monitor is not None:
            monitor.on_insert(d, s, 0, h_same, ho, key)

    seed(bss.forward, F, start, h_f(start), h_b(start))
    if bidir:
        seed(bss.backward, B, goal, h_b(goal), h_f(goal))
    if start == goal:
        bss.U = 0
        bss.meet = start

    limits = limits or SearchLimits()
    deadline = None if limits.time_limit is None else t0 + limits.time_limit
    check_every = max(1, limits.check_every)
    max_nodes = limits.max_nodes
    expand = _Expander(bss, domain, policy, heuristics, None if bidir else goal, monitor)
    choose = _direction_chooser(config.direction, bss)
    nip = config.algorithm is Algorithm.WBS
    Q = policy.Q
    fw, bw = bss.forward, bss.backward
    it = 0

    bound = _bound_function(policy, bss, bidir)
    lb = bound()
    while lb is not None and (bss.U is None or bss.U * Q > lb):
        if monitor is not None:
            monitor.on_iteration(bss, lb)
            if policy.n_aux:
                monitor.on_bounds(*_bound_parts(policy, bss, bidir))
        it += 1
        if it % check_every == 0:
            if deadline is not None and time.perf_counter() > deadline:
                raise SearchTimeout(f"time limit {limits.time_limit}s exceeded")
            if max_nodes is not None and len(fw.g) + len(bw.g) > max_nodes:
                raise SearchMemoryLimit(f"node limit {max_nodes} exceeded")
        if bidir:
            d = choose()
            bss.last_direction = d
        else:
            d = F
        node = (fw if d == F else bw).pop_best()
        if monitor is not None:
            monitor.on_pop(d, node)
        # nipping: the opposite search already expanded this state
        if not (nip and node.state in (bw if d == F else fw).closed):
            expand(node, d)
        lb = bound()

    wall = time.perf_counter() - t0
    terminal_lb = None if lb is None else policy.to_fraction(lb)
    if bss.U is None:
        result = SearchResult(None, [], bss.expansions_f, bss.expansions_b, bss.generated,
                              terminal_lb, wall, "unsolvable")
    else:
        path = reconstruct_path(bss, start, goal)
        result = SearchResult(bss.U, path, bss.expansions_f, bss.expansions_b, bss.generated,
                              terminal_lb, wall, "ok", bss.meet)
    if monitor is not None:
        monitor.end(bss, result)
    return result
