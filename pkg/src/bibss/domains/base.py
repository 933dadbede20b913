from __future__ import annotations

import random
from typing import Callable, Iterable, List, Optional, Tuple

from ..search import DomainInstance

Heuristic = Callable[[object], int]

MEMO_LIMIT = 300_000


class Domain:
    """Undirected state space with a pair of front-to-end heuristics.

    Costs are integers. ``iota`` is the GCD of all edge costs and ``epsilon``
    the minimum edge cost. Subclasses implement :meth:`successors` and
    :meth:`heuristics`; the latter is called once per instance because the
    backward heuristic is anchored at that instance's start.
    """

    name = "domain"
    iota = 1
    epsilon = 1

    def successors(self, state) -> List[Tuple[object, int]]:
        raise NotImplementedError

    def state_count(self) -> Optional[int]:
        """Size of the state space, if known."""
        return None

    def successor_function(self) -> Callable:
        """``successors`` memoised on the domain when the space is small.

        The cache outlives a single search, which pays off when many
        configurations run on the same instances. Results are shared tuples.
        """
        n = self.state_count()
        if n is None or n > MEMO_LIMIT:
            return self.successors
        cache = self.__dict__.setdefault("_succ_memo", {})
        succ = self.successors

        def cached(s):
            r = cache.get(s)
            if r is None:
                r = cache[s] = tuple(succ(s))
            return r

        return cached

    def __getstate__(self):
        state = self.__dict__.copy()
        state.pop("_succ_memo", None)
        return state

    def heuristics(self, instance: DomainInstance) -> Tuple[Heuristic, Heuristic]:
        raise NotImplementedError

    def is_valid(self, state) -> bool:
        raise NotImplementedError

    def encode(self, state) -> int:
        raise NotImplementedError

    def decode(self, code: int):
        raise NotImplementedError

    def edge_cost(self, a, b) -> int:
        for s, c in self.successors(a):
            if s == b:
                return c
        raise ValueError(f"no edge {a!r} -> {b!r}")

    def path_cost(self, path: Iterable) -> int:
        path = list(path)
        return sum(self.edge_cost(a, b) for a, b in zip(path, path[1:]))

    def random_walk(self, state, steps: int, rng: random.Random):
        """Random walk that avoids stepping straight back."""
        prev = None
        for _ in range(steps):
            succ = [s for s, _ in self.successors(state) if s != prev]
            if not succ:
                succ = [s for s, _ in self.successors(state)]
            prev, state = state, rng.choice(succ)
        return state
