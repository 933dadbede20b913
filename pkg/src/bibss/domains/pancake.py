from __future__ import annotations

import math
import random
from typing import Sequence

from ..search import DomainInstance
from .base import Domain


def gap_heuristic(s: Sequence[int], anchor: Sequence[int], k: int = 0) -> int:
    """GAP-k of ``s`` relative to the stacking ``anchor``.

    Counts neighbouring pairs of ``s`` (the plate below the bottom pancake
    counting as pancake N+1) that are not neighbours in ``anchor``. Pairs
    touching a pancake labelled ``<= k`` are ignored.
    """
    n = len(s)
    pos = {p: i for i, p in enumerate(anchor)}
    pos[n + 1] = n
    gaps = 0
    for i in range(n):
        a = s[i]
        b = s[i + 1] if i + 1 < n else n + 1
        if a <= k or b <= k:
            continue
        if abs(pos[a] - pos[b]) != 1:
            gaps += 1
    return gaps


def flip(s: tuple, length: int) -> tuple:
    return s[:length][::-1] + s[length:]


class Pancake(Domain):
    """N-pancake puzzle; states are permutations of 1..N listed top to bottom."""

    name = "pancake"

    def __init__(self, n: int = 18, gap_k: int = 0):
        self.n = n
        self.gap_k = gap_k
        self.goal = tuple(range(1, n + 1))

    def successors(self, state):
        return [(state[:k][::-1] + state[k:], 1) for k in range(2, self.n + 1)]

    def _closure(self, anchor):
        n, k = self.n, self.gap_k
        pos = [0] * (n + 2)
        for i, p in enumerate(anchor):
            pos[p] = i
        pos[n + 1] = n
        # adjacency matrix over labels 1..n+1, excluded labels never count
        adj = [[False] * (n + 2) for _ in range(n + 2)]
        for a in range(1, n + 2):
            for b in range(1, n + 2):
                adj[a][b] = a <= k or b <= k or abs(pos[a] - pos[b]) == 1
        plate = n + 1

        def h(s):
            gaps = 0
            prev = s[0]
            for cur in s[1:]:
                if not adj[prev][cur]:
                    gaps += 1
                prev = cur
            if not adj[prev][plate]:
                gaps += 1
            return gaps

        return h

    def heuristics(self, instance: DomainInstance):
        return self._closure(instance.goal), self._closure(instance.start)

    def state_count(self) -> int:
        return math.factorial(self.n)

    def is_valid(self, state) -> bool:
        return isinstance(state, tuple) and sorted(state) == list(range(1, self.n + 1))

    def encode(self, state) -> int:
        code = 0
        for p in reversed(state):
            code = code * (self.n + 1) + p
        return code

    def decode(self, code: int):
        out = []
        for _ in range(self.n):
            code, p = divmod(code, self.n + 1)
            out.append(p)
        return tuple(out)

    def random_state(self, rng: random.Random):
        s = list(self.goal)
        rng.shuffle(s)
        return tuple(s)
