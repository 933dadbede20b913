"""Sliding-tile puzzle with unit or heavy (tile-label) move costs."""
from __future__ import annotations

import math
import random
from typing import FrozenSet, Iterable, List, Sequence, Tuple

from ..search import DomainInstance
from .base import Domain

UNIT = "unit"
HEAVY = "heavy"


def _neighbors(n: int) -> List[Tuple[int, ...]]:
    moves = []
    for pos in range(n * n):
        r, c = divmod(pos, n)
        nb = []
        if r > 0:
            nb.append(pos - n)
        if r < n - 1:
            nb.append(pos + n)
        if c > 0:
            nb.append(pos - 1)
        if c < n - 1:
            nb.append(pos + 1)
        moves.append(tuple(nb))
    return moves


def center_tiles(goal: Sequence[int]) -> FrozenSet[int]:
    """Tiles whose goal cells are the four centre cells of an even board."""
    n = int(round(len(goal) ** 0.5))
    if n % 2 or n < 4:
        raise ValueError("centre-tile exclusion needs an even board of width >= 4")
    h = n // 2
    cells = [(h - 1) * n + h - 1, (h - 1) * n + h, h * n + h - 1, h * n + h]
    return frozenset(goal[c] for c in cells if goal[c] != 0)


def md_heuristic(s: Sequence[int], anchor: Sequence[int], cost_model: str = UNIT,
                 excluded: Iterable[int] = ()) -> int:
    """Manhattan distance of ``s`` to ``anchor``, optionally weighted by tile label."""
    n = int(round(len(s) ** 0.5))
    where = {t: i for i, t in enumerate(anchor)}
    skip = set(excluded)
    total = 0
    for pos, t in enumerate(s):
        if t == 0 or t in skip:
            continue
        r1, c1 = divmod(pos, n)
        r2, c2 = divmod(where[t], n)
        d = abs(r1 - r2) + abs(c1 - c2)
        total += d * t if cost_model == HEAVY else d
    return total


class SlidingTile(Domain):
    """``width``x``width`` puzzle; states are tuples of tile labels, 0 is the blank.

    ``heuristic`` is ``"md"`` or ``"md-4"`` (centre tiles ignored).
    """

    def __init__(self, width: int = 4, cost_model: str = UNIT, heuristic: str = "md"):
        if cost_model not in (UNIT, HEAVY):
            raise ValueError(f"unknown cost model {cost_model!r}")
        if heuristic not in ("md", "md-4"):
            raise ValueError(f"unknown STP heuristic {heuristic!r}")
        self.width = width
        self.size = width * width
        self.cost_model = cost_model
        self.heuristic_name = heuristic
        self.name = "stp-heavy" if cost_model == HEAVY else "stp"
        self._moves = _neighbors(width)
        self.goal = tuple(range(self.size))

    def successors(self, state):
        blank = state.index(0)
        heavy = self.cost_model == HEAVY
        out = []
        for nb in self._moves[blank]:
            lst = list(state)
            t = lst[nb]
            lst[blank] = t
            lst[nb] = 0
            out.append((tuple(lst), t if heavy else 1))
        return out

    def _table(self, anchor, excluded):
        n = self.width
        where = {t: i for i, t in enumerate(anchor)}
        heavy = self.cost_model == HEAVY
        table = [[0] * self.size for _ in range(self.size)]
        for t in range(1, self.size):
            if t in excluded:
                continue
            r2, c2 = divmod(where[t], n)
            w = t if heavy else 1
            for pos in range(self.size):
                r1, c1 = divmod(pos, n)
                table[t][pos] = w * (abs(r1 - r2) + abs(c1 - c2))
        return table

    def heuristics(self, instance: DomainInstance):
        excluded = center_tiles(instance.goal) if self.heuristic_name == "md-4" else frozenset()
        tf = self._table(instance.goal, excluded)
        tb = self._table(instance.start, excluded)

        def h_forward(s, _t=tf):
            return sum([_t[tile][pos] for pos, tile in enumerate(s)])

        def h_backward(s, _t=tb):
            return sum([_t[tile][pos] for pos, tile in enumerate(s)])

        return h_forward, h_backward

    def state_count(self) -> int:
        return math.factorial(self.size) // 2

    def is_valid(self, state) -> bool:
        return isinstance(state, tuple) and sorted(state) == list(range(self.size))

    def is_solvable(self, start, goal=None) -> bool:
        goal = self.goal if goal is None else goal
        return self._parity(start) == self._parity(goal)

    def _parity(self, s) -> int:
        tiles = [t for t in s if t]
        inv = sum(1 for i in range(len(tiles)) for j in range(i + 1, len(tiles)) if tiles[i] > tiles[j])
        if self.width % 2:
            return inv % 2
        row = s.index(0) // self.width
        return (inv + row) % 2

    def encode(self, state) -> int:
        code = 0
        for t in reversed(state):
            code = (code << 4) | t
        return code

    def decode(self, code: int):
        return tuple((code >> (4 * i)) & 0xF for i in range(self.size))

    def scramble(self, steps: int, rng: random.Random):
        return self.random_walk(self.goal, steps, rng)

    def random_state(self, rng: random.Random):
        """Uniform random state in the goal's solvability class."""
        while True:
            s = list(range(self.size))
            rng.shuffle(s)
            s = tuple(s)
            if self.is_solvable(s):
                return s
