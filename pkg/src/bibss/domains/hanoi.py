"""Four-peg Towers of Hanoi.

States are packed integers: disk ``i`` (0 = smallest) sits on peg
``(state >> 2*i) & 3``. A peg assignment alone fixes a legal stacking, so
every integer below ``4**n`` is a valid state.
"""
from __future__ import annotations

import random
from typing import List, Sequence, Tuple

from ..search import DomainInstance
from .base import Domain

PEGS = 4


def toh_successors(state: int, n_disks: int) -> List[Tuple[int, int]]:
    tops = [-1, -1, -1, -1]
    found = 0
    for i in range(n_disks):
        p = (state >> (2 * i)) & 3
        if tops[p] < 0:
            tops[p] = i
            found += 1
            if found == PEGS:
                break
    out = []
    for p in range(PEGS):
        i = tops[p]
        if i < 0:
            continue
        for q in range(PEGS):
            if q != p and (tops[q] < 0 or tops[q] > i):
                out.append((state ^ ((p ^ q) << (2 * i)), 1))
    return out


def from_pegs(pegs_largest_first: Sequence[int]) -> int:
    """Pack a peg list given largest disk first."""
    state = 0
    for i, p in enumerate(reversed(pegs_largest_first)):
        if not 0 <= p < PEGS:
            raise ValueError(f"peg index {p} out of range")
        state |= p << (2 * i)
    return state


def to_pegs(state: int, n_disks: int) -> Tuple[int, ...]:
    """Peg list, largest disk first."""
    return tuple((state >> (2 * i)) & 3 for i in reversed(range(n_disks)))


def partition_groups(n_disks: int, sizes: Sequence[int]) -> List[Tuple[int, ...]]:
    """Disk-index groups for an "(a+b+...)" partition, sizes listed largest disks first."""
    if sum(sizes) != n_disks or any(k <= 0 for k in sizes):
        raise ValueError(f"partition {tuple(sizes)} does not cover {n_disks} disks")
    groups = []
    hi = n_disks
    for k in sizes:
        groups.append(tuple(range(hi - k, hi)))
        hi -= k
    return groups


def parse_partition(text: str) -> Tuple[int, ...]:
    return tuple(int(x) for x in text.strip("() ").split("+"))


class TowersOfHanoi(Domain):
    name = "toh"

    def __init__(self, n_disks: int = 12, partition: Sequence[int] = (10, 2), cache_dir=None):
        self.n = n_disks
        self.partition = tuple(partition)
        self.groups = partition_groups(n_disks, self.partition)
        self.cache_dir = cache_dir
        self.goal = (1 << (2 * n_disks)) - 1  # every disk on peg 3

    def successors(self, state):
        return toh_successors(state, self.n)

    def heuristic_for(self, anchor: int):
        from ..pdb import build_pdb, make_additive

        tables = [build_pdb(g, anchor, cache_dir=self.cache_dir) for g in self.groups]
        return make_additive(tables, self.n)

    def heuristics(self, instance: DomainInstance):
        return self.heuristic_for(instance.goal), self.heuristic_for(instance.start)

    def state_count(self) -> int:
        return 4**self.n

    def is_valid(self, state) -> bool:
        return isinstance(state, int) and 0 <= state < (1 << (2 * self.n))

    def encode(self, state) -> int:
        return state

    def decode(self, code: int):
        return code

    def random_state(self, rng: random.Random) -> int:
        return rng.randrange(1 << (2 * self.n))
