"""Eight-connected grid pathfinding on octile benchmark maps.

Costs are doubled so they stay integral: a straight step costs 2 and a
diagonal step 3. Diagonal moves need both orthogonal neighbours passable.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from ..search import DomainInstance
from .base import Domain

PASSABLE = frozenset(".G")
BLOCKED = frozenset("@OTW")
STRAIGHT = 2
DIAGONAL = 3


class MapFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioEntry:
    bucket: int
    map_name: str
    width: int
    height: int
    start: Tuple[int, int]
    goal: Tuple[int, int]
    optimal: float


def parse_map(text: str, source: str = "<map>") -> List[str]:
    lines = text.splitlines()
    header = {}
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line:
            continue
        if line == "map":
            break
        parts = line.split()
        if len(parts) != 2:
            raise MapFormatError(f"{source}:{i}: bad header line {line!r}")
        header[parts[0]] = parts[1]
    else:
        raise MapFormatError(f"{source}: missing 'map' line")
    if header.get("type") != "octile":
        raise MapFormatError(f"{source}: unsupported map type {header.get('type')!r}")
    try:
        h, w = int(header["height"]), int(header["width"])
    except (KeyError, ValueError) as exc:
        raise MapFormatError(f"{source}: missing or bad height/width") from exc
    rows = lines[i:i + h]
    if len(rows) != h:
        raise MapFormatError(f"{source}: expected {h} rows, found {len(rows)}")
    for r, row in enumerate(rows):
        row = row.rstrip("\r")
        if len(row) != w:
            raise MapFormatError(f"{source}:{i + r + 1}: expected width {w}, got {len(row)}")
        bad = set(row) - PASSABLE - BLOCKED
        if bad:
            raise MapFormatError(f"{source}:{i + r + 1}: unknown map characters {sorted(bad)}")
        rows[r] = row
    return rows


def load_map(path) -> List[str]:
    path = Path(path)
    return parse_map(path.read_text(), str(path))


def format_map(rows: Sequence[str]) -> str:
    return "type octile\nheight {}\nwidth {}\nmap\n{}\n".format(len(rows), len(rows[0]), "\n".join(rows))


def parse_scenario(text: str, source: str = "<scen>") -> List[ScenarioEntry]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0] == "version":
            continue
        if len(parts) != 9:
            raise MapFormatError(f"{source}:{lineno}: expected 9 fields, got {len(parts)}")
        try:
            b, name, w, h, sx, sy, gx, gy = parts[0], parts[1], *map(int, parts[2:8])
            out.append(ScenarioEntry(int(b), name, w, h, (sx, sy), (gx, gy), float(parts[8])))
        except ValueError as exc:
            raise MapFormatError(f"{source}:{lineno}: {exc}") from exc
    return out


def octile_heuristic(a: Tuple[int, int], b: Tuple[int, int]) -> int:
    if a == b:
        return 0
    dx, dy = abs(a[0] - b[0]), abs(a[1] - b[1])
    lo, hi = (dx, dy) if dx < dy else (dy, dx)
    return max(DIAGONAL * lo + STRAIGHT * (hi - lo), STRAIGHT)


def random_map(width: int, height: int, density: float, rng: random.Random) -> List[str]:
    return ["".join("@" if rng.random() < density else "." for _ in range(width)) for _ in range(height)]


class Grid(Domain):
    name = "grid"
    iota = 1
    epsilon = STRAIGHT

    def __init__(self, rows: Sequence[str], name: Optional[str] = None):
        self.rows = list(rows)
        self.height = len(rows)
        self.width = len(rows[0]) if rows else 0
        self.map_name = name
        self._free = [[c in PASSABLE for c in row] for row in self.rows]

    def passable(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height and self._free[y][x]

    def successors(self, state):
        x, y = state
        free = self.passable
        out = []
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            if free(x + dx, y + dy):
                out.append(((x + dx, y + dy), STRAIGHT))
        for dx, dy in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            if free(x + dx, y + dy) and free(x + dx, y) and free(x, y + dy):
                out.append(((x + dx, y + dy), DIAGONAL))
        return out

    def heuristics(self, instance: DomainInstance):
        gx, gy = instance.goal
        sx, sy = instance.start

        def anchored(ax, ay):
            def h(s):
                dx, dy = abs(s[0] - ax), abs(s[1] - ay)
                if dx < dy:
                    v = DIAGONAL * dx + STRAIGHT * (dy - dx)
                else:
                    v = DIAGONAL * dy + STRAIGHT * (dx - dy)
                if v == 0:
                    return 0
                return v if v > STRAIGHT else STRAIGHT
            return h

        return anchored(gx, gy), anchored(sx, sy)

    def state_count(self) -> int:
        return self.width * self.height

    def is_valid(self, state) -> bool:
        return isinstance(state, tuple) and len(state) == 2 and self.passable(*state)

    def encode(self, state) -> int:
        return state[1] * self.width + state[0]

    def decode(self, code: int):
        return (code % self.width, code // self.width)

    def free_cells(self) -> List[Tuple[int, int]]:
        return [(x, y) for y in range(self.height) for x in range(self.width) if self._free[y][x]]

    def component_of(self, cell) -> set:
        seen = {cell}
        stack = [cell]
        while stack:
            c = stack.pop()
            for s, _ in self.successors(c):
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        return seen
