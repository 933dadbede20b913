"""Additive pattern databases for four-peg Towers of Hanoi.

The abstract space of a disk group keeps only that group's disks. Because
every disk outside the group is removed, the space is exactly the ToH space
on ``len(group)`` disks, so tables are built by breadth-first search over
that smaller puzzle from the anchor's projection.

Cache file layout (little endian)::

    magic  4s  b"TPDB"
    version  B
    n_disks  B   size of the group
    mask     Q   bitmask of the group's disk indices
    anchor   Q   base-4 code of the anchor projection
    entries  4**n_disks unsigned bytes
"""
from __future__ import annotations

import functools
import hashlib
import os
import struct
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

from .domains.hanoi import toh_successors
from .policies import ConfigurationError

MAGIC = b"TPDB"
VERSION = 1
_HEADER = struct.Struct("<4sBBQQ")
MAX_GROUP = 12
UNREACHED = 255


class PdbResourceError(MemoryError):
    pass


@dataclass(frozen=True)
class PdbTable:
    group: Tuple[int, ...]
    anchor: int
    entries: bytes

    @property
    def mask(self) -> int:
        return sum(1 << d for d in self.group)

    def project(self, state: int) -> int:
        code = 0
        for j, d in enumerate(self.group):
            code |= ((state >> (2 * d)) & 3) << (2 * j)
        return code

    def lookup(self, state: int) -> int:
        return self.entries[self.project(state)]


def project(state: int, group: Sequence[int]) -> int:
    code = 0
    for j, d in enumerate(group):
        code |= ((state >> (2 * d)) & 3) << (2 * j)
    return code


@functools.lru_cache(maxsize=256)
def _bfs_table(m: int, anchor_code: int) -> bytes:
    if m > MAX_GROUP:
        raise PdbResourceError(f"group of {m} disks needs 4**{m} entries (limit {MAX_GROUP} disks)")
    dist = bytearray([UNREACHED]) * (4**m)
    dist[anchor_code] = 0
    queue = deque([anchor_code])
    while queue:
        s = queue.popleft()
        nd = dist[s] + 1
        for t, _ in toh_successors(s, m):
            if dist[t] == UNREACHED:
                if nd >= UNREACHED:
                    raise PdbResourceError("distance does not fit an 8-bit entry")
                dist[t] = nd
                queue.append(t)
    if UNREACHED in dist:
        raise RuntimeError("abstract space is not connected")
    return bytes(dist)


def _cache_path(cache_dir, group: Sequence[int], anchor_code: int) -> Path:
    mask = sum(1 << d for d in group)
    digest = hashlib.sha1(f"{mask}:{len(group)}:{anchor_code}".encode()).hexdigest()[:16]
    return Path(cache_dir) / f"toh-{len(group)}-{digest}.pdb"


def save_pdb(table: PdbTable, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, len(table.group), table.mask, table.anchor))
        fh.write(table.entries)
    os.replace(tmp, path)


def load_pdb(path) -> PdbTable:
    with open(path, "rb") as fh:
        magic, version, m, mask, anchor = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != MAGIC or version != VERSION:
            raise ValueError(f"{path}: not a version-{VERSION} PDB file")
        entries = fh.read()
    if len(entries) != 4**m:
        raise ValueError(f"{path}: expected {4**m} entries, found {len(entries)}")
    group = tuple(d for d in range(64) if mask >> d & 1)
    if len(group) != m:
        raise ValueError(f"{path}: group mask does not match group size")
    return PdbTable(group, anchor, entries)


def build_pdb(group: Sequence[int], anchor: int, cache_dir=None) -> PdbTable:
    """Exact abstract distances to ``anchor`` projected on ``group``.

    ``cache_dir`` (or ``$BSS_PDB_CACHE``) enables an on-disk cache.
    """
    group = tuple(sorted(group))
    anchor_code = project(anchor, group)
    cache_dir = cache_dir or os.environ.get("BSS_PDB_CACHE")
    path = _cache_path(cache_dir, group, anchor_code) if cache_dir else None
    if path is not None and path.exists():
        table = load_pdb(path)
        if table.group == group and table.anchor == anchor_code:
            return table
    table = PdbTable(group, anchor_code, _bfs_table(len(group), anchor_code))
    if path is not None:
        save_pdb(table, path)
    return table


def additive_h(state: int, tables: Sequence[PdbTable], n_disks: Optional[int] = None) -> int:
    if n_disks is not None:
        _check_partition(tables, n_disks)
    return sum(t.lookup(state) for t in tables)


def _check_partition(tables, n_disks):
    seen = set()
    for t in tables:
        if seen & set(t.group):
            raise ConfigurationError("PDB groups overlap")
        seen |= set(t.group)
    if seen != set(range(n_disks)):
        raise ConfigurationError(f"PDB groups do not cover all {n_disks} disks")


def make_additive(tables: Sequence[PdbTable], n_disks: int):
    """Fast ``state -> h`` closure; contiguous groups use shift and mask."""
    _check_partition(tables, n_disks)
    parts = []
    for t in tables:
        lo, m = t.group[0], len(t.group)
        if t.group != tuple(range(lo, lo + m)):
            parts = None
            break
        parts.append((2 * lo, (1 << (2 * m)) - 1, t.entries))
    if parts is None:
        return lambda s: sum(t.lookup(s) for t in tables)
    if len(parts) == 2:
        (s1, m1, e1), (s2, m2, e2) = parts
        return lambda s: e1[(s >> s1) & m1] + e2[(s >> s2) & m2]
    return lambda s: sum(e[(s >> sh) & mk] for sh, mk, e in parts)
