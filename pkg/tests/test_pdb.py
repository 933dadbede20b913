import random

import pytest

from bibss.domains import TowersOfHanoi, from_pegs
from bibss.domains.hanoi import partition_groups
from bibss.oracle import distances_from, optimal_cost
from bibss.pdb import (
    PdbResourceError,
    additive_h,
    build_pdb,
    load_pdb,
    make_additive,
    project,
    save_pdb,
)
from bibss.policies import ConfigurationError
from bibss.search import DomainInstance


def test_single_disk_tables():
    anchor = from_pegs((2,))
    t = build_pdb((0,), anchor)
    assert t.entries[2] == 0
    assert [t.entries[p] for p in (0, 1, 3)] == [1, 1, 1]


def test_three_disk_table_matches_oracle():
    # a group of the three smallest disks of a 3-disk puzzle is the full space
    dom = TowersOfHanoi(3, (3,))
    rng = random.Random(0)
    for _ in range(4):
        anchor = dom.random_state(rng)
        table = build_pdb((0, 1, 2), anchor)
        dist = distances_from(dom, anchor)
        assert len(dist) == 64
        assert all(table.entries[project(s, (0, 1, 2))] == c for s, c in dist.items())


def test_group_of_large_disks_is_an_abstraction():
    # disks 3..5 of a 6-disk puzzle behave like a 3-disk puzzle
    anchor = TowersOfHanoi(6, (3, 3)).goal
    big = build_pdb((3, 4, 5), anchor)
    small = build_pdb((0, 1, 2), anchor)
    assert big.entries == small.entries


def test_additive_properties():
    dom = TowersOfHanoi(4, (2, 2))
    rng = random.Random(5)
    tables = [build_pdb(g, dom.goal) for g in dom.groups]
    h = make_additive(tables, 4)
    assert additive_h(dom.goal, tables, 4) == 0 == h(dom.goal)
    for _ in range(100):
        s = dom.random_state(rng)
        assert h(s) == additive_h(s, tables, 4)
        assert h(s) <= optimal_cost(dom, DomainInstance("x", s, dom.goal)).cost
        for t, c in dom.successors(s):
            assert abs(h(s) - h(t)) <= c


def test_single_group_equals_lookup():
    dom = TowersOfHanoi(5, (5,))
    t = build_pdb(tuple(range(5)), dom.goal)
    s = from_pegs((0, 1, 2, 3, 0))
    assert additive_h(s, [t], 5) == t.lookup(s)


def test_partition_mismatch():
    dom = TowersOfHanoi(4, (2, 2))
    a = build_pdb((0, 1), dom.goal)
    b = build_pdb((1, 2, 3), dom.goal)
    with pytest.raises(ConfigurationError):
        additive_h(0, [a, b], 4)
    with pytest.raises(ConfigurationError):
        make_additive([a], 4)


def test_non_contiguous_groups_fall_back():
    dom = TowersOfHanoi(4, (2, 2))
    tables = [build_pdb((0, 2), dom.goal), build_pdb((1, 3), dom.goal)]
    h = make_additive(tables, 4)
    rng = random.Random(2)
    for _ in range(20):
        s = dom.random_state(rng)
        assert h(s) == sum(t.lookup(s) for t in tables)


def test_cache_roundtrip_and_determinism(tmp_path):
    anchor = from_pegs((1, 0, 3, 2, 2, 1))
    groups = partition_groups(6, (4, 2))
    first = [build_pdb(g, anchor, cache_dir=tmp_path) for g in groups]
    files = sorted(tmp_path.iterdir())
    assert len(files) == 2
    again = [build_pdb(g, anchor, cache_dir=tmp_path) for g in groups]
    assert [t.entries for t in first] == [t.entries for t in again]
    loaded = load_pdb(files[0])
    assert loaded.entries in (first[0].entries, first[1].entries)
    save_pdb(first[0], tmp_path / "copy.pdb")
    assert (tmp_path / "copy.pdb").read_bytes() in [f.read_bytes() for f in files]


def test_corrupt_cache_rejected(tmp_path):
    bad = tmp_path / "bad.pdb"
    bad.write_bytes(b"NOPE" + bytes(20))
    with pytest.raises(ValueError):
        load_pdb(bad)


def test_resource_limit():
    with pytest.raises(PdbResourceError):
        build_pdb(tuple(range(13)), 0)
