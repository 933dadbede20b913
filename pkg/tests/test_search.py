import random
from fractions import Fraction as Fr

import pytest

from bibss import Algorithm, BoundVariant, SearchConfig, SearchLimits, run_search
from bibss.checks import InvariantMonitor
from bibss.domains import Pancake, SlidingTile
from bibss.domains.base import Domain
from bibss.oracle import optimal_cost
from bibss.policies import CompiledPolicy, ConfigurationError, F, B
from bibss.search import (
    BiSearchState,
    DomainInstance,
    Frontier,
    SearchMemoryLimit,
    SearchNode,
    SearchTimeout,
    expand_node,
    reconstruct_path,
)

ALL_ALGS = list(Algorithm)


class LineGraph(Domain):
    """0 - 1 - ... - (n-1) with unit costs and exact distance heuristics."""

    def __init__(self, n, broken=None):
        self.n, self.broken = n, broken

    def successors(self, s):
        out = []
        for t in (s - 1, s + 1):
            if 0 <= t < self.n and {s, t} != self.broken:
                out.append((t, 1))
        return out

    def heuristics(self, inst):
        return (lambda s: abs(inst.goal - s)), (lambda s: abs(inst.start - s))

    def is_valid(self, s):
        return 0 <= s < self.n


def config(alg, W=1, lam=0, bound=BoundVariant.BASE):
    return SearchConfig(alg, W, lam if alg is Algorithm.WBAE else 0, bound=bound)


@pytest.mark.parametrize("alg", ALL_ALGS)
def test_start_equals_goal(alg):
    d = Pancake(4)
    inst = DomainInstance("id", d.goal, d.goal)
    res = run_search(config(alg, 2, 1), d, inst)
    assert res.cost == 0 and res.path == [d.goal] and res.expansions == 0


@pytest.mark.parametrize("alg", ALL_ALGS)
def test_single_flip(alg):
    d = Pancake(4)
    inst = DomainInstance("id", (2, 1, 3, 4), d.goal)
    res = run_search(config(alg, 1, 1), d, inst)
    assert res.cost == 1
    assert res.path == [(2, 1, 3, 4), (1, 2, 3, 4)]
    assert d.path_cost(res.path) == 1


@pytest.mark.parametrize("alg", ALL_ALGS)
def test_unsolvable(alg):
    d = LineGraph(6, broken={2, 3})
    res = run_search(config(alg), d, DomainInstance("x", 0, 5))
    assert res.cost is None and res.status == "unsolvable" and res.path == []


def test_bwa_w2_on_random_8_puzzles():
    d = SlidingTile(3)
    rng = random.Random(5)
    for i in range(100):
        inst = DomainInstance(str(i), d.random_state(rng), d.goal)
        cstar = optimal_cost(d, inst).cost
        res = run_search(config(Algorithm.BWA, 2), d, inst)
        assert Fr(res.cost) <= 2 * cstar


@pytest.mark.parametrize("alg", ALL_ALGS)
@pytest.mark.parametrize("W", [Fr(1), Fr(6, 5), Fr(2), Fr(10)])
def test_monitored_runs_on_pancakes(alg, W):
    d = Pancake(7)
    rng = random.Random(11)
    for i in range(8):
        inst = DomainInstance(str(i), d.random_state(rng), d.goal)
        cstar = optimal_cost(d, inst).cost
        for bound in BoundVariant:
            mon = InvariantMonitor(cstar=cstar, scan_every=1)
            res = run_search(config(alg, W, W / 2, bound), d, inst, monitor=mon)
            assert mon.ok, dict(mon.violations)
            assert Fr(res.cost) <= W * cstar
            if W == 1:
                assert res.cost == cstar


def test_invalid_config_rejected():
    with pytest.raises(ConfigurationError):
        SearchConfig(Algorithm.WBAE, 2, 3)
    with pytest.raises(ConfigurationError):
        run_search("not a config", Pancake(4), DomainInstance("x", (1, 2, 3, 4), (1, 2, 3, 4)))


def test_overflow_is_an_error():
    class Huge(LineGraph):
        def successors(self, s):
            return [(t, 2**62) for t, _ in super().successors(s)]

        def heuristics(self, inst):
            return (lambda s: 0), (lambda s: 0)

    with pytest.raises(OverflowError):
        run_search(config(Algorithm.BWA), Huge(5), DomainInstance("x", 0, 4))


def test_limits():
    d = SlidingTile(4)
    rng = random.Random(1)
    inst = DomainInstance("hard", d.random_state(rng), d.goal)
    with pytest.raises(SearchMemoryLimit):
        run_search(config(Algorithm.BWA), d, inst, limits=SearchLimits(max_nodes=500, check_every=16))
    with pytest.raises(SearchTimeout):
        run_search(config(Algorithm.BWA), d, inst, limits=SearchLimits(time_limit=0.01, check_every=16))


# ------------------------------------------------------------------ frontier

def test_pop_prefers_higher_g():
    f = Frontier()
    f.push("a", 2, 5, None, 3, None)
    f.push("b", 4, 5, None, 1, None)
    assert f.pop_best().state == "b"


def test_pop_lifo_on_full_tie():
    f = Frontier()
    f.push("t0", 1, 3, None, 2, None)
    f.push("t1", 1, 3, None, 2, None)
    assert f.pop_best().state == "t1"
    assert f.pop_best().state == "t0"
    with pytest.raises(IndexError):
        f.pop_best()


def test_rekey_and_stale_entries():
    f = Frontier(n_aux=1)
    f.push("a", 5, 9, None, 4, None, aux=(9,))
    f.push("b", 3, 8, None, 5, None, aux=(8,))
    f.push("a", 2, 6, "p", 4, None, aux=(6,))  # better g re-keys a
    assert f.size == 2 and f.peek_key() == 6 and f.peek_aux(0) == 6
    node = f.pop_best()
    assert (node.state, node.g, node.parent, node.status) == ("a", 2, "p", "closed")
    assert f.peek_key() == 8 and f.peek_aux(0) == 8 and f.size == 1
    with pytest.raises(AssertionError):
        f.push("a", 1, 1, None, 0, None)


def test_trimmed_states_are_reachable_but_not_open():
    f = Frontier()
    f.record_trimmed("x", 4, "p", 1, None)
    assert not f.is_open("x") and f.size == 0 and f.g["x"] == 4
    f.push("x", 3, 7, "q", 1, None)
    assert f.is_open("x") and f.size == 1


# ------------------------------------------------------------------ expansion

def _bss(n_aux=0):
    return BiSearchState(Frontier(n_aux), Frontier(n_aux))


def test_expand_stp_start_generates_blank_moves():
    d = SlidingTile(4)
    inst = DomainInstance("x", d.goal, d.goal)
    policy = CompiledPolicy(SearchConfig(Algorithm.BWA))
    for blank_cell, n in ((0, 2), (1, 3), (5, 4)):
        s = list(d.goal)
        s[0], s[blank_cell] = s[blank_cell], s[0]
        bss = _bss()
        node = SearchNode(tuple(s), 0, 0, None, None, "closed")
        bss.forward.closed.add(node.state)
        expand_node(bss, node, F, d, policy, d.heuristics(inst))
        assert bss.generated == n == bss.forward.size


def test_expand_skips_closed_but_counts_generation():
    d = LineGraph(5)
    inst = DomainInstance("x", 0, 4)
    policy = CompiledPolicy(SearchConfig(Algorithm.BWA))
    bss = _bss()
    bss.forward.closed.update({0, 2})
    bss.forward.g.update({0: 0, 2: 2})
    expand_node(bss, SearchNode(1, 1, 3, None, 0, "closed"), F, d, policy, d.heuristics(inst))
    assert bss.generated == 2 and bss.forward.size == 0


def test_expand_updates_u_from_opposite_frontier():
    d = LineGraph(10)
    inst = DomainInstance("x", 0, 9)
    policy = CompiledPolicy(SearchConfig(Algorithm.BWA))
    bss = _bss()
    bss.backward.push(4, 5, 50, 5, 4, None)
    expand_node(bss, SearchNode(3, 3, 6, None, None, "closed"), F, d, policy, d.heuristics(inst))
    assert bss.U == 9 and bss.meet == 4


# ------------------------------------------------------------------ paths

def test_reconstruct_identity_and_forward_only():
    bss = _bss()
    bss.forward.push("s", 0, 0, None, 0, None)
    bss.U, bss.meet = 0, "s"
    assert reconstruct_path(bss, "s", "s") == ["s"]
    bss = _bss()
    for s, p in (("s", None), ("m", "s"), ("g", "m")):
        bss.forward.push(s, 0, 0, p, 0, None)
    bss.U, bss.meet = 2, "g"
    assert reconstruct_path(bss, "s", "g") == ["s", "m", "g"]


def test_reconstruct_broken_chain():
    bss = _bss()
    bss.forward.push("m", 1, 0, "ghost", 0, None)
    bss.U, bss.meet = 1, "m"
    with pytest.raises(RuntimeError):
        reconstruct_path(bss)


def test_wastar_is_forward_only():
    d = Pancake(6)
    inst = DomainInstance("x", (3, 1, 2, 6, 5, 4), d.goal)
    res = run_search(config(Algorithm.WASTAR, 1), d, inst)
    assert res.expansions_b == 0 and res.cost == optimal_cost(d, inst).cost
