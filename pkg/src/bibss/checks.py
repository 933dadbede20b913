"""Debug-mode invariant monitor for :func:`bibss.search.run_search`.

Pass an :class:`InvariantMonitor` as ``monitor=`` to record violations of the
runtime invariants. Bounds are recomputed by a full frontier scan with the
Fraction-valued policy functions, independently of the integer route the
search loop uses.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Optional

from .policies import (
    Algorithm,
    BoundState,
    alb_bound,
    combined_bound,
    key_bwa,
    key_wbae,
    key_wmm,
    lower_bound,
)


class InvariantMonitor:
    def __init__(self, cstar: Optional[int] = None, scan_every: int = 1,
                 check_lb_monotone: Optional[bool] = None, strict: bool = False):
        self.cstar = cstar
        self.scan_every = scan_every
        self.check_lb_monotone = check_lb_monotone
        self.strict = strict
        self.violations = defaultdict(list)
        self.counts = defaultdict(int)

    # ------------------------------------------------------------ plumbing
    def _fail(self, kind: str, msg: str) -> None:
        self.violations[kind].append(msg)
        if self.strict:
            raise AssertionError(f"{kind}: {msg}")

    @property
    def ok(self) -> bool:
        return not any(self.violations.values())

    def begin(self, config, policy, bss, domain, instance) -> None:
        self.config = config
        self.policy = policy
        self.domain = domain
        self.instance = instance
        self.expanded = set()
        self.prev_U = None
        self.prev_lb = None
        self.iteration = 0
        self._insert_checks = 0
        self._bound_checks = 0
        self.__dict__.pop("on_insert", None)
        if config.algorithm is not Algorithm.WBAE:
            self.on_insert = self._ignore_insert  # the only insert-time check is WBAE*'s
        if self.check_lb_monotone is None:
            self._lb_mono = config.W == 1
        else:
            self._lb_mono = self.check_lb_monotone

    # ------------------------------------------------------------ hooks
    def _ignore_insert(self, d, state, g, h, h_opp, key) -> None:
        pass

    def on_insert(self, d, state, g, h, h_opp, key) -> None:
        """WBAE* keys never exceed W times the unweighted key 2g + h - h_opp, as integers over the key scale."""
        self._insert_checks += 1
        c = self.config
        b = 2 * g + h - h_opp
        if key * c.W.denominator > c.W.numerator * self.policy.scale * b:
            self._fail("insert_bound", f"{d} {state!r}: b_W={Fraction(key, self.policy.scale)} > W*b={c.W * b}")

    def on_pop(self, d, node) -> None:
        pass

    def on_expand(self, node, d) -> None:
        k = (node.state, d)
        if k in self.expanded:
            self._fail("reexpansion", f"{d} {node.state!r} expanded twice")
        self.expanded.add(k)
        c = self.config
        if c.algorithm is Algorithm.WMM and self.cstar is not None:
            if 2 * node.g > c.W * self.cstar:
                self._fail("wmm_restraint", f"{d} {node.state!r}: g={node.g} > W/2*C*={c.W * self.cstar / 2}")

    def on_iteration(self, bss, lb: int) -> None:
        """``lb`` is the integer-route bound numerator over ``policy.Q``."""
        self.iteration += 1
        c = self.config
        if self.prev_U is not None and bss.U is not None and bss.U > self.prev_U:
            self._fail("u_monotone", f"U rose from {self.prev_U} to {bss.U}")
        self.prev_U = bss.U
        if self._lb_mono and self.prev_lb is not None and lb < self.prev_lb:
            self._fail("lb_monotone", f"LB fell from {self.policy.to_fraction(self.prev_lb)} "
                                      f"to {self.policy.to_fraction(lb)}")
        self.prev_lb = lb
        if self.cstar is not None:
            self._bound_checks += 1
            # lb / Q <= W * C*
            if lb * c.W.denominator > c.W.numerator * self.cstar * self.policy.Q:
                self._fail("bound_safety", f"LB={self.policy.to_fraction(lb)} > W*C*={c.W * self.cstar}")
        if self.scan_every and self.iteration % self.scan_every == 0:
            self._scan(bss, self.policy.to_fraction(lb))

    def on_bounds(self, base: int, alb: int) -> None:
        """Integer-route ALB dominance check, every iteration of ALB runs."""
        self.counts["alb_checks"] += 1
        if alb < base:
            self._fail("alb_dominance", f"ALB {self.policy.to_fraction(alb)} < base "
                                        f"{self.policy.to_fraction(base)}")

    def end(self, bss, result) -> None:
        self.counts["insert_bound_checks"] += self._insert_checks
        self.counts["bound_checks"] += self._bound_checks
        self.counts["expansions"] += len(self.expanded)
        if result.cost is None:
            return
        path = result.path
        if path[0] != self.instance.start or path[-1] != self.instance.goal:
            self._fail("path", "path endpoints do not match the instance")
        try:
            total = self.domain.path_cost(path)
        except ValueError as exc:
            self._fail("path", str(exc))
            return
        if total != result.cost:
            self._fail("path", f"path cost {total} != reported {result.cost}")
        if self.cstar is not None and result.cost > self.config.W * self.cstar:
            self._fail("suboptimality", f"cost {result.cost} > W*C* = {self.config.W * self.cstar}")

    # ------------------------------------------------------------ full scan
    def _key(self, g, h, ho) -> Fraction:
        c = self.config
        if c.algorithm is Algorithm.WBAE:
            return key_wbae(g, h, ho, c.W, c.lam)
        if c.algorithm is Algorithm.WMM:
            return key_wmm(g, h, c.W)
        return key_bwa(g, h, c.W)

    def _scan_frontier(self, front):
        keys, f, b, gs, mm = [], [], [], [], []
        for state, g, key in front.open_items():
            h, ho = front.h[state]
            exact = self._key(g, h, ho)
            if exact * self.policy.scale != key:
                self._fail("key_route", f"{state!r}: int key {key} != {exact} * {self.policy.scale}")
            keys.append(exact)
            f.append(g + h)
            gs.append(g)
            mm.append(max(g + h, 2 * g))
            if ho is not None:
                b.append(2 * g + h - ho)
        if len(keys) != front.size:
            self._fail("frontier", f"open count {front.size} != scanned {len(keys)}")
        if not keys:
            return None
        return min(keys), min(f), min(b) if b else None, min(gs), min(mm)

    def _scan(self, bss, lb_q: Fraction) -> None:
        c = self.config
        self.counts["scans"] += 1
        sf = self._scan_frontier(bss.forward)
        bidir = c.algorithm is not Algorithm.WASTAR
        sb = self._scan_frontier(bss.backward) if bidir else None
        if sf is None or (bidir and sb is None):
            return
        aux = c.algorithm is Algorithm.WBAE
        bs = BoundState(
            key_f=sf[0], key_b=sb[0] if sb else None,
            aux_f=sf[2] if aux else sf[1],
            aux_b=(sb[2] if aux else sb[1]) if sb else None,
            f_min_f=sf[1], f_min_b=sb[1] if sb else None,
            g_min_f=sf[3], g_min_b=sb[3] if sb else None,
            mm_min=min(sf[4], sb[4]) if sb else sf[4],
        )
        if bss.forward.peek_key() != sf[0] * self.policy.scale:
            self._fail("frontier", "forward heap minimum differs from full scan")
        if sb and bss.backward.peek_key() != sb[0] * self.policy.scale:
            self._fail("frontier", "backward heap minimum differs from full scan")
        if self.policy.n_aux:
            for i, front, s in ((0, bss.forward, sf), (0, bss.backward, sb)):
                if s is None:
                    continue
                want = s[2] if aux else s[1]
                if front.peek_aux(i) != want:
                    self._fail("frontier", f"aux minimum {front.peek_aux(i)} != scanned {want}")
        expected = combined_bound(c.algorithm, bs, c)
        if expected != lb_q:
            self._fail("bound_route", f"integer bound {lb_q} != fraction bound {expected}")
        base = lower_bound(c.algorithm, bs, c)
        alb = alb_bound(c.algorithm, bs, c)
        self.counts["alb_scan_checks"] += 1
        if alb < base:
            self._fail("alb_dominance", f"ALB {alb} < base {base}")
