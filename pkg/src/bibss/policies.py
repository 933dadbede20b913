"""Priority keys, direction selection and termination bounds.

The public key/bound functions work on :class:`fractions.Fraction` values and
are the readable reference. The search loop uses :class:`CompiledPolicy`,
which evaluates the same quantities as integers over a fixed per-run
denominator; tests cross-check the two routes.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

Rational = Union[int, Fraction]

F = "F"
B = "B"


class ConfigurationError(ValueError):
    """Raised for an invalid search configuration."""


class Algorithm(str, enum.Enum):
    WASTAR = "WA*"
    BWA = "BWA*"
    WBS = "WBS*"
    WMM = "WMM"
    WBAE = "WBAE*"

    @classmethod
    def parse(cls, text: str) -> "Algorithm":
        norm = text.strip().upper().replace("*", "").replace("-", "").replace("_", "")
        for alg in cls:
            if alg.value.upper().replace("*", "") == norm:
                return alg
        aliases = {"WASTAR": cls.WASTAR, "WA": cls.WASTAR, "BWASTAR": cls.BWA,
                   "WBSSTAR": cls.WBS, "WBAESTAR": cls.WBAE}
        if norm in aliases:
            return aliases[norm]
        raise ConfigurationError(f"unknown algorithm {text!r}")


class DirectionPolicy(str, enum.Enum):
    ALTERNATE = "alternate"
    CARDINALITY = "cardinality"
    GLOBAL_MIN = "global-min"


class BoundVariant(str, enum.Enum):
    BASE = "base"
    GCD = "gcd"
    ALB = "alb"
    ALB_GCD = "alb-gcd"

    @property
    def uses_alb(self) -> bool:
        return self in (BoundVariant.ALB, BoundVariant.ALB_GCD)

    @property
    def uses_gcd(self) -> bool:
        return self in (BoundVariant.GCD, BoundVariant.ALB_GCD)


DEFAULT_DIRECTION = {
    Algorithm.WASTAR: DirectionPolicy.ALTERNATE,  # unused: forward only
    Algorithm.BWA: DirectionPolicy.ALTERNATE,
    Algorithm.WBS: DirectionPolicy.CARDINALITY,
    Algorithm.WMM: DirectionPolicy.GLOBAL_MIN,
    Algorithm.WBAE: DirectionPolicy.ALTERNATE,
}

LAMBDA_PRESETS = ("0", "1/W^2", "1/W", "1", "W")


def as_rational(value) -> Fraction:
    """Parse ints, Fractions, ``"11/10"`` or ``"1.1"`` into an exact Fraction.

    Floats go through ``str`` so that ``1.1`` becomes ``11/10`` rather than
    its binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value).strip())


def lambda_preset(spec: str, W: Rational) -> Fraction:
    """Resolve a named lambda preset (``0``, ``1/W^2``, ``1/W``, ``1``, ``W``) or a literal."""
    W = as_rational(W)
    key = spec.strip().replace("**", "^").replace(" ", "")
    if key in ("W^-2", "1/W^2", "1/W2"):
        return 1 / (W * W)
    if key in ("W^-1", "1/W"):
        return 1 / W
    if key == "W":
        return W
    return as_rational(key)


@dataclass(frozen=True)
class SearchConfig:
    algorithm: Algorithm = Algorithm.WBAE
    W: Fraction = Fraction(1)
    lam: Fraction = Fraction(0)
    direction: Optional[DirectionPolicy] = None
    bound: BoundVariant = BoundVariant.BASE
    iota: int = 1
    epsilon: int = 1

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        object.__setattr__(self, "W", as_rational(self.W))
        object.__setattr__(self, "lam", as_rational(self.lam))
        object.__setattr__(self, "bound", BoundVariant(self.bound))
        if self.direction is None:
            object.__setattr__(self, "direction", DEFAULT_DIRECTION[self.algorithm])
        else:
            object.__setattr__(self, "direction", DirectionPolicy(self.direction))
        if self.W < 1:
            raise ConfigurationError(f"W must be >= 1, got {self.W}")
        if not 0 <= self.lam <= self.W:
            raise ConfigurationError(f"lambda must lie in [0, W], got {self.lam} with W={self.W}")
        if self.iota < 1 or self.epsilon < 1:
            raise ConfigurationError("iota and epsilon must be positive integers")

    @property
    def bidirectional(self) -> bool:
        return self.algorithm is not Algorithm.WASTAR

    def with_domain_costs(self, iota: int, epsilon: int) -> "SearchConfig":
        return SearchConfig(self.algorithm, self.W, self.lam, self.direction, self.bound, iota, epsilon)

    def label(self) -> str:
        if self.algorithm is Algorithm.WBAE:
            return f"WBAE*(lambda={self.lam})"
        return self.algorithm.value


# ---------------------------------------------------------------- keys

def key_wastar(g: int, h: int, W: Rational) -> Fraction:
    return g + as_rational(W) * h


def key_bwa(g: int, h: int, W: Rational) -> Fraction:
    return key_wastar(g, h, W)


def key_wmm(g: int, h: int, W: Rational) -> Fraction:
    return g + max(Fraction(g), as_rational(W) * h)


def key_wbae(g: int, h_same: int, h_opp: int, W: Rational, lam: Rational) -> Fraction:
    return g + as_rational(W) * h_same + as_rational(lam) * (g - h_opp)


# ---------------------------------------------------------------- bounds

@dataclass
class BoundState:
    """Open-list minima feeding the termination bound.

    ``key_*`` are minima of the weighted priority. ``aux_*`` hold the minima of
    the unweighted companion key: f for the WA* family, b for WBAE*. ``mm_min``
    is the global minimum of max(f, 2g) used by the WMM alternative bound.
    A value of None stands for an empty list.
    """

    key_f: Optional[Fraction] = None
    key_b: Optional[Fraction] = None
    aux_f: Optional[Fraction] = None
    aux_b: Optional[Fraction] = None
    f_min_f: Optional[Fraction] = None
    f_min_b: Optional[Fraction] = None
    g_min_f: Optional[int] = None
    g_min_b: Optional[int] = None
    mm_min: Optional[Fraction] = None


def lower_bound(algorithm: Algorithm, bs: BoundState, config: Optional[SearchConfig] = None) -> Fraction:
    """Base (weighted-priority) lower bound on the target W*C*."""
    algorithm = Algorithm(algorithm)
    if algorithm is Algorithm.WASTAR:
        return Fraction(bs.key_f)
    if algorithm in (Algorithm.BWA, Algorithm.WBS):
        return Fraction(max(bs.key_f, bs.key_b))
    if algorithm is Algorithm.WBAE:
        return Fraction(bs.key_f + bs.key_b) / 2
    return Fraction(min(bs.key_f, bs.key_b))  # WMM


def alb_bound(algorithm: Algorithm, bs: BoundState, config: SearchConfig) -> Fraction:
    """W times the bound of the corresponding optimal algorithm."""
    algorithm = Algorithm(algorithm)
    W = config.W
    if algorithm is Algorithm.WASTAR:
        return W * bs.aux_f
    if algorithm in (Algorithm.BWA, Algorithm.WBS):
        return W * max(bs.aux_f, bs.aux_b)
    if algorithm is Algorithm.WBAE:
        return W * Fraction(bs.aux_f + bs.aux_b) / 2
    return W * max(bs.mm_min, bs.f_min_f, bs.f_min_b, bs.g_min_f + bs.g_min_b + config.epsilon)


def gcd_round(lb: Rational, iota: int, W: Rational) -> Fraction:
    """Raise ``lb`` to the next multiple of iota*W."""
    step = iota * as_rational(W)
    return math.ceil(Fraction(lb) / step) * step


def combined_bound(algorithm: Algorithm, bs: BoundState, config: SearchConfig) -> Fraction:
    """Base bound, maxed with ALB when enabled, then GCD-rounded when enabled."""
    lb = lower_bound(algorithm, bs, config)
    if config.bound.uses_alb:
        lb = max(lb, alb_bound(algorithm, bs, config))
    if config.bound.uses_gcd:
        lb = gcd_round(lb, config.iota, config.W)
    return lb


# ---------------------------------------------------------------- direction / pruning

def choose_direction(policy: DirectionPolicy, state) -> str:
    """Pick F or B. ``state`` exposes ``last_direction``, ``forward`` and ``backward`` frontiers."""
    policy = DirectionPolicy(policy)
    if policy is DirectionPolicy.ALTERNATE:
        return B if state.last_direction == F else F
    if policy is DirectionPolicy.CARDINALITY:
        return F if state.forward.size <= state.backward.size else B
    kf, kb = state.forward.peek_key(), state.backward.peek_key()
    return F if kf <= kb else B


def wbs_prune(succ_key: Rational, U, opp_closed: bool) -> bool:
    """True when a WBS* successor should be discarded (nipping or trimming)."""
    if opp_closed:
        return True
    return U is not None and succ_key >= U


# ---------------------------------------------------------------- integer route

@dataclass
class CompiledPolicy:
    """Integer-arithmetic form of a configuration for the search loop.

    Weighted keys are scaled by ``scale`` (lcm of the W and lambda
    denominators) so that ``int_key == scale * exact_key``. Bounds are
    numerators over ``Q = 2 * scale``; the search stops when ``U * Q <= lb``.
    """

    config: SearchConfig
    scale: int = field(init=False)
    Q: int = field(init=False)
    n_aux: int = field(init=False)

    def __post_init__(self):
        c = self.config
        self.scale = math.lcm(c.W.denominator, c.lam.denominator)
        self.Q = 2 * self.scale
        s = self.scale
        self._a = s
        self._w = c.W.numerator * (s // c.W.denominator)
        self._l = c.lam.numerator * (s // c.lam.denominator)
        alg = c.algorithm
        if not c.bound.uses_alb:
            self.n_aux = 0
        elif alg is Algorithm.WMM:
            self.n_aux = 3  # f, g, max(f, 2g)
        else:
            self.n_aux = 1  # f, or b for WBAE*
        # W*x over Q for an unweighted integer x
        self._wq = c.W.numerator * (self.Q // c.W.denominator)
        self._gcd_step = c.iota * c.W.numerator * (self.Q // c.W.denominator)
        self.step = self._gcd_step if c.bound.uses_gcd else 0
        self.uses_opp_h = alg is Algorithm.WBAE

    def key(self, g: int, h: int, h_opp: int) -> int:
        alg = self.config.algorithm
        if alg is Algorithm.WBAE:
            return self._a * g + self._w * h + self._l * (g - h_opp)
        if alg is Algorithm.WMM:
            return self._a * g + max(self._a * g, self._w * h)
        return self._a * g + self._w * h

    def key_function(self):
        """Return a fast ``(g, h, h_opp) -> int`` closure."""
        a, w, l = self._a, self._w, self._l
        alg = self.config.algorithm
        if alg is Algorithm.WBAE:
            return lambda g, h, ho: a * g + w * h + l * (g - ho)
        if alg is Algorithm.WMM:
            return lambda g, h, ho: a * g + max(a * g, w * h)
        return lambda g, h, ho: a * g + w * h

    def aux_function(self):
        """Return ``(g, h, h_opp) -> tuple`` of unweighted companion keys, or None."""
        if not self.n_aux:
            return None
        alg = self.config.algorithm
        if alg is Algorithm.WBAE:
            return lambda g, h, ho: (2 * g + h - ho,)
        if alg is Algorithm.WMM:
            return lambda g, h, ho: (g + h, g, max(g + h, 2 * g))
        return lambda g, h, ho: (g + h,)

    def base_bound(self, key_f: Optional[int], key_b: Optional[int]) -> int:
        alg = self.config.algorithm
        if alg is Algorithm.WASTAR:
            return 2 * key_f
        if alg is Algorithm.WBAE:
            return key_f + key_b
        if alg is Algorithm.WMM:
            return 2 * min(key_f, key_b)
        return 2 * max(key_f, key_b)

    def alb(self, aux_f: Sequence[int], aux_b: Sequence[int]) -> int:
        alg = self.config.algorithm
        if alg is Algorithm.WASTAR:
            return self._wq * aux_f[0]
        if alg is Algorithm.WBAE:
            return (self._wq // 2) * (aux_f[0] + aux_b[0])
        if alg is Algorithm.WMM:
            mm = min(aux_f[2], aux_b[2])
            return self._wq * max(mm, aux_f[0], aux_b[0], aux_f[1] + aux_b[1] + self.config.epsilon)
        return self._wq * max(aux_f[0], aux_b[0])

    def finish(self, lb: int, alb: Optional[int]) -> int:
        if alb is not None and alb > lb:
            lb = alb
        step = self.step
        if step:
            lb = -(-lb // step) * step
        return lb

    def to_fraction(self, num: int) -> Fraction:
        return Fraction(num, self.Q)
