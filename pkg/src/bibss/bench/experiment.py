"""Experiment matrices: instance sources, run records, CSV and text summaries."""
from __future__ import annotations

import csv
import io
import logging
import os
import random
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..domains import Grid, Pancake, SlidingTile, TowersOfHanoi
from ..domains.grid import load_map, parse_scenario, random_map
from ..domains.hanoi import from_pegs, parse_partition
from ..domains.stp import HEAVY, UNIT
from ..oracle import OracleBudgetError, optimal_cost
from ..policies import (
    LAMBDA_PRESETS,
    Algorithm,
    BoundVariant,
    SearchConfig,
    as_rational,
    lambda_preset,
)
from ..search import DomainInstance, SearchLimitExceeded, SearchLimits, run_search

log = logging.getLogger(__name__)

DEFAULT_WEIGHTS = tuple(Fraction(x) for x in ("1", "11/10", "12/10", "15/10", "17/10", "2", "3", "5", "10"))
BYTES_PER_NODE = 400

CSV_COLUMNS = [
    "domain", "heuristic", "algorithm", "lambda_num", "lambda_den", "W_num", "W_den",
    "bound_variant", "instance_id", "status", "cost", "cstar", "quality",
    "expansions_f", "expansions_b", "generated", "lb_terminal_num", "lb_terminal_den", "wall_ms",
]


class InstanceFormatError(ValueError):
    pass


# ---------------------------------------------------------------- domains

def make_domain(name: str, heuristic: Optional[str] = None, size: Optional[int] = None, *,
                map_path=None, grid_density: float = 0.25, map_seed: int = 0, pdb_cache=None):
    """Build a domain from CLI-style names.

    ``stp``/``stp-heavy``: heuristic ``md`` or ``md-4``, size = board width.
    ``pancake``: ``gap``, ``gap-1``, ``gap-2``..., size = pancakes.
    ``toh``: heuristic is the PDB partition, e.g. ``10+2``, size = disks.
    ``grid``: ``octile``; uses ``map_path`` or a synthetic ``size``x``size`` map.
    """
    if name in ("stp", "stp-heavy"):
        return SlidingTile(size or 4, HEAVY if name == "stp-heavy" else UNIT, heuristic or "md")
    if name == "pancake":
        h = (heuristic or "gap").lower()
        if h == "gap":
            k = 0
        elif h.startswith("gap-"):
            k = int(h[4:])
        else:
            raise ValueError(f"unknown pancake heuristic {heuristic!r}")
        return Pancake(size or 18, k)
    if name == "toh":
        n = size or 12
        partition = parse_partition(heuristic) if heuristic else (n - n // 2, n // 2)
        return TowersOfHanoi(n, partition, cache_dir=pdb_cache)
    if name == "grid":
        if heuristic not in (None, "octile"):
            raise ValueError(f"unknown grid heuristic {heuristic!r}")
        if map_path:
            return Grid(load_map(map_path), name=Path(map_path).name)
        n = size or 20
        return Grid(random_map(n, n, grid_density, random.Random(map_seed)), name=f"synthetic-{n}-{map_seed}")
    raise ValueError(f"unknown domain {name!r}")


def heuristic_label(domain) -> str:
    if isinstance(domain, SlidingTile):
        return domain.heuristic_name
    if isinstance(domain, Pancake):
        return "gap" if domain.gap_k == 0 else f"gap-{domain.gap_k}"
    if isinstance(domain, TowersOfHanoi):
        return "+".join(map(str, domain.partition))
    return "octile"


# ---------------------------------------------------------------- instances

def generate_instances(domain, count: int, seed: int, hardness: Optional[int] = None) -> List[DomainInstance]:
    """Reproducible random instances.

    Pancake and ToH starts are uniform; STP starts are uniform solvable
    states, or random-walk scrambles of ``hardness`` moves when given; grid
    pairs are drawn from the largest connected region of the map.
    """
    rng = random.Random(seed)
    out = []
    if isinstance(domain, Grid):
        cells = domain.free_cells()
        if len(cells) < 2:
            raise ValueError("map has fewer than two passable cells")
        regions, seen = [], set()
        for c in cells:
            if c not in seen:
                comp = domain.component_of(c)
                seen |= comp
                regions.append(sorted(comp))
        region = max(regions, key=len)
        for i in range(count):
            s = rng.choice(region)
            if hardness == 0:
                g = s
            else:
                g = rng.choice(region)
                while g == s and len(region) > 1:
                    g = rng.choice(region)
            out.append(DomainInstance(str(i), s, g))
        return out
    for i in range(count):
        if isinstance(domain, SlidingTile) and hardness is not None:
            start = domain.scramble(hardness, rng)
        elif hardness == 0:
            start = domain.goal
        else:
            start = domain.random_state(rng)
        out.append(DomainInstance(str(i), start, domain.goal))
    return out


def _parse_state(domain, tokens: Sequence[str], where: str):
    try:
        vals = [int(t) for t in tokens]
    except ValueError as exc:
        raise InstanceFormatError(f"{where}: {exc}") from exc
    if isinstance(domain, TowersOfHanoi):
        if len(vals) != domain.n:
            raise InstanceFormatError(f"{where}: expected {domain.n} peg indices, got {len(vals)}")
        try:
            return from_pegs(vals)
        except ValueError as exc:
            raise InstanceFormatError(f"{where}: {exc}") from exc
    state = tuple(vals)
    if not domain.is_valid(state):
        raise InstanceFormatError(f"{where}: invalid state {state}")
    return state


def load_instances(domain, path) -> List[DomainInstance]:
    """Read instances from a text file or, for grids, a MovingAI ``.scen`` file.

    Text lines: ``<id> <start...> [| <goal...>]``; ``#`` starts a comment and
    the goal defaults to the domain's canonical goal.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InstanceFormatError(f"{path}: {exc}") from exc
    if isinstance(domain, Grid):
        out = []
        for i, e in enumerate(parse_scenario(text, str(path))):
            for cell in (e.start, e.goal):
                if not domain.passable(*cell):
                    raise InstanceFormatError(f"{path}: entry {i}: cell {cell} is blocked or off-map")
            out.append(DomainInstance(str(i), e.start, e.goal))
        return out
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{path}:{lineno}"
        head, _, goal_part = line.partition("|")
        tokens = head.split()
        if len(tokens) < 2:
            raise InstanceFormatError(f"{where}: expected an id followed by a state")
        start = _parse_state(domain, tokens[1:], where)
        goal = _parse_state(domain, goal_part.split(), where) if goal_part.strip() else domain.goal
        if isinstance(domain, SlidingTile) and not domain.is_solvable(start, goal):
            raise InstanceFormatError(f"{where}: start and goal have different parity")
        out.append(DomainInstance(tokens[0], start, goal))
    return out


def resolve_instances(domain, source: str) -> List[DomainInstance]:
    """``gen:seed:count[:hardness]`` or a file path."""
    if source.startswith("gen:"):
        parts = source.split(":")[1:]
        if len(parts) not in (2, 3):
            raise ValueError(f"bad generator spec {source!r}")
        seed, count = int(parts[0]), int(parts[1])
        hardness = int(parts[2]) if len(parts) == 3 else None
        return generate_instances(domain, count, seed, hardness)
    return load_instances(domain, source)


# ---------------------------------------------------------------- matrix

@dataclass(frozen=True)
class RunConfig:
    algorithm: Algorithm
    W: Fraction
    lam: Fraction
    lambda_spec: str
    bound: BoundVariant

    def search_config(self) -> SearchConfig:
        return SearchConfig(self.algorithm, self.W, self.lam, bound=self.bound)


@dataclass
class ExperimentSpec:
    domain: str
    heuristic: Optional[str] = None
    size: Optional[int] = None
    instances: str = "gen:0:10"
    algorithms: Sequence[Algorithm] = tuple(Algorithm)
    weights: Sequence[Fraction] = DEFAULT_WEIGHTS
    lambdas: Sequence[str] = LAMBDA_PRESETS
    bounds: Sequence[BoundVariant] = (BoundVariant.GCD,)
    oracle: bool = False
    oracle_budget: int = 2_000_000
    timeout: Optional[float] = 60.0
    memory_mb: Optional[int] = 4096
    jobs: int = 1
    map_path: Optional[str] = None
    grid_density: float = 0.25
    map_seed: int = 0
    pdb_cache: Optional[str] = None

    def __post_init__(self):
        self.algorithms = tuple(Algorithm(a) if not isinstance(a, str) else Algorithm.parse(a)
                                for a in self.algorithms)
        self.weights = tuple(as_rational(w) for w in self.weights)
        if any(w < 1 for w in self.weights):
            raise ValueError("weights must be >= 1")
        self.bounds = tuple(BoundVariant(b) for b in self.bounds)

    def build_domain(self):
        return make_domain(self.domain, self.heuristic, self.size, map_path=self.map_path,
                           grid_density=self.grid_density, map_seed=self.map_seed,
                           pdb_cache=self.pdb_cache)

    def configs(self) -> List[RunConfig]:
        out = []
        for alg in self.algorithms:
            for W in self.weights:
                specs = self.lambdas if alg is Algorithm.WBAE else ("0",)
                for spec in specs:
                    lam = lambda_preset(spec, W)
                    for bound in self.bounds:
                        out.append(RunConfig(alg, W, lam, spec if alg is Algorithm.WBAE else "-", bound))
        return out

    def limits(self) -> SearchLimits:
        max_nodes = None if self.memory_mb is None else self.memory_mb * 2**20 // BYTES_PER_NODE
        return SearchLimits(self.timeout, max_nodes)


@dataclass
class RunRecord:
    domain: str
    heuristic: str
    algorithm: str
    lam: Fraction
    lambda_spec: str
    W: Fraction
    bound_variant: str
    instance_id: str
    status: str
    cost: Optional[int] = None
    cstar: Optional[int] = None
    expansions_f: int = 0
    expansions_b: int = 0
    generated: int = 0
    lb_terminal: Optional[Fraction] = None
    wall_ms: float = 0.0

    @property
    def expansions(self) -> int:
        return self.expansions_f + self.expansions_b

    @property
    def quality(self) -> Optional[Fraction]:
        if self.cost is None or self.cstar is None:
            return None
        if self.cstar == 0:
            return Fraction(1) if self.cost == 0 else None
        return Fraction(self.cost, self.cstar)

    def row(self) -> Dict[str, str]:
        q = self.quality
        lb = self.lb_terminal
        return {
            "domain": self.domain,
            "heuristic": self.heuristic,
            "algorithm": self.algorithm,
            "lambda_num": str(self.lam.numerator),
            "lambda_den": str(self.lam.denominator),
            "W_num": str(self.W.numerator),
            "W_den": str(self.W.denominator),
            "bound_variant": self.bound_variant,
            "instance_id": self.instance_id,
            "status": self.status,
            "cost": "" if self.cost is None else str(self.cost),
            "cstar": "" if self.cstar is None else str(self.cstar),
            "quality": "" if q is None else f"{float(q):.6f}",
            "expansions_f": str(self.expansions_f),
            "expansions_b": str(self.expansions_b),
            "generated": str(self.generated),
            "lb_terminal_num": "" if lb is None else str(lb.numerator),
            "lb_terminal_den": "" if lb is None else str(lb.denominator),
            "wall_ms": f"{self.wall_ms:.3f}",
        }

    @classmethod
    def from_row(cls, row: Dict[str, str]) -> "RunRecord":
        def opt_int(v):
            return None if v == "" else int(v)

        lb = None
        if row["lb_terminal_num"] != "":
            lb = Fraction(int(row["lb_terminal_num"]), int(row["lb_terminal_den"]))
        return cls(
            domain=row["domain"], heuristic=row["heuristic"], algorithm=row["algorithm"],
            lam=Fraction(int(row["lambda_num"]), int(row["lambda_den"])), lambda_spec="",
            W=Fraction(int(row["W_num"]), int(row["W_den"])), bound_variant=row["bound_variant"],
            instance_id=row["instance_id"], status=row["status"], cost=opt_int(row["cost"]),
            cstar=opt_int(row["cstar"]), expansions_f=int(row["expansions_f"]),
            expansions_b=int(row["expansions_b"]), generated=int(row["generated"]),
            lb_terminal=lb, wall_ms=float(row["wall_ms"]),
        )


def run_config(domain, instance, rc: RunConfig, limits: Optional[SearchLimits] = None,
               cstar: Optional[int] = None, domain_name: str = "", heuristic: str = "") -> RunRecord:
    rec = RunRecord(domain_name, heuristic, rc.algorithm.value, rc.lam, rc.lambda_spec, rc.W,
                    rc.bound.value, instance.id, "ok", cstar=cstar)
    try:
        res = run_search(rc.search_config(), domain, instance, limits=limits)
    except SearchLimitExceeded as exc:
        rec.status = exc.status
        return rec
    except MemoryError:
        rec.status = "memory"
        return rec
    rec.status = res.status
    rec.cost = res.cost
    rec.expansions_f = res.expansions_f
    rec.expansions_b = res.expansions_b
    rec.generated = res.generated
    rec.lb_terminal = res.terminal_lb
    rec.wall_ms = res.wall_time * 1000.0
    return rec


def _instance_cell(args) -> List[RunRecord]:
    spec, domain, instance, configs = args
    cstar = None
    if spec.oracle:
        try:
            cstar = optimal_cost(domain, instance, spec.oracle_budget).cost
        except OracleBudgetError:
            log.warning("oracle budget exhausted on instance %s", instance.id)
    limits = spec.limits()
    label = heuristic_label(domain)
    return [run_config(domain, instance, rc, limits, cstar, spec.domain, label) for rc in configs]


def run_matrix(spec: ExperimentSpec, instances: Optional[Sequence[DomainInstance]] = None,
               domain=None) -> List[RunRecord]:
    """One record per (instance, config), in instance-major order."""
    domain = domain or spec.build_domain()
    if instances is None:
        instances = resolve_instances(domain, spec.instances)
    configs = spec.configs()
    jobs = [(spec, domain, inst, configs) for inst in instances]
    if spec.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            chunks = list(pool.map(_instance_cell, jobs))
    else:
        chunks = [_instance_cell(j) for j in jobs]
    return [r for chunk in chunks for r in chunk]


# ---------------------------------------------------------------- output

def write_csv(records: Iterable[RunRecord], fh) -> None:
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(r.row())


def emit_csv(records: Iterable[RunRecord], path) -> None:
    try:
        with open(path, "w", newline="") as fh:
            write_csv(records, fh)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def read_csv(path) -> List[RunRecord]:
    with open(path, newline="") as fh:
        return [RunRecord.from_row(row) for row in csv.DictReader(fh)]


def _row_label(r: RunRecord) -> str:
    if r.algorithm != Algorithm.WBAE.value:
        return r.algorithm
    if r.lambda_spec and r.lambda_spec != "-":
        return f"WBAE* {r.lambda_spec}"
    return f"WBAE* {r.lam}"


def _fmt_w(w: Fraction) -> str:
    return str(w.numerator) if w.denominator == 1 else f"{float(w):g}"


def emit_summary(records: Sequence[RunRecord]) -> str:
    """Mean expansions per (algorithm/lambda, W), then quality and expansions/sec."""
    if not records:
        raise ValueError("no records to summarise")
    weights = sorted({r.W for r in records})
    rows: Dict[str, Dict[Fraction, List[int]]] = defaultdict(lambda: defaultdict(list))
    quality: Dict[str, List[Fraction]] = defaultdict(list)
    totals: Dict[str, List[float]] = defaultdict(lambda: [0, 0.0])
    status: Dict[str, int] = defaultdict(int)
    order: List[str] = []
    for r in records:
        label = _row_label(r)
        if label not in order:
            order.append(label)
        if r.status != "ok":
            status[label] += 1
            continue
        rows[label][r.W].append(r.expansions)
        if r.quality is not None:
            quality[label].append(r.quality)
        totals[label][0] += r.expansions
        totals[label][1] += r.wall_ms / 1000.0
    width = max(len(x) for x in order + ["algorithm"])
    head = f"{'algorithm':<{width}} " + " ".join(f"{_fmt_w(w):>9}" for w in weights)
    head += f" {'quality':>8} {'exp/sec':>10} {'failed':>6}"
    lines = [head, "-" * len(head)]
    for label in order:
        cells = []
        for w in weights:
            vals = rows[label].get(w)
            cells.append(f"{sum(vals) / len(vals):>9.1f}" if vals else f"{'-':>9}")
        q = quality[label]
        qs = f"{float(sum(q) / len(q)):>8.3f}" if q else f"{'-':>8}"
        n, secs = totals[label]
        eps = f"{n / secs:>10.0f}" if secs > 0 else f"{'-':>10}"
        lines.append(f"{label:<{width}} " + " ".join(cells) + f" {qs} {eps} {status[label]:>6}")
    return "\n".join(lines)


def csv_text(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()
