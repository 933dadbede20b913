from .base import Domain
from .grid import Grid, load_map, octile_heuristic, parse_map, parse_scenario
from .hanoi import TowersOfHanoi, from_pegs, to_pegs, toh_successors
from .pancake import Pancake, gap_heuristic
from .stp import HEAVY, UNIT, SlidingTile, md_heuristic

__all__ = [
    "Domain", "Grid", "Pancake", "SlidingTile", "TowersOfHanoi",
    "gap_heuristic", "md_heuristic", "octile_heuristic", "toh_successors",
    "from_pegs", "to_pegs", "load_map", "parse_map", "parse_scenario", "HEAVY", "UNIT",
]
