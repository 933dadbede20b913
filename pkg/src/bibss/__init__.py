"""Bidirectional bounded-suboptimal heuristic search (WBAE* and baselines)."""
from .policies import (
    Algorithm,
    BoundVariant,
    ConfigurationError,
    DirectionPolicy,
    SearchConfig,
    lambda_preset,
)
from .search import DomainInstance, SearchLimits, SearchResult, run_search

__version__ = "0.1.0"

__all__ = [
    "Algorithm", "BoundVariant", "ConfigurationError", "DirectionPolicy", "SearchConfig",
    "lambda_preset", "DomainInstance", "SearchLimits", "SearchResult", "run_search",
]
