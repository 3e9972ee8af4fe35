"""Trust quantification for AI/ML services.

Submodules:

* :mod:`trustquant.game_engine` -- trust-game value exchange for one or many cycles
* :mod:`trustquant.score` -- weighted, clamped trust score over NIST AI RMF categories
* :mod:`trustquant.fair_trade` -- exchange-matrix eigen-analysis and the fair-trade line
* :mod:`trustquant.timeseries` -- score history and fluctuation checks
* :mod:`trustquant.scenarios` -- scenario files and trajectory output
"""

from .errors import (
    DegeneracyError,
    DomainError,
    FormatError,
    InsufficientDataError,
    OrderingError,
    TrustQuantError,
    ValidationError,
)
from .fair_trade import build_matrix, eigen_decompose, fair_trade_line
from .game_engine import CycleParams, GameConfig, closed_form_n_cycles, run_cycle
from .score import MetricCategory, MetricEntry, WeightVector, trust_score

__version__ = "0.1.0"

__all__ = [
    "CycleParams",
    "DegeneracyError",
    "DomainError",
    "FormatError",
    "GameConfig",
    "InsufficientDataError",
    "MetricCategory",
    "MetricEntry",
    "OrderingError",
    "TrustQuantError",
    "ValidationError",
    "WeightVector",
    "build_matrix",
    "closed_form_n_cycles",
    "eigen_decompose",
    "fair_trade_line",
    "run_cycle",
    "trust_score",
]
