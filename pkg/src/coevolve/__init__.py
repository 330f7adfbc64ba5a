"""Coevolution of preferences and deception in symmetric two-player games."""

__version__ = "0.1.0"

from .game import (
    GameError,
    MixedStrategy,
    SymmetricGame,
    diagnostics,
    efficiency_analysis,
    hawk_dove,
    prisoners_dilemma,
    rock_paper_scissors,
    symmetrize,
)
from .population import Configuration, make_configuration, validate
from .preferences import (
    CognitiveType,
    CostSchedule,
    DeceptionTable,
    Environment,
    UtilityFunction,
    deception_equilibria,
    fmde,
    nash_equilibria,
    undominated_pure_actions,
)

__all__ = [
    "CognitiveType",
    "Configuration",
    "CostSchedule",
    "DeceptionTable",
    "Environment",
    "GameError",
    "MixedStrategy",
    "SymmetricGame",
    "UtilityFunction",
    "deception_equilibria",
    "diagnostics",
    "efficiency_analysis",
    "fmde",
    "hawk_dove",
    "make_configuration",
    "nash_equilibria",
    "prisoners_dilemma",
    "rock_paper_scissors",
    "symmetrize",
    "undominated_pure_actions",
    "validate",
]
