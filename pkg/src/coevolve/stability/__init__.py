"""Type games, stability tests, certification and refutation."""

from .certify import CheckReport, certify_pure_nsc, check_efficient_play, check_highest_type_conditions
from .constructions import construct_rps_example, construct_rps_nsc, rps_frequencies
from .recipes import InvasionScenario, evaluate_invasion, refute_nsc
from .thresholds import effective_cost, effective_cost_at_level, minimizing_levels
from .typegame import (
    CERTIFIED,
    INCONCLUSIVE,
    REFUTED,
    Condition,
    StabilityVerdict,
    TypeGame,
    build_type_game,
    epsilon_sweep,
    is_ess,
    is_nss,
    type_game_for,
)

__all__ = [
    "CERTIFIED",
    "INCONCLUSIVE",
    "REFUTED",
    "CheckReport",
    "Condition",
    "InvasionScenario",
    "StabilityVerdict",
    "TypeGame",
    "build_type_game",
    "certify_pure_nsc",
    "check_efficient_play",
    "check_highest_type_conditions",
    "construct_rps_example",
    "construct_rps_nsc",
    "effective_cost",
    "effective_cost_at_level",
    "epsilon_sweep",
    "evaluate_invasion",
    "is_ess",
    "is_nss",
    "minimizing_levels",
    "refute_nsc",
    "rps_frequencies",
    "type_game_for",
]
