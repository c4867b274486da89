"""Coalition responsibility in finite extensive form games.

Qualitative verdicts (forward, strategic backward, causal backward) decided
through exact-rational sequence-form linear programs, quantitative per-player
responsibility as Shapley values of the induced coalition game, plus
frontends compiling structural causal models and concurrent game structures
into game trees.
"""

from .coalition import C_SIDE, CBAR_SIDE, Coalition, InducedGame, induce, lift_profile, post_states
from .errors import (
    CapExceededError,
    GameValidationError,
    ImperfectRecallError,
    InputError,
    RespgamesError,
)
from .games import (
    CHANCE,
    BehavioralStrategy,
    GameTree,
    History,
    InfoSet,
    Node,
    Play,
    StrategyProfile,
    ValidationReport,
    chance_probability,
    check_perfect_recall,
    coalition_history,
    consistent_plays,
    enumerate_plays,
    history,
    make_game,
    plays_through,
    pure,
    validate_game,
)
from .rational import Rat, parse_rat, rat, rat_str
from .responsibility import (
    BackwardContext,
    build_bar_game,
    build_hat_game,
    is_minimal_exhaustive,
    is_responsible,
    minimal_responsible_coalitions,
    property_causal,
    property_forward,
    property_strategic,
)
from .shapley import (
    CooperativeGame,
    ResponsibilityVector,
    induced_coop_game,
    responsibility_value,
    responsibility_values,
    shapley,
)
from .simplex import LinearProgram, LPResult, lp_solve
from .solver import (
    RealizationPlan,
    SequenceForm,
    brute_force_can_guarantee,
    build_sequence_form,
    can_guarantee,
    game_value,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
