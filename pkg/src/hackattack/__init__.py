"""HackAttack: an imperfect-information cyber-conflict game.

Players fight over a shared pool of computers using hacks, backdoors,
cleans, patches, recon, and scans, observing each other only through
probabilistic detections.  The package provides the rules engine, the
Bayesian knowledge structures, evaluation-function tree-search strategies,
a reproducible tournament harness with reports and figures, and an
interactive game server.
"""

from .actions import Action, Observation
from .belief import Belief, PlayerView
from .config import ActionKind, GameConfig
from .exploits import Exploit, sample_exploit
from .record import GameRecord
from .runtime import GameRunner, replay
from .search import StrategyKind, choose_turn, evaluate, parse_strategy, search
from .state import (
    GameState,
    IllegalActionError,
    Outcome,
    apply_action,
    game_result,
    grant_round_exploits,
    legal_actions,
    new_game,
    play_turn,
)
from .tournament import MatchSpec, MatchStats, play_game, run_match, run_matrix

__version__ = "0.1.0"

__all__ = [
    "Action",
    "ActionKind",
    "Belief",
    "Exploit",
    "GameConfig",
    "GameRecord",
    "GameRunner",
    "GameState",
    "IllegalActionError",
    "MatchSpec",
    "MatchStats",
    "Observation",
    "Outcome",
    "PlayerView",
    "StrategyKind",
    "apply_action",
    "choose_turn",
    "evaluate",
    "game_result",
    "grant_round_exploits",
    "legal_actions",
    "new_game",
    "parse_strategy",
    "play_game",
    "play_turn",
    "replay",
    "run_match",
    "run_matrix",
    "sample_exploit",
    "search",
]
