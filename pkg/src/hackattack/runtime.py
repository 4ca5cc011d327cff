"""The shared turn cycle used by tournaments, replay, and the server.

A GameRunner owns a GameState plus every player's PlayerView, walks the
round/turn structure (grants first, then each player in fixed order),
delivers observations to the right views, and accumulates the GameRecord.
Callers only ever submit turns for whichever player the runner says is up.
"""

from __future__ import annotations

from .actions import Action, Observation
from .belief import PlayerView
from .config import GameConfig
from .record import ActionEntry, GameRecord, RoundEntry, TurnEntry
from .state import (
    GameState,
    IllegalActionError,
    Outcome,
    end_observations,
    game_result,
    grant_round_exploits,
    legal_actions,
    new_game,
    play_turn,
)


class GameRunner:
    def __init__(
        self,
        config: GameConfig,
        seed: int,
        strategies: list[str] | None = None,
        record_beliefs: bool = False,
    ):
        self.config = config
        self.seed = seed
        self.record_beliefs = record_beliefs
        self.state: GameState = new_game(config, seed)
        self.views: list[PlayerView] = []
        for p in range(config.num_players):
            start = self.state.accounts[p].index(1)
            self.views.append(PlayerView(config, p, start, set(self.state.exploits[p])))
        self._rounds: list[RoundEntry] = []
        self._strategies = strategies
        self._turn_of: int | None = None
        self.outcome: Outcome = game_result(self.state)
        self.end_events: list[Observation] = []
        self._begin_round()

    # -- round / turn plumbing -------------------------------------------------

    def _begin_round(self) -> None:
        if self.outcome.finished:
            return
        entry = RoundEntry(round=self.state.round)
        grants = grant_round_exploits(self.state)
        entry.grants = grants
        self._rounds.append(entry)
        for view in self.views:
            view.advance_round(self.state.round)
        for obs in grants:
            self.views[obs.recipient].observe(obs)
        self._turn_of = None
        self._advance_turn_pointer()

    def _advance_turn_pointer(self) -> None:
        """Move to the next player who actually controls something."""
        nxt = 0 if self._turn_of is None else self._turn_of + 1
        while nxt < self.config.num_players:
            if self.state.controlled_count(nxt) > 0:
                self._turn_of = nxt
                return
            nxt += 1
        # Round complete.
        self.state.round += 1
        self._check_finished()
        if not self.outcome.finished:
            self._begin_round()

    def _check_finished(self) -> None:
        result = game_result(self.state)
        if result.finished:
            self.outcome = result
            self.end_events = end_observations(self.state, result)
            for obs in self.end_events:
                self.views[obs.recipient].observe(obs)

    # -- public surface -----------------------------------------------------------

    @property
    def finished(self) -> bool:
        return self.outcome.finished

    def current_player(self) -> int:
        if self.finished or self._turn_of is None:
            raise RuntimeError("game is finished")
        return self._turn_of

    def legal_actions_for(self, player: int) -> dict[int, list[Action]]:
        return {
            c: legal_actions(self.state, player, c) for c in self.state.controlled(player)
        }

    def view_of(self, player: int) -> PlayerView:
        return self.views[player]

    def submit_turn(self, player: int, actions: list[Action]) -> list[list[Observation]]:
        if self.finished:
            raise IllegalActionError("game is finished")
        if player != self._turn_of:
            raise IllegalActionError(f"it is player {self._turn_of}'s turn, not {player}'s")
        groups = play_turn(self.state, player, actions)

        entries = []
        for action, group in zip(actions, groups):
            entries.append(ActionEntry(action=action, observations=list(group)))
            for obs in group:
                self.views[obs.recipient].observe(obs)
        self._rounds[-1].turns.append(TurnEntry(player=player, actions=entries))
        self._check_finished()
        if not self.finished:
            self._advance_turn_pointer()
        return groups

    def record(self) -> GameRecord:
        final_beliefs = None
        if self.record_beliefs:
            final_beliefs = [v.snapshot() for v in self.views]
        return GameRecord(
            config=self.config,
            seed=self.seed,
            strategies=self._strategies,
            rounds=self._rounds,
            outcome=self.outcome,
            final_beliefs=final_beliefs,
        )


def replay(record: GameRecord) -> GameRunner:
    """Re-run a recorded game and verify it reproduces identically."""
    runner = GameRunner(record.config, record.seed, strategies=record.strategies,
                        record_beliefs=record.final_beliefs is not None)
    for round_no, player, actions in record.all_actions():
        if runner.finished:
            raise ValueError("record contains turns after the game ended")
        if runner.state.round != round_no or runner.current_player() != player:
            raise ValueError("record structure does not match the engine's turn order")
        runner.submit_turn(player, actions)
    if not runner.finished:
        raise ValueError("record ends before the game finished")
    fresh = runner.record()
    if fresh.to_json() != record.to_json():
        raise ValueError("replay diverged from the recorded transcript")
    return runner
