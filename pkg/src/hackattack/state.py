"""Ground-truth game state and rule enforcement.

The state is single-owner: engine functions mutate it in place and return
the observations produced.  All randomness flows through the state's seeded
stream, so a (config, seed) pair plus the submitted actions reproduces a
game exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .actions import (
    AccountsLost,
    Action,
    BackdoorApplied,
    CleanResult,
    Detected,
    ExploitGained,
    GameEnd,
    HackResult,
    Observation,
    PatchApplied,
    ReconResult,
    ScanResult,
    validate_action_shape,
)
from .config import ActionKind, GameConfig, REMOTE_KINDS
from .exploits import (
    Exploit,
    sample_distinct_exploits,
    sample_distinct_powers,
    sample_exploit,
)


class IllegalActionError(ValueError):
    """Raised when a submitted action violates the rules; state is unchanged."""


@dataclass
class Computer:
    id: int
    os: int
    patches: set[Exploit] = field(default_factory=set)


@dataclass
class GameState:
    config: GameConfig
    seed: int
    computers: list[Computer]
    accounts: list[list[int]]  # [player][computer] -> 0..max_accounts
    exploits: list[set[Exploit]]  # per player
    round: int
    rng: random.Random

    @property
    def num_players(self) -> int:
        return self.config.num_players

    def controlled(self, player: int) -> list[int]:
        row = self.accounts[player]
        return [c for c in range(len(row)) if row[c] > 0]

    def controlled_count(self, player: int) -> int:
        return sum(1 for n in self.accounts[player] if n > 0)

    def count(self, player: int, computer: int) -> int:
        return self.accounts[player][computer]


@dataclass(frozen=True)
class Outcome:
    ONGOING = "ongoing"
    WIN = "win"
    TIE = "tie"

    kind: str
    winner: int | None
    counts: tuple[int, ...]

    @property
    def finished(self) -> bool:
        return self.kind != Outcome.ONGOING

    def to_dict(self) -> dict:
        return {"kind": self.kind, "winner": self.winner, "counts": list(self.counts)}

    @classmethod
    def from_dict(cls, data: dict) -> "Outcome":
        return cls(data["kind"], data["winner"], tuple(data["counts"]))


def new_game(config: GameConfig, seed: int) -> GameState:
    """Set up computers, hidden patches, starting accounts and exploit hands.

    Draw order is part of the determinism contract: per computer its OS then
    its patch powers, then each player's starting computer, then each
    player's starting hand.
    """
    rng = random.Random(seed)
    computers = []
    for cid in range(config.num_computers):
        os = rng.randrange(config.num_os)
        powers = sample_distinct_powers(rng, config, config.starting_patches_per_computer)
        computers.append(Computer(id=cid, os=os, patches={Exploit(os, p) for p in powers}))

    accounts = [[0] * config.num_computers for _ in range(config.num_players)]
    for player in range(config.num_players):
        start = rng.randrange(config.num_computers)
        accounts[player][start] = 1

    exploits = [
        set(sample_distinct_exploits(rng, config, config.starting_exploits))
        for _ in range(config.num_players)
    ]
    return GameState(
        config=config,
        seed=seed,
        computers=computers,
        accounts=accounts,
        exploits=exploits,
        round=1,
        rng=rng,
    )


def legal_actions(state: GameState, player: int, computer: int) -> list[Action]:
    """Every action `player` may take from `computer` right now.

    Clean and Scan are always available, so the list is never empty.
    """
    if state.accounts[player][computer] < 1:
        raise IllegalActionError(f"player {player} does not control computer {computer}")
    config = state.config
    owned = sorted(state.exploits[player], key=Exploit.sort_key)
    actions: list[Action] = []
    for target in range(config.num_computers):
        if target == computer:
            continue
        for e in owned:
            actions.append(Action(player, computer, ActionKind.HACK, target=target, exploit=e))
    for target in range(config.num_computers):
        if target != computer:
            actions.append(Action(player, computer, ActionKind.RECON, target=target))
    actions.append(Action(player, computer, ActionKind.CLEAN))
    actions.append(Action(player, computer, ActionKind.SCAN))
    if state.accounts[player][computer] < config.max_accounts:
        actions.append(Action(player, computer, ActionKind.BACKDOOR))
    patched = state.computers[computer].patches
    for e in owned:
        if e not in patched:
            actions.append(Action(player, computer, ActionKind.PATCH, exploit=e))
    return actions


def check_legal(state: GameState, action: Action) -> None:
    """Raise IllegalActionError (naming the violated rule) if action is illegal."""
    validate_action_shape(action, state.config)
    player = action.actor
    if state.accounts[player][action.computer] < 1:
        raise IllegalActionError(
            f"player {player} does not control computer {action.computer}"
        )
    if action.kind in (ActionKind.HACK, ActionKind.PATCH):
        if action.exploit not in state.exploits[player]:
            raise IllegalActionError(
                f"player {player} does not own exploit "
                f"(os={action.exploit.os}, power={action.exploit.power})"
            )
    if action.kind == ActionKind.BACKDOOR:
        if state.accounts[player][action.computer] >= state.config.max_accounts:
            raise IllegalActionError(
                f"computer {action.computer} already holds the maximum "
                f"{state.config.max_accounts} accounts"
            )
    if action.kind == ActionKind.PATCH:
        if action.exploit in state.computers[action.computer].patches:
            raise IllegalActionError(
                f"computer {action.computer} is already patched against "
                f"(os={action.exploit.os}, power={action.exploit.power})"
            )


def _detection_rolls(
    state: GameState, action: Action, present_before: list[int]
) -> list[Observation]:
    """Roll detection for every other player present when the action ran.

    Presence is taken on the acted-upon computer and, for remote actions,
    also on the acting computer.  An observer co-located on both gets one
    combined chance; the acting computer is revealed only when the
    acting-side roll succeeded.
    """
    config = state.config
    prob = config.detection_probs[action.kind]
    target = action.target if action.kind in REMOTE_KINDS else action.computer
    out: list[Observation] = []
    for q in range(config.num_players):
        if q == action.actor:
            continue
        saw_target = False
        saw_source = False
        if present_before[q * 2] > 0:  # presence on the acted-upon computer
            saw_target = state.rng.random() < prob
        if action.kind in REMOTE_KINDS and present_before[q * 2 + 1] > 0:
            saw_source = state.rng.random() < prob
        if saw_target or saw_source:
            source = action.computer if (saw_source or action.kind not in REMOTE_KINDS) else None
            out.append(
                Observation(q, Detected(actor=action.actor, kind=action.kind, source=source, target=target))
            )
    return out


def apply_action(state: GameState, action: Action) -> list[Observation]:
    """Resolve one action against the current state.

    Returns the observations it generated (actor result, side effects on
    other players, detections).  Raises IllegalActionError without touching
    the state if the action is not currently legal.
    """
    check_legal(state, action)
    return _resolve(state, action)


def _resolve(state: GameState, action: Action) -> list[Observation]:
    config = state.config
    player = action.actor
    c = action.computer

    # Presence snapshot for detection: [target-side, acting-side] per player.
    target = action.target if action.kind in REMOTE_KINDS else c
    present_before = []
    for q in range(config.num_players):
        present_before.append(state.accounts[q][target])
        present_before.append(state.accounts[q][c])

    obs: list[Observation] = []
    if action.kind == ActionKind.HACK:
        victim = state.computers[action.target]
        success = action.exploit.os == victim.os and action.exploit not in victim.patches
        new_count = None
        if success:
            row = state.accounts[player]
            row[action.target] = min(config.max_accounts, row[action.target] + 1)
            new_count = row[action.target]
        obs.append(
            Observation(player, HackResult(action.target, action.exploit, success, new_count))
        )
    elif action.kind == ActionKind.BACKDOOR:
        row = state.accounts[player]
        row[c] = min(config.max_accounts, row[c] + 1)
        obs.append(Observation(player, BackdoorApplied(c, row[c])))
    elif action.kind == ActionKind.CLEAN:
        mine = state.accounts[player][c]
        removed: dict[int, int] = {}
        for q in range(config.num_players):
            if q == player:
                continue
            take = min(mine, state.accounts[q][c])
            removed[q] = take
            if take > 0:
                state.accounts[q][c] -= take
                obs.append(Observation(q, AccountsLost(c, state.accounts[q][c])))
        obs.insert(0, Observation(player, CleanResult(c, mine, removed)))
    elif action.kind == ActionKind.PATCH:
        state.computers[c].patches.add(action.exploit)
        obs.append(Observation(player, PatchApplied(c, action.exploit)))
    elif action.kind == ActionKind.RECON:
        victim = state.computers[action.target]
        matching = sorted(
            (e for e in state.exploits[player] if e.os == victim.os), key=Exploit.sort_key
        )
        unblocked = tuple(e for e in matching if e not in victim.patches)
        blocked = tuple(e for e in matching if e in victim.patches)
        obs.append(Observation(player, ReconResult(action.target, victim.os, unblocked, blocked)))
    elif action.kind == ActionKind.SCAN:
        counts = {q: state.accounts[q][c] for q in range(config.num_players)}
        obs.append(Observation(player, ScanResult(c, counts)))
    else:  # pragma: no cover - exhaustive
        raise IllegalActionError(f"unknown action kind {action.kind}")

    obs.extend(_detection_rolls(state, action, present_before))
    return obs


def grant_round_exploits(state: GameState) -> list[Observation]:
    """Start-of-round exploit grants: each player independently has a
    chance of finding one new exploit (duplicates are redrawn)."""
    config = state.config
    obs: list[Observation] = []
    for player in range(config.num_players):
        if state.rng.random() >= config.exploit_gain_prob:
            continue
        owned = state.exploits[player]
        if len(owned) >= config.num_exploits:
            continue  # identity space exhausted, nothing new to find
        while True:
            e = sample_exploit(state.rng, config)
            if e not in owned:
                break
        owned.add(e)
        obs.append(Observation(player, ExploitGained(e)))
    return obs


def game_result(state: GameState) -> Outcome:
    """Outcome so far: early win when only one player still controls
    anything, final standings once all rounds are played, else ongoing."""
    counts = tuple(state.controlled_count(p) for p in range(state.num_players))
    alive = [p for p, n in enumerate(counts) if n > 0]
    if len(alive) == 1:
        return Outcome(Outcome.WIN, alive[0], counts)
    if state.round > state.config.rounds:
        best = max(counts)
        leaders = [p for p, n in enumerate(counts) if n == best]
        if len(leaders) == 1:
            return Outcome(Outcome.WIN, leaders[0], counts)
        return Outcome(Outcome.TIE, None, counts)
    return Outcome(Outcome.ONGOING, None, counts)


def play_turn(state: GameState, player: int, actions: list[Action]) -> list[list[Observation]]:
    """Resolve a player's whole turn: one action per controlled computer.

    The submitted list must cover exactly the computers the player controls
    at turn start; any gap or illegal assignment rejects the whole turn.
    Actions then resolve sequentially in the submitted order against the
    evolving state, so an earlier move can change what a later one sees.
    A computer acquired mid-turn does not act until the next turn.

    Returns one observation group per action, in submission order.
    """
    controlled = set(state.controlled(player))
    submitted = [a.computer for a in actions]
    if len(set(submitted)) != len(submitted):
        raise IllegalActionError("multiple actions submitted for one computer")
    missing = controlled - set(submitted)
    extra = set(submitted) - controlled
    if missing:
        raise IllegalActionError(
            f"no action submitted for controlled computer(s) {sorted(missing)}"
        )
    if extra:
        raise IllegalActionError(
            f"actions submitted for uncontrolled computer(s) {sorted(extra)}"
        )
    for a in actions:
        if a.actor != player:
            raise IllegalActionError(f"action actor {a.actor} is not player {player}")
        check_legal(state, a)

    # Legality was checked against the turn-start state; the only drift a
    # player's own earlier moves can cause is hitting the account cap (hack
    # onto a computer that later backdoors), which the resolution clamps
    # instead of rejecting the pre-validated turn.
    return [_resolve(state, a) for a in actions]


def end_observations(state: GameState, outcome: Outcome) -> list[Observation]:
    return [
        Observation(p, GameEnd(outcome.winner, outcome.counts))
        for p in range(state.num_players)
    ]
