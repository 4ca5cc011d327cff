"""Replayable game transcripts.

A GameRecord captures everything needed to reproduce a game bit-for-bit:
the config, the seed, every submitted action, and every observation the
engine emitted.  Serialization is canonical (sorted keys, fixed separators)
so identical games produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .actions import Action, Observation
from .config import GameConfig
from .state import Outcome

RECORD_VERSION = 1


@dataclass
class ActionEntry:
    action: Action
    observations: list[Observation]

    def to_dict(self) -> dict:
        return {
            "action": self.action.to_dict(),
            "observations": [o.to_dict() for o in self.observations],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ActionEntry":
        return cls(
            action=Action.from_dict(data["action"]),
            observations=[Observation.from_dict(o) for o in data["observations"]],
        )


@dataclass
class TurnEntry:
    player: int
    actions: list[ActionEntry]

    def to_dict(self) -> dict:
        return {"player": self.player, "actions": [a.to_dict() for a in self.actions]}

    @classmethod
    def from_dict(cls, data: dict) -> "TurnEntry":
        return cls(
            player=int(data["player"]),
            actions=[ActionEntry.from_dict(a) for a in data["actions"]],
        )


@dataclass
class RoundEntry:
    round: int
    grants: list[Observation] = field(default_factory=list)
    turns: list[TurnEntry] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "grants": [o.to_dict() for o in self.grants],
            "turns": [t.to_dict() for t in self.turns],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RoundEntry":
        return cls(
            round=int(data["round"]),
            grants=[Observation.from_dict(o) for o in data["grants"]],
            turns=[TurnEntry.from_dict(t) for t in data["turns"]],
        )


@dataclass
class GameRecord:
    config: GameConfig
    seed: int
    strategies: list[str] | None
    rounds: list[RoundEntry]
    outcome: Outcome
    final_beliefs: list[dict] | None = None
    version: int = RECORD_VERSION

    def to_dict(self) -> dict:
        out = {
            "version": self.version,
            "config": self.config.to_dict(),
            "seed": self.seed,
            "strategies": self.strategies,
            "rounds": [r.to_dict() for r in self.rounds],
            "outcome": self.outcome.to_dict(),
        }
        if self.final_beliefs is not None:
            out["final_beliefs"] = self.final_beliefs
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "GameRecord":
        if data["version"] != RECORD_VERSION:
            raise ValueError(f"unsupported record version {data['version']}")
        return cls(
            config=GameConfig.from_dict(data["config"]),
            seed=int(data["seed"]),
            strategies=data.get("strategies"),
            rounds=[RoundEntry.from_dict(r) for r in data["rounds"]],
            outcome=Outcome.from_dict(data["outcome"]),
            final_beliefs=data.get("final_beliefs"),
        )

    @classmethod
    def from_json(cls, text: str) -> "GameRecord":
        return cls.from_dict(json.loads(text))

    def sha256(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    def rounds_played(self) -> int:
        return len(self.rounds)

    def digest(self) -> dict:
        return {
            "seed": self.seed,
            "outcome": self.outcome.to_dict(),
            "rounds_played": self.rounds_played(),
            "sha256": self.sha256(),
        }

    def all_actions(self) -> list[tuple[int, int, list[Action]]]:
        """(round, player, actions) triples in play order."""
        out = []
        for r in self.rounds:
            for t in r.turns:
                out.append((r.round, t.player, [a.action for a in t.actions]))
        return out
