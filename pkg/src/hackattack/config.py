"""Game configuration and the action vocabulary."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class ActionKind(str, enum.Enum):
    HACK = "hack"
    BACKDOOR = "backdoor"
    CLEAN = "clean"
    PATCH = "patch"
    RECON = "recon"
    SCAN = "scan"


#: Per-action probability that a co-located player notices the move.
DEFAULT_DETECTION_PROBS: dict[ActionKind, float] = {
    ActionKind.HACK: 0.20,
    ActionKind.BACKDOOR: 0.15,
    ActionKind.CLEAN: 1.00,
    ActionKind.PATCH: 0.25,
    ActionKind.RECON: 0.05,
    ActionKind.SCAN: 0.30,
}

#: Remote actions are launched from one controlled computer at another;
#: everything else acts on the controlled computer itself.
REMOTE_KINDS = frozenset({ActionKind.HACK, ActionKind.RECON})


@dataclass(frozen=True)
class GameConfig:
    """Immutable rules parameters shared by every component.

    The defaults give the standard game: five computers per player, four
    operating systems, exploit powers 0..14 with geometric rarity, four
    starting exploits, three hidden starting patches per computer, and a
    1/6 chance per round of finding a new exploit.
    """

    num_players: int = 2
    computers_per_player: int = 5
    max_accounts: int = 4
    num_os: int = 4
    max_power: int = 14
    rounds: int = 20
    starting_exploits: int = 4
    exploit_gain_prob: float = 1.0 / 6.0
    starting_patches_per_computer: int = 3
    detection_probs: dict[ActionKind, float] = field(
        default_factory=lambda: dict(DEFAULT_DETECTION_PROBS)
    )

    def __post_init__(self) -> None:
        if self.num_players < 2:
            raise ValueError("need at least two players")
        if self.computers_per_player * self.num_players < self.num_players:
            raise ValueError("need at least one computer per player")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.max_accounts < 1:
            raise ValueError("max_accounts must be >= 1")
        if self.num_os < 1 or self.max_power < 0:
            raise ValueError("invalid exploit space")
        if self.starting_exploits < 0 or self.starting_patches_per_computer < 0:
            raise ValueError("starting asset counts must be non-negative")
        if not 0.0 <= self.exploit_gain_prob <= 1.0:
            raise ValueError("exploit_gain_prob must be a probability")
        probs = dict(self.detection_probs)
        for kind in ActionKind:
            p = probs.setdefault(kind, DEFAULT_DETECTION_PROBS[kind])
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"detection probability for {kind.value} out of range")
        object.__setattr__(self, "detection_probs", probs)

    @property
    def num_computers(self) -> int:
        return self.computers_per_player * self.num_players

    @property
    def num_powers(self) -> int:
        return self.max_power + 1

    @property
    def num_exploits(self) -> int:
        """Size of the (os, power) identity space."""
        return self.num_os * self.num_powers

    def to_dict(self) -> dict:
        return {
            "num_players": self.num_players,
            "computers_per_player": self.computers_per_player,
            "max_accounts": self.max_accounts,
            "num_os": self.num_os,
            "max_power": self.max_power,
            "rounds": self.rounds,
            "starting_exploits": self.starting_exploits,
            "exploit_gain_prob": self.exploit_gain_prob,
            "starting_patches_per_computer": self.starting_patches_per_computer,
            "detection_probs": {k.value: v for k, v in self.detection_probs.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GameConfig":
        data = dict(data)
        if "detection_probs" in data:
            data["detection_probs"] = {
                ActionKind(k): float(v) for k, v in data["detection_probs"].items()
            }
        return cls(**data)
