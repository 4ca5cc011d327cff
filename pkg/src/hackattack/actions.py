"""Actions players submit and the observations the engine hands back.

Every observation is addressed to exactly one player.  A player's view of
the game is reconstructable from their own actions plus their observation
stream; nothing else ever crosses the information boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import ActionKind, GameConfig, REMOTE_KINDS
from .exploits import Exploit


@dataclass(frozen=True)
class Action:
    actor: int
    computer: int
    kind: ActionKind
    target: int | None = None
    exploit: Exploit | None = None

    def __post_init__(self) -> None:
        if self.kind in REMOTE_KINDS:
            if self.target is None:
                raise ValueError(f"{self.kind.value} requires a target")
            if self.target == self.computer:
                raise ValueError(f"{self.kind.value} cannot target its own computer")
        elif self.target is not None:
            raise ValueError(f"{self.kind.value} takes no separate target")
        if self.kind in (ActionKind.HACK, ActionKind.PATCH):
            if self.exploit is None:
                raise ValueError(f"{self.kind.value} requires an exploit")
        elif self.exploit is not None:
            raise ValueError(f"{self.kind.value} takes no exploit")

    def to_dict(self) -> dict:
        out: dict = {"actor": self.actor, "computer": self.computer, "kind": self.kind.value}
        if self.target is not None:
            out["target"] = self.target
        if self.exploit is not None:
            out["exploit"] = self.exploit.to_list()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Action":
        return cls(
            actor=int(data["actor"]),
            computer=int(data["computer"]),
            kind=ActionKind(data["kind"]),
            target=data.get("target"),
            exploit=Exploit.from_list(data["exploit"]) if "exploit" in data else None,
        )


# --- Observation payloads -------------------------------------------------

@dataclass(frozen=True)
class HackResult:
    target: int
    exploit: Exploit
    success: bool
    new_count: int | None  # actor's account count on the target after success


@dataclass(frozen=True)
class BackdoorApplied:
    computer: int
    new_count: int


@dataclass(frozen=True)
class CleanResult:
    computer: int
    own_count: int
    removed: dict[int, int] = field(default_factory=dict)


@dataclass(frozen=True)
class PatchApplied:
    computer: int
    exploit: Exploit


@dataclass(frozen=True)
class ReconResult:
    target: int
    os: int
    unblocked: tuple[Exploit, ...]  # owned matching-OS exploits that would work
    blocked: tuple[Exploit, ...]    # owned matching-OS exploits the target is patched against


@dataclass(frozen=True)
class ScanResult:
    computer: int
    counts: dict[int, int] = field(default_factory=dict)  # player -> accounts on computer


@dataclass(frozen=True)
class Detected:
    actor: int
    kind: ActionKind
    source: int | None  # acting computer when seen from the acting side, else unknown
    target: int


@dataclass(frozen=True)
class AccountsLost:
    computer: int
    remaining: int


@dataclass(frozen=True)
class ExploitGained:
    exploit: Exploit


@dataclass(frozen=True)
class GameEnd:
    winner: int | None  # None for a tie
    counts: tuple[int, ...]


Payload = (
    HackResult
    | BackdoorApplied
    | CleanResult
    | PatchApplied
    | ReconResult
    | ScanResult
    | Detected
    | AccountsLost
    | ExploitGained
    | GameEnd
)

_PAYLOAD_TYPES = {
    "hack_result": HackResult,
    "backdoor_applied": BackdoorApplied,
    "clean_result": CleanResult,
    "patch_applied": PatchApplied,
    "recon_result": ReconResult,
    "scan_result": ScanResult,
    "detected": Detected,
    "accounts_lost": AccountsLost,
    "exploit_gained": ExploitGained,
    "game_end": GameEnd,
}
_PAYLOAD_NAMES = {cls: name for name, cls in _PAYLOAD_TYPES.items()}


@dataclass(frozen=True)
class Observation:
    recipient: int
    payload: Payload

    def to_dict(self) -> dict:
        p = self.payload
        name = _PAYLOAD_NAMES[type(p)]
        data: dict
        if isinstance(p, HackResult):
            data = {
                "target": p.target,
                "exploit": p.exploit.to_list(),
                "success": p.success,
                "new_count": p.new_count,
            }
        elif isinstance(p, BackdoorApplied):
            data = {"computer": p.computer, "new_count": p.new_count}
        elif isinstance(p, CleanResult):
            data = {
                "computer": p.computer,
                "own_count": p.own_count,
                "removed": {str(k): v for k, v in sorted(p.removed.items())},
            }
        elif isinstance(p, PatchApplied):
            data = {"computer": p.computer, "exploit": p.exploit.to_list()}
        elif isinstance(p, ReconResult):
            data = {
                "target": p.target,
                "os": p.os,
                "unblocked": [e.to_list() for e in p.unblocked],
                "blocked": [e.to_list() for e in p.blocked],
            }
        elif isinstance(p, ScanResult):
            data = {
                "computer": p.computer,
                "counts": {str(k): v for k, v in sorted(p.counts.items())},
            }
        elif isinstance(p, Detected):
            data = {
                "actor": p.actor,
                "kind": p.kind.value,
                "source": p.source,
                "target": p.target,
            }
        elif isinstance(p, AccountsLost):
            data = {"computer": p.computer, "remaining": p.remaining}
        elif isinstance(p, ExploitGained):
            data = {"exploit": p.exploit.to_list()}
        elif isinstance(p, GameEnd):
            data = {"winner": p.winner, "counts": list(p.counts)}
        else:  # pragma: no cover - exhaustive above
            raise TypeError(f"unknown payload {p!r}")
        return {"recipient": self.recipient, "type": name, "data": data}

    @classmethod
    def from_dict(cls, obj: dict) -> "Observation":
        name = obj["type"]
        data = obj["data"]
        ptype = _PAYLOAD_TYPES[name]
        payload: Payload
        if ptype is HackResult:
            payload = HackResult(
                target=int(data["target"]),
                exploit=Exploit.from_list(data["exploit"]),
                success=bool(data["success"]),
                new_count=data["new_count"],
            )
        elif ptype is BackdoorApplied:
            payload = BackdoorApplied(int(data["computer"]), int(data["new_count"]))
        elif ptype is CleanResult:
            payload = CleanResult(
                computer=int(data["computer"]),
                own_count=int(data["own_count"]),
                removed={int(k): int(v) for k, v in data["removed"].items()},
            )
        elif ptype is PatchApplied:
            payload = PatchApplied(int(data["computer"]), Exploit.from_list(data["exploit"]))
        elif ptype is ReconResult:
            payload = ReconResult(
                target=int(data["target"]),
                os=int(data["os"]),
                unblocked=tuple(Exploit.from_list(e) for e in data["unblocked"]),
                blocked=tuple(Exploit.from_list(e) for e in data["blocked"]),
            )
        elif ptype is ScanResult:
            payload = ScanResult(
                computer=int(data["computer"]),
                counts={int(k): int(v) for k, v in data["counts"].items()},
            )
        elif ptype is Detected:
            payload = Detected(
                actor=int(data["actor"]),
                kind=ActionKind(data["kind"]),
                source=data["source"],
                target=int(data["target"]),
            )
        elif ptype is AccountsLost:
            payload = AccountsLost(int(data["computer"]), int(data["remaining"]))
        elif ptype is ExploitGained:
            payload = ExploitGained(Exploit.from_list(data["exploit"]))
        else:
            payload = GameEnd(data["winner"], tuple(int(c) for c in data["counts"]))
        return cls(recipient=int(obj["recipient"]), payload=payload)


def validate_action_shape(action: Action, config: GameConfig) -> None:
    """Range checks independent of game state."""
    n = config.num_computers
    if not 0 <= action.actor < config.num_players:
        raise ValueError("unknown actor")
    if not 0 <= action.computer < n:
        raise ValueError("acting computer out of range")
    if action.target is not None and not 0 <= action.target < n:
        raise ValueError("target out of range")
    if action.exploit is not None:
        e = action.exploit
        if not (0 <= e.os < config.num_os and 0 <= e.power <= config.max_power):
            raise ValueError("exploit outside the identity space")
