"""Per-player probabilistic knowledge and its Bayes-rule maintenance.

A Belief holds four factored tables: per-computer OS distributions,
per-(computer, exploit) patch probabilities, per-(player, computer)
account-count distributions, and per-(player, exploit) ownership
probabilities.  The owner's own rows are exact.  Patch entries are
conditioned on the OS matching the exploit — the only situation in which
a patch matters — which keeps the failed-hack update exact within the
factorization: a failure means either the OS was wrong or the computer is
patched, so the entry snaps to 1 while the OS row is reweighted.
"""

from __future__ import annotations

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
)
from .config import ActionKind, GameConfig
from .exploits import (
    Exploit,
    exploit_from_index,
    exploit_index,
    exploit_weight,
    initial_patch_prior,
    starting_hand_prior,
)

PROB_FLOOR = 1e-12


def _onehot(size: int, hot: int) -> list[float]:
    row = [0.0] * size
    row[hot] = 1.0
    return row


def _normalized(row: list[float]) -> list[float]:
    total = sum(row)
    if total <= PROB_FLOOR:
        raise ValueError("cannot normalize an all-zero probability row")
    return [x / total for x in row]


@dataclass
class OpponentTemplate:
    """An abstract opponent move weighted by the chance they can make it."""

    kind: ActionKind
    computer: int
    target: int | None
    exploit: Exploit | None
    weight: float


class Belief:
    """The four probability tables for one player."""

    def __init__(self, config: GameConfig, owner: int):
        self.config = config
        self.owner = owner
        n_c, n_os, n_e = config.num_computers, config.num_os, config.num_exploits
        load = 1.0 / n_c
        patch_by_power = initial_patch_prior(
            config.max_power, config.starting_patches_per_computer
        )
        hand = starting_hand_prior(config.num_os, config.max_power, config.starting_exploits)

        self.os: list[list[float]] = [[1.0 / n_os] * n_os for _ in range(n_c)]
        self.patch: list[list[float]] = [
            [patch_by_power[i % config.num_powers] for i in range(n_e)] for _ in range(n_c)
        ]
        self.accounts: list[list[list[float]]] = []
        self.exploits: list[list[float]] = []
        for p in range(config.num_players):
            if p == owner:
                self.accounts.append(
                    [_onehot(config.max_accounts + 1, 0) for _ in range(n_c)]
                )
                self.exploits.append([0.0] * n_e)
            else:
                self.accounts.append(
                    [[1.0 - load, load] + [0.0] * (config.max_accounts - 1) for _ in range(n_c)]
                )
                self.exploits.append(list(hand))

    # -- hard facts ---------------------------------------------------------

    def set_own_start(self, computer: int, exploits: set[Exploit]) -> None:
        self.accounts[self.owner][computer] = _onehot(self.config.max_accounts + 1, 1)
        for e in exploits:
            self.exploits[self.owner][exploit_index(e, self.config)] = 1.0

    def set_own_count(self, computer: int, count: int) -> None:
        self.accounts[self.owner][computer] = _onehot(self.config.max_accounts + 1, count)

    def set_own_exploit(self, e: Exploit) -> None:
        self.exploits[self.owner][exploit_index(e, self.config)] = 1.0

    def set_os_fact(self, computer: int, os: int) -> None:
        self.os[computer] = _onehot(self.config.num_os, os)

    def set_patch_fact(self, computer: int, e: Exploit, patched: bool) -> None:
        self.patch[computer][exploit_index(e, self.config)] = 1.0 if patched else 0.0

    def set_opponent_count(self, player: int, computer: int, count: int) -> None:
        self.accounts[player][computer] = _onehot(self.config.max_accounts + 1, count)

    # -- Bayes updates ------------------------------------------------------

    def hack_failure_update(self, target: int, e: Exploit) -> None:
        """Failure means wrong OS or a patch; reweight the OS row and snap
        the (OS-conditional) patch entry to certain."""
        idx = exploit_index(e, self.config)
        row = self.os[target]
        pi = min(max(row[e.os], PROB_FLOOR), 1.0 - PROB_FLOOR)
        beta = min(max(self.patch[target][idx], PROB_FLOOR), 1.0 - PROB_FLOOR)
        if row[e.os] >= 1.0:  # OS known to match: failure proves the patch
            self.patch[target][idx] = 1.0
            return
        if row[e.os] <= 0.0:  # OS known to differ: failure was certain, no news
            return
        z = (1.0 - pi) + pi * beta
        posterior = [x / z for x in row]
        posterior[e.os] = pi * beta / z
        self.os[target] = _normalized(posterior)
        self.patch[target][idx] = 1.0

    def clean_result_update(self, computer: int, opponent: int, removed: int, own: int) -> None:
        row = self.accounts[opponent][computer]
        size = len(row)
        if removed < own:
            # Fewer removed than we could remove: they had exactly `removed`.
            self.accounts[opponent][computer] = _onehot(size, 0)
            return
        mass = sum(row[own:])
        if mass <= PROB_FLOOR:
            self.accounts[opponent][computer] = _onehot(size, 0)
            return
        new = [0.0] * size
        for r in range(own, size):
            new[r - own] = row[r] / mass
        self.accounts[opponent][computer] = _normalized(new)

    def condition_present(self, player: int, computer: int) -> None:
        row = self.accounts[player][computer]
        mass = sum(row[1:])
        if mass <= PROB_FLOOR:
            # Hard zero contradicted by fresh evidence; fall back to the
            # minimum presence consistent with what was seen.
            self.accounts[player][computer] = _onehot(len(row), 1)
            return
        new = [0.0] + [x / mass for x in row[1:]]
        self.accounts[player][computer] = _normalized(new)

    def hack_success_marginal(self, actor: int, target: int) -> float:
        """Chance an unseen hack by `actor` on `target` succeeded, averaging
        over which exploit they might own."""
        weights = self.exploits[actor]
        total = sum(weights)
        if total <= PROB_FLOOR:
            return 0.0
        os_row = self.os[target]
        patch_row = self.patch[target]
        acc = 0.0
        n_pw = self.config.num_powers
        for i, w in enumerate(weights):
            if w > 0.0:
                acc += w * os_row[i // n_pw] * (1.0 - patch_row[i])
        return acc / total

    def shift_presence(self, player: int, computer: int, prob: float) -> None:
        """Mix in a one-account gain with probability `prob` (capped)."""
        if prob <= 0.0:
            return
        row = self.accounts[player][computer]
        size = len(row)
        new = [(1.0 - prob) * x for x in row]
        for r in range(size):
            new[min(r + 1, size - 1)] += prob * row[r]
        self.accounts[player][computer] = _normalized(new)

    def detected_update(self, actor: int, kind: ActionKind, source: int | None, target: int) -> None:
        if source is not None:
            self.condition_present(actor, source)
        if kind == ActionKind.HACK:
            s_hat = self.hack_success_marginal(actor, target)
            self.shift_presence(actor, target, s_hat)

    def advance_round(self) -> None:
        """Predict step: opponents may have gained an exploit this round."""
        gain = self.config.exploit_gain_prob
        if gain <= 0.0:
            return
        for p in range(self.config.num_players):
            if p == self.owner:
                continue
            row = self.exploits[p]
            for i in range(len(row)):
                w = exploit_weight(exploit_from_index(i, self.config), self.config)
                row[i] = row[i] + (1.0 - row[i]) * gain * w

    # -- derived quantities ---------------------------------------------------

    def expected_opponent_computers(self, opponent: int) -> float:
        return sum(1.0 - row[0] for row in self.accounts[opponent])

    def p_hack_success(self, e: Exploit, target: int) -> float:
        idx = exploit_index(e, self.config)
        return self.os[target][e.os] * (1.0 - self.patch[target][idx])

    def opponent_move_distribution(
        self, opponent: int, prune: float = 1e-6
    ) -> list[OpponentTemplate]:
        """Abstract opponent moves weighted by the chance they have the
        resources (a controlled source computer, an owned exploit)."""
        n_c = self.config.num_computers
        ctrl = [1.0 - self.accounts[opponent][c][0] for c in range(n_c)]
        own_e = self.exploits[opponent]
        templates: list[OpponentTemplate] = []
        for x in range(n_c):
            cx = ctrl[x]
            if cx <= 0.0:
                continue
            templates.append(OpponentTemplate(ActionKind.CLEAN, x, None, None, cx))
            templates.append(OpponentTemplate(ActionKind.BACKDOOR, x, None, None, cx))
            templates.append(OpponentTemplate(ActionKind.SCAN, x, None, None, cx))
            for i, we in enumerate(own_e):
                if we > 0.0:
                    e = exploit_from_index(i, self.config)
                    templates.append(
                        OpponentTemplate(ActionKind.PATCH, x, None, e, cx * we)
                    )
            for y in range(n_c):
                if y == x:
                    continue
                templates.append(OpponentTemplate(ActionKind.RECON, x, y, None, cx))
                for i, we in enumerate(own_e):
                    if we > 0.0:
                        e = exploit_from_index(i, self.config)
                        templates.append(
                            OpponentTemplate(ActionKind.HACK, x, y, e, cx * we)
                        )
        total = sum(t.weight for t in templates)
        if total <= 0.0:
            return []
        kept = [t for t in templates if t.weight / total >= prune]
        kept_total = sum(t.weight for t in kept)
        for t in kept:
            t.weight /= kept_total
        return kept

    # -- serialization --------------------------------------------------------

    def snapshot(self) -> dict:
        return {
            "owner": self.owner,
            "os": [list(r) for r in self.os],
            "patch": [list(r) for r in self.patch],
            "accounts": [[list(r) for r in rows] for rows in self.accounts],
            "exploits": [list(r) for r in self.exploits],
        }


class PlayerView:
    """One player's complete situation: exact own assets, hard-fact caches,
    and the probabilistic belief, all driven solely by observations."""

    def __init__(self, config: GameConfig, owner: int, start_computer: int, exploits: set[Exploit]):
        self.config = config
        self.owner = owner
        self.round = 1
        self.own_counts: list[int] = [0] * config.num_computers
        self.own_counts[start_computer] = 1
        self.own_exploits: set[Exploit] = set(exploits)
        self.known_os: dict[int, int] = {}
        self.known_patched: dict[tuple[int, int], bool] = {}
        self.belief = Belief(config, owner)
        self.belief.set_own_start(start_computer, self.own_exploits)

    # -- helpers ---------------------------------------------------------------

    def controlled(self) -> list[int]:
        return [c for c, n in enumerate(self.own_counts) if n > 0]

    def controlled_count(self) -> int:
        return sum(1 for n in self.own_counts if n > 0)

    def opponents(self) -> list[int]:
        return [p for p in range(self.config.num_players) if p != self.owner]

    def _set_own(self, computer: int, count: int) -> None:
        self.own_counts[computer] = count
        self.belief.set_own_count(computer, count)

    # -- observation stream ------------------------------------------------------

    def advance_round(self, round_number: int) -> None:
        self.round = round_number
        self.belief.advance_round()

    def observe(self, obs: Observation) -> None:
        if obs.recipient != self.owner:
            raise ValueError(
                f"observation for player {obs.recipient} delivered to {self.owner}"
            )
        p = obs.payload
        if isinstance(p, HackResult):
            if p.success:
                self._set_own(p.target, p.new_count)
                self.known_os[p.target] = p.exploit.os
                self.belief.set_os_fact(p.target, p.exploit.os)
                self.known_patched[(p.target, exploit_index(p.exploit, self.config))] = False
                self.belief.set_patch_fact(p.target, p.exploit, False)
            else:
                self.belief.hack_failure_update(p.target, p.exploit)
        elif isinstance(p, BackdoorApplied):
            self._set_own(p.computer, p.new_count)
        elif isinstance(p, CleanResult):
            for q, k in p.removed.items():
                self.belief.clean_result_update(p.computer, q, k, p.own_count)
        elif isinstance(p, PatchApplied):
            self.known_patched[(p.computer, exploit_index(p.exploit, self.config))] = True
            self.belief.set_patch_fact(p.computer, p.exploit, True)
        elif isinstance(p, ReconResult):
            self.known_os[p.target] = p.os
            self.belief.set_os_fact(p.target, p.os)
            for e in p.unblocked:
                self.known_patched[(p.target, exploit_index(e, self.config))] = False
                self.belief.set_patch_fact(p.target, e, False)
            for e in p.blocked:
                self.known_patched[(p.target, exploit_index(e, self.config))] = True
                self.belief.set_patch_fact(p.target, e, True)
        elif isinstance(p, ScanResult):
            for q, count in p.counts.items():
                if q != self.owner:
                    self.belief.set_opponent_count(q, p.computer, count)
        elif isinstance(p, Detected):
            self.belief.detected_update(p.actor, p.kind, p.source, p.target)
        elif isinstance(p, AccountsLost):
            self._set_own(p.computer, p.remaining)
        elif isinstance(p, ExploitGained):
            self.own_exploits.add(p.exploit)
            self.belief.set_own_exploit(p.exploit)
        elif isinstance(p, GameEnd):
            pass
        else:  # pragma: no cover - exhaustive
            raise TypeError(f"unknown payload {p!r}")

    def observe_own_action(self, action: Action) -> None:
        """Hook for own-action context that has no observation of its own.

        All current action results carry their context in the observation,
        so nothing is needed here; kept for interface clarity.
        """

    # -- serialization -------------------------------------------------------------

    def snapshot(self) -> dict:
        """The 'what I know' panel: own assets, hard facts, and headline
        probabilities (no hidden ground truth, by construction)."""
        opp_presence = {}
        for q in self.opponents():
            opp_presence[str(q)] = [
                1.0 - self.belief.accounts[q][c][0] for c in range(self.config.num_computers)
            ]
        return {
            "owner": self.owner,
            "round": self.round,
            "own_counts": list(self.own_counts),
            "own_exploits": [e.to_list() for e in sorted(self.own_exploits, key=Exploit.sort_key)],
            "known_os": {str(c): os for c, os in sorted(self.known_os.items())},
            "known_patched": [
                [c, exploit_from_index(i, self.config).to_list(), flag]
                for (c, i), flag in sorted(self.known_patched.items())
            ],
            "opponent_presence": opp_presence,
            "belief": self.belief.snapshot(),
        }


def initial_views(config: GameConfig, starts: list[int], hands: list[set[Exploit]]) -> list[PlayerView]:
    return [
        PlayerView(config, p, starts[p], hands[p]) for p in range(config.num_players)
    ]
