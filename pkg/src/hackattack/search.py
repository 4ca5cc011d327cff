"""The net-computers evaluation function and the tree-search strategies.

Four strategies share one per-computer search skeleton:

* random           - uniform choice among the legal actions.
* one-step         - depth-1 search: best expected evaluation after one move.
* no-response      - k own moves of the same computer in a row (default 2),
                     ignoring the opponent between them.
* random-response  - one own move, then an opponent layer that averages the
                     evaluation over abstract opponent moves weighted by the
                     chance the opponent can make them.

Chance nodes average child values by outcome probability.  Because the
evaluation decomposes per computer, expected leaf values are computed as
the running evaluation plus closed-form deltas instead of materializing
leaf states; the tests cross-check this against a naive tree.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .actions import Action
from .belief import PlayerView
from .config import ActionKind, GameConfig
from .exploits import Exploit, exploit_index

TIE_EPS = 1e-9
WEIGHT_EPS = 1e-12


@dataclass(frozen=True)
class StrategyKind:
    name: str
    depth: int = 2

    RANDOM = "random"
    ONE_STEP = "one-step"
    RANDOM_RESPONSE = "random-response"
    NO_RESPONSE = "no-response"

    def __post_init__(self) -> None:
        if self.name not in (
            self.RANDOM, self.ONE_STEP, self.RANDOM_RESPONSE, self.NO_RESPONSE
        ):
            raise ValueError(f"unknown strategy {self.name!r}")
        if self.depth < 1:
            raise ValueError("search depth must be >= 1")

    def __str__(self) -> str:
        if self.name == self.NO_RESPONSE:
            return f"{self.name}:{self.depth}"
        return self.name


def parse_strategy(token: str) -> StrategyKind:
    """Parse "random", "one-step", "random-response", "no-response[:k]"."""
    token = token.strip().lower()
    if token.startswith(StrategyKind.NO_RESPONSE):
        rest = token[len(StrategyKind.NO_RESPONSE):]
        if rest == "":
            return StrategyKind(StrategyKind.NO_RESPONSE, 2)
        if rest.startswith(":"):
            try:
                return StrategyKind(StrategyKind.NO_RESPONSE, int(rest[1:]))
            except ValueError as err:
                raise ValueError(f"bad search depth in strategy token {token!r}") from err
    if token in (StrategyKind.RANDOM, StrategyKind.ONE_STEP, StrategyKind.RANDOM_RESPONSE):
        return StrategyKind(token)
    raise ValueError(f"unknown strategy token {token!r}")


PAPER_STRATEGIES = ("random", "one-step", "random-response", "no-response:2")


def evaluate(view: PlayerView) -> float:
    """Computers we control minus the expected computers any opponent holds."""
    total = float(view.controlled_count())
    for q in view.opponents():
        total -= view.belief.expected_opponent_computers(q)
    return total


# --- hypothetical search positions -----------------------------------------


class Position:
    """A lightweight copy-on-write projection of a PlayerView.

    Rows are shared with the parent position (or the originating view) and
    replaced, never mutated, when an outcome touches them.
    """

    __slots__ = ("config", "owner", "opponent", "os", "patch", "opp", "own",
                 "exploits", "opp_exploits")

    config: GameConfig

    @classmethod
    def from_view(cls, view: PlayerView) -> "Position":
        if view.config.num_players != 2:
            raise ValueError("search strategies are defined for two-player games")
        self = cls.__new__(cls)
        self.config = view.config
        self.owner = view.owner
        self.opponent = 1 - view.owner
        b = view.belief
        self.os = list(b.os)
        self.patch = list(b.patch)
        self.opp = list(b.accounts[self.opponent])
        self.own = list(view.own_counts)
        self.exploits = tuple(
            (exploit_index(e, view.config), e.os, e.power)
            for e in sorted(view.own_exploits, key=Exploit.sort_key)
        )
        self.opp_exploits = b.exploits[self.opponent]
        return self

    def clone(self) -> "Position":
        dup = Position.__new__(Position)
        dup.config = self.config
        dup.owner = self.owner
        dup.opponent = self.opponent
        dup.os = list(self.os)
        dup.patch = list(self.patch)
        dup.opp = list(self.opp)
        dup.own = list(self.own)
        dup.exploits = self.exploits
        dup.opp_exploits = self.opp_exploits
        return dup

    def evaluate(self) -> float:
        total = float(sum(1 for n in self.own if n > 0))
        for row in self.opp:
            total -= 1.0 - row[0]
        return total

    def p_hack(self, e_idx: int, e_os: int, target: int) -> float:
        return self.os[target][e_os] * (1.0 - self.patch[target][e_idx])


@dataclass(frozen=True)
class Candidate:
    kind: ActionKind
    computer: int
    target: int | None = None
    e_idx: int | None = None
    e_os: int | None = None


@dataclass(frozen=True)
class Branch:
    weight: float
    eval_delta: float
    position: Position
    touched: int  # the one computer whose rows changed


def expand_outcomes(pos: Position, cand: Candidate) -> list[Branch]:
    """Chance-node children for one candidate action.

    Hack branches on success/failure, recon on the target's OS, scan on the
    opponent's count; clean collapses to its expected posterior; backdoor
    and patch are deterministic.  Detections and round grants are not
    modeled inside the search.
    """
    c = cand.computer
    kind = cand.kind
    out: list[Branch] = []
    if kind == ActionKind.HACK:
        y = cand.target
        p = pos.p_hack(cand.e_idx, cand.e_os, y)
        if p > WEIGHT_EPS:
            win = pos.clone()
            gained = 1.0 if win.own[y] == 0 else 0.0
            win.own[y] = min(pos.config.max_accounts, win.own[y] + 1)
            os_row = [0.0] * pos.config.num_os
            os_row[cand.e_os] = 1.0
            win.os[y] = os_row
            patch_row = list(win.patch[y])
            patch_row[cand.e_idx] = 0.0
            win.patch[y] = patch_row
            out.append(Branch(p, gained, win, y))
        if 1.0 - p > WEIGHT_EPS:
            lose = pos.clone()
            os_row = pos.os[y]
            pi = os_row[cand.e_os]
            beta = pos.patch[y][cand.e_idx]
            z = (1.0 - pi) + pi * beta
            if 0.0 < pi < 1.0 and z > WEIGHT_EPS:
                new_os = [x / z for x in os_row]
                new_os[cand.e_os] = pi * beta / z
                total = sum(new_os)
                lose.os[y] = [x / total for x in new_os]
            patch_row = list(lose.patch[y])
            patch_row[cand.e_idx] = 1.0
            lose.patch[y] = patch_row
            out.append(Branch(1.0 - p, 0.0, lose, y))
    elif kind == ActionKind.RECON:
        y = cand.target
        for o, w in enumerate(pos.os[y]):
            if w > WEIGHT_EPS:
                child = pos.clone()
                os_row = [0.0] * pos.config.num_os
                os_row[o] = 1.0
                child.os[y] = os_row
                out.append(Branch(w, 0.0, child, y))
    elif kind == ActionKind.SCAN:
        row = pos.opp[c]
        presence = 1.0 - row[0]
        for r, w in enumerate(row):
            if w > WEIGHT_EPS:
                child = pos.clone()
                new_row = [0.0] * len(row)
                new_row[r] = 1.0
                child.opp[c] = new_row
                delta = presence - (0.0 if r == 0 else 1.0)
                out.append(Branch(w, delta, child, c))
    elif kind == ActionKind.CLEAN:
        m = pos.own[c]
        row = pos.opp[c]
        child = pos.clone()
        new_row = [0.0] * len(row)
        removed_presence = 0.0
        for r, w in enumerate(row):
            new_row[max(0, r - m)] += w
            if 1 <= r <= m:
                removed_presence += w
        child.opp[c] = new_row
        out.append(Branch(1.0, removed_presence, child, c))
    elif kind == ActionKind.BACKDOOR:
        child = pos.clone()
        child.own[c] = min(pos.config.max_accounts, child.own[c] + 1)
        out.append(Branch(1.0, 0.0, child, c))
    elif kind == ActionKind.PATCH:
        child = pos.clone()
        patch_row = list(child.patch[c])
        patch_row[cand.e_idx] = 1.0
        child.patch[c] = patch_row
        out.append(Branch(1.0, 0.0, child, c))
    else:  # pragma: no cover - exhaustive
        raise ValueError(f"cannot expand {kind}")
    return out


def expected_delta(pos: Position, cand: Candidate) -> float:
    """Closed-form expected change of the evaluation after one action."""
    if cand.kind == ActionKind.HACK:
        if pos.own[cand.target] > 0:
            return 0.0
        return pos.p_hack(cand.e_idx, cand.e_os, cand.target)
    if cand.kind == ActionKind.CLEAN:
        row = pos.opp[cand.computer]
        m = min(pos.own[cand.computer], len(row) - 1)
        return sum(row[1 : m + 1])
    return 0.0  # scouting and fortifying moves do not move the evaluation


def best_leaf_delta(pos: Position, c: int) -> float:
    """Max expected one-move gain from computer `c` (final search layer)."""
    best = 0.0
    row = pos.opp[c]
    m = min(pos.own[c], len(row) - 1)
    gain = 0.0
    for r in range(1, m + 1):
        gain += row[r]
    if gain > best:
        best = gain
    own = pos.own
    os_table = pos.os
    patch = pos.patch
    for y in range(pos.config.num_computers):
        if y == c or own[y] > 0:
            continue
        os_row = os_table[y]
        patch_row = patch[y]
        for idx, e_os, _pw in pos.exploits:
            v = os_row[e_os] * (1.0 - patch_row[idx])
            if v > best:
                best = v
    return best


def _mid_candidates(pos: Position, c: int) -> list[Candidate]:
    """Candidate actions at hypothetical (non-root) decision layers."""
    cands: list[Candidate] = []
    n_c = pos.config.num_computers
    for y in range(n_c):
        if y == c:
            continue
        best_per_os: dict[int, tuple[float, int]] = {}
        os_row = pos.os[y]
        patch_row = pos.patch[y]
        for idx, e_os, _pw in pos.exploits:
            p = os_row[e_os] * (1.0 - patch_row[idx])
            cur = best_per_os.get(e_os)
            if cur is None or p > cur[0]:
                best_per_os[e_os] = (p, idx)
        for e_os in sorted(best_per_os):
            _p, idx = best_per_os[e_os]
            cands.append(Candidate(ActionKind.HACK, c, target=y, e_idx=idx, e_os=e_os))
    for y in range(n_c):
        if y != c:
            cands.append(Candidate(ActionKind.RECON, c, target=y))
    cands.append(Candidate(ActionKind.CLEAN, c))
    cands.append(Candidate(ActionKind.SCAN, c))
    if pos.own[c] < pos.config.max_accounts:
        cands.append(Candidate(ActionKind.BACKDOOR, c))
    for idx, e_os, _pw in pos.exploits:
        if pos.patch[c][idx] < 1.0 - 1e-9:
            cands.append(Candidate(ActionKind.PATCH, c, e_idx=idx, e_os=e_os))
    return cands


def root_candidates(
    pos: Position, c: int, legal: list[Action]
) -> list[tuple[Candidate, Action]]:
    """Prune the engine's legal actions to the searched candidate set.

    Hacks keep, per target and per OS, only the owned exploit with the best
    success chance (dominated alternatives share the same outcome shape with
    a worse branch weight).  Everything else passes through.
    """
    hacks: dict[tuple[int, int], tuple[float, Candidate, Action]] = {}
    rest: list[tuple[Candidate, Action]] = []
    for a in legal:
        if a.kind == ActionKind.HACK:
            idx = exploit_index(a.exploit, pos.config)
            p = pos.p_hack(idx, a.exploit.os, a.target)
            key = (a.target, a.exploit.os)
            cur = hacks.get(key)
            if cur is None or p > cur[0]:
                hacks[key] = (
                    p,
                    Candidate(ActionKind.HACK, c, target=a.target, e_idx=idx, e_os=a.exploit.os),
                    a,
                )
        elif a.kind == ActionKind.PATCH:
            idx = exploit_index(a.exploit, pos.config)
            rest.append(
                (Candidate(ActionKind.PATCH, c, e_idx=idx, e_os=a.exploit.os), a)
            )
        elif a.kind == ActionKind.RECON:
            rest.append((Candidate(ActionKind.RECON, c, target=a.target), a))
        else:
            rest.append((Candidate(a.kind, c), a))
    out = [(cand, act) for (_p, cand, act) in (hacks[k] for k in sorted(hacks))]
    out.extend(rest)
    return out


# --- the opponent layer of random-response ----------------------------------


class OpponentLayer:
    """Expected evaluation drop from one random opponent move.

    Only account-moving templates (their cleans, their hacks) change the
    net-computers evaluation; scouting/fortifying templates are weight
    without effect.  Template weights follow the opponent-move distribution:
    P(they control the source) times P(they own the exploit).
    """

    __slots__ = ("n", "n_os", "n_pw", "bracket_e", "ctrl", "mu", "cterm", "h",
                 "S", "C", "H1", "H2", "opp_exploits")

    def __init__(self, pos: Position):
        config = pos.config
        self.n = config.num_computers
        self.n_os = config.num_os
        self.n_pw = config.num_powers
        self.opp_exploits = pos.opp_exploits
        self.bracket_e = sum(self.opp_exploits)
        self.ctrl = [0.0] * self.n
        self.mu = [0.0] * self.n
        self.cterm = [0.0] * self.n
        self.h = [0.0] * self.n
        for c in range(self.n):
            self.ctrl[c], self.mu[c] = self._row_stats(pos.opp[c])
            self.cterm[c] = self._clean_term(pos.own[c], self.ctrl[c], self.mu[c])
            self.h[c] = self._hack_term(pos, c)
        self.S = sum(self.ctrl)
        self.C = sum(self.cterm)
        self.H1 = sum(self.h)
        self.H2 = sum(ct * hv for ct, hv in zip(self.ctrl, self.h))

    @staticmethod
    def _row_stats(row: list[float]) -> tuple[float, float]:
        ctrl = 1.0 - row[0]
        mu = 0.0
        for r in range(1, len(row)):
            mu += r * row[r]
        return ctrl, mu

    @staticmethod
    def _clean_term(own: int, ctrl: float, mu: float) -> float:
        """ctrl-weighted evaluation change if they clean computer c."""
        if own <= 0:
            return 0.0
        kept = min(1.0, max(0.0, own - mu))
        return ctrl * (kept - 1.0)

    def _hack_term(self, pos: Position, y: int) -> float:
        """Presence they would gain on y, weighted by their exploit odds."""
        p_absent = pos.opp[y][0]
        if p_absent <= 0.0:
            return 0.0
        os_row = pos.os[y]
        patch_row = pos.patch[y]
        opp_e = self.opp_exploits
        total = 0.0
        base = 0
        for o in range(self.n_os):
            po = os_row[o]
            if po > 0.0:
                s = 0.0
                for k in range(base, base + self.n_pw):
                    s += opp_e[k] * (1.0 - patch_row[k])
                total += po * s
            base += self.n_pw
        return p_absent * total

    def value(self, pos: Position, touched: int | None) -> float:
        """Expected evaluation delta from the opponent's random move in
        `pos`, reusing root sums and recomputing only the touched computer."""
        S, C, H1, H2 = self.S, self.C, self.H1, self.H2
        if touched is not None:
            ctrl, mu = self._row_stats(pos.opp[touched])
            cterm = self._clean_term(pos.own[touched], ctrl, mu)
            h = self._hack_term(pos, touched)
            S += ctrl - self.ctrl[touched]
            C += cterm - self.cterm[touched]
            H1 += h - self.h[touched]
            H2 += ctrl * h - self.ctrl[touched] * self.h[touched]
        if S <= 1e-9:
            return 0.0
        bracket = 3.0 + (self.n - 1) + self.n * self.bracket_e
        return (C - S * H1 + H2) / (S * bracket)


# --- the search itself -------------------------------------------------------


def _no_response_value(pos: Position, running_eval: float, c: int, plies: int) -> float:
    if plies <= 1:
        return running_eval + best_leaf_delta(pos, c)
    best = None
    for cand in _mid_candidates(pos, c):
        if plies == 2:
            total = 0.0
            for br in expand_outcomes(pos, cand):
                total += br.weight * (
                    running_eval + br.eval_delta + best_leaf_delta(br.position, c)
                )
        else:
            total = 0.0
            for br in expand_outcomes(pos, cand):
                total += br.weight * _no_response_value(
                    br.position, running_eval + br.eval_delta, c, plies - 1
                )
        if best is None or total > best:
            best = total
    return best if best is not None else running_eval


def scored_candidates(
    view: PlayerView, computer: int, kind: StrategyKind, legal: list[Action],
    pos: Position | None = None,
) -> list[tuple[Action, float, Candidate]]:
    """Score every root candidate; shared by search() and choose_turn()."""
    if pos is None:
        pos = Position.from_view(view)
    base_eval = pos.evaluate()
    cands = root_candidates(pos, computer, legal)
    out: list[tuple[Action, float, Candidate]] = []
    if kind.name == StrategyKind.ONE_STEP or (
        kind.name == StrategyKind.NO_RESPONSE and kind.depth == 1
    ):
        for cand, action in cands:
            out.append((action, base_eval + expected_delta(pos, cand), cand))
    elif kind.name == StrategyKind.NO_RESPONSE:
        for cand, action in cands:
            total = 0.0
            for br in expand_outcomes(pos, cand):
                total += br.weight * _no_response_value(
                    br.position, base_eval + br.eval_delta, computer, kind.depth - 1
                )
            out.append((action, total, cand))
    elif kind.name == StrategyKind.RANDOM_RESPONSE:
        layer = OpponentLayer(pos)
        for cand, action in cands:
            total = 0.0
            for br in expand_outcomes(pos, cand):
                total += br.weight * (
                    base_eval + br.eval_delta + layer.value(br.position, br.touched)
                )
            out.append((action, total, cand))
    else:
        raise ValueError(f"scored_candidates does not apply to {kind}")
    return out


def _pick(
    scored: list[tuple[Action, float, Candidate]], rng: random.Random
) -> tuple[Action, float, Candidate]:
    best = max(s for _, s, _ in scored)
    tol = TIE_EPS * max(1.0, abs(best))
    ties = [entry for entry in scored if entry[1] >= best - tol]
    return ties[rng.randrange(len(ties))]


def search(
    view: PlayerView,
    computer: int,
    kind: StrategyKind,
    legal: list[Action],
    rng: random.Random | None = None,
) -> tuple[Action, float]:
    """Pick the best action for one computer (ties broken uniformly)."""
    rng = rng if rng is not None else random.Random(0)
    if kind.name == StrategyKind.RANDOM:
        return legal[rng.randrange(len(legal))], 0.0
    scored = scored_candidates(view, computer, kind, legal)
    action, score, _cand = _pick(scored, rng)
    return action, score


def _commit_most_likely(pos: Position, cand: Candidate) -> Position:
    branches = expand_outcomes(pos, cand)
    best = branches[0]
    for br in branches[1:]:
        if br.weight > best.weight:
            best = br
    return best.position


def choose_turn(
    view: PlayerView,
    kind: StrategyKind,
    legal_by_computer: dict[int, list[Action]],
    rng: random.Random,
) -> list[Action]:
    """One action per controlled computer, decided computer by computer.

    Computers are visited in ascending id; after each search the chosen
    action's most likely outcome is committed to a scratch position so the
    next computer plans against it.
    """
    computers = sorted(legal_by_computer)
    if kind.name == StrategyKind.RANDOM:
        return [
            legal_by_computer[c][rng.randrange(len(legal_by_computer[c]))]
            for c in computers
        ]
    pos = Position.from_view(view)
    actions: list[Action] = []
    for c in computers:
        scored = scored_candidates(view, c, kind, legal_by_computer[c], pos=pos)
        action, _score, cand = _pick(scored, rng)
        actions.append(action)
        pos = _commit_most_likely(pos, cand)
    return actions


def strategy_rng(seed: int, player: int) -> random.Random:
    """Per-player tie-break stream derived from the game seed.

    Kept separate from the engine stream so that replaying a record (which
    makes no strategy calls) consumes the engine stream identically.
    """
    return random.Random((seed * 1000003 + 7919 * (player + 1)) & 0xFFFFFFFFFFFF)
