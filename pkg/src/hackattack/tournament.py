"""Seeded match execution and pairwise strategy comparison.

A match plays N games of one ordered strategy pairing; game i always uses
seed base_seed + i, so every match (and the full matrix) is reproducible
bit-for-bit.  Games are independent and can run across worker processes.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from scipy import stats as scipy_stats

from .config import GameConfig
from .record import GameRecord
from .runtime import GameRunner
from .search import StrategyKind, choose_turn, parse_strategy, strategy_rng


@dataclass(frozen=True)
class MatchSpec:
    strategy_p1: StrategyKind
    strategy_p2: StrategyKind
    games: int
    base_seed: int
    config: GameConfig = field(default_factory=GameConfig)

    def __post_init__(self) -> None:
        if self.games < 1:
            raise ValueError("a match needs at least one game")
        if self.config.num_players != 2:
            raise ValueError("matches are two-player")

    def seed_for(self, game_index: int) -> int:
        return self.base_seed + game_index


@dataclass
class MatchStats:
    strategy_p1: str
    strategy_p2: str
    games: int
    base_seed: int
    wins_p1: int = 0
    wins_p2: int = 0
    ties: int = 0
    mean_counts: tuple[float, float] = (0.0, 0.0)
    digests: list[dict] = field(default_factory=list)

    def score_p1(self) -> float:
        return self.wins_p1 + self.ties / 2.0

    def score_p2(self) -> float:
        return self.wins_p2 + self.ties / 2.0

    def check(self) -> None:
        if self.wins_p1 + self.wins_p2 + self.ties != self.games:
            raise ValueError("wins and ties do not add up to the game count")

    def to_dict(self) -> dict:
        return {
            "strategy_p1": self.strategy_p1,
            "strategy_p2": self.strategy_p2,
            "games": self.games,
            "base_seed": self.base_seed,
            "wins_p1": self.wins_p1,
            "wins_p2": self.wins_p2,
            "ties": self.ties,
            "mean_counts": list(self.mean_counts),
            "digests": self.digests,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MatchStats":
        return cls(
            strategy_p1=data["strategy_p1"],
            strategy_p2=data["strategy_p2"],
            games=int(data["games"]),
            base_seed=int(data["base_seed"]),
            wins_p1=int(data["wins_p1"]),
            wins_p2=int(data["wins_p2"]),
            ties=int(data["ties"]),
            mean_counts=tuple(data["mean_counts"]),
            digests=list(data["digests"]),
        )


def play_game(spec: MatchSpec, game_index: int, record_beliefs: bool = False) -> GameRecord:
    """Run one full game of the pairing: grants, then each seat's turn from
    its own view, until the outcome is decided."""
    seed = spec.seed_for(game_index)
    kinds = [spec.strategy_p1, spec.strategy_p2]
    runner = GameRunner(
        spec.config, seed, strategies=[str(k) for k in kinds], record_beliefs=record_beliefs
    )
    rngs = [strategy_rng(seed, p) for p in range(2)]
    while not runner.finished:
        p = runner.current_player()
        legal = runner.legal_actions_for(p)
        actions = choose_turn(runner.view_of(p), kinds[p], legal, rngs[p])
        runner.submit_turn(p, actions)
    return runner.record()


def _worker(args: tuple) -> tuple[int, dict, tuple[int, ...]]:
    spec_data, game_index = args
    spec = MatchSpec(
        strategy_p1=parse_strategy(spec_data["p1"]),
        strategy_p2=parse_strategy(spec_data["p2"]),
        games=spec_data["games"],
        base_seed=spec_data["seed"],
        config=GameConfig.from_dict(spec_data["config"]),
    )
    record = play_game(spec, game_index)
    digest = record.digest()
    digest["game_index"] = game_index
    return game_index, digest, record.outcome.counts


def run_match(spec: MatchSpec, workers: int | None = None) -> MatchStats:
    """Play the whole match and aggregate standings."""
    stats = MatchStats(
        strategy_p1=str(spec.strategy_p1),
        strategy_p2=str(spec.strategy_p2),
        games=spec.games,
        base_seed=spec.base_seed,
    )
    spec_data = {
        "p1": str(spec.strategy_p1),
        "p2": str(spec.strategy_p2),
        "games": spec.games,
        "seed": spec.base_seed,
        "config": spec.config.to_dict(),
    }
    jobs = [(spec_data, i) for i in range(spec.games)]
    if workers is None:
        workers = os.cpu_count() or 1
    results: list[tuple[int, dict, tuple[int, ...]]]
    if workers > 1 and spec.games > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_worker, jobs, chunksize=4))
    else:
        results = [_worker(job) for job in jobs]
    results.sort(key=lambda r: r[0])

    total_counts = [0.0, 0.0]
    for _idx, digest, counts in results:
        stats.digests.append(digest)
        winner = digest["outcome"]["winner"]
        if winner == 0:
            stats.wins_p1 += 1
        elif winner == 1:
            stats.wins_p2 += 1
        else:
            stats.ties += 1
        total_counts[0] += counts[0]
        total_counts[1] += counts[1]
    stats.mean_counts = (total_counts[0] / spec.games, total_counts[1] / spec.games)
    stats.check()
    return stats


def ordered_pairings(strategies: list[StrategyKind]) -> list[tuple[StrategyKind, StrategyKind]]:
    """Every ordered pairing of distinct strategies (both seat orders)."""
    out = []
    for a in strategies:
        for b in strategies:
            if str(a) != str(b):
                out.append((a, b))
    return out


def run_matrix(
    strategies: list[StrategyKind],
    games_per_pairing: int,
    base_seed: int,
    config: GameConfig | None = None,
    workers: int | None = None,
) -> list[MatchStats]:
    """One MatchStats per ordered pairing.

    Pairing k draws its seeds from base_seed + k * games_per_pairing, so the
    whole matrix is a pure function of (strategies, games, base_seed).
    """
    if len(strategies) < 2:
        raise ValueError("a matrix needs at least two strategies")
    config = config if config is not None else GameConfig()
    out = []
    for k, (a, b) in enumerate(ordered_pairings(strategies)):
        spec = MatchSpec(
            strategy_p1=a,
            strategy_p2=b,
            games=games_per_pairing,
            base_seed=base_seed + k * games_per_pairing,
            config=config,
        )
        out.append(run_match(spec, workers=workers))
    return out


# --- aggregate statistics ----------------------------------------------------


def pooled_seat_stats(matrix: list[MatchStats], a: str, b: str) -> tuple[int, int, int]:
    """(wins for a, wins for b, ties) pooled over both seat orders."""
    wins_a = wins_b = ties = 0
    for m in matrix:
        if m.strategy_p1 == a and m.strategy_p2 == b:
            wins_a += m.wins_p1
            wins_b += m.wins_p2
            ties += m.ties
        elif m.strategy_p1 == b and m.strategy_p2 == a:
            wins_a += m.wins_p2
            wins_b += m.wins_p1
            ties += m.ties
    return wins_a, wins_b, ties


def superiority_p_value(wins_a: int, wins_b: int) -> float:
    """One-sided sign test that a beats b among decisive games."""
    decisive = wins_a + wins_b
    if decisive == 0:
        return 1.0
    return float(
        scipy_stats.binomtest(wins_a, decisive, 0.5, alternative="greater").pvalue
    )


def seat_share_interval(stats: MatchStats) -> tuple[float, float]:
    """95% normal-approximation CI for P1's win share with ties split."""
    n = stats.games
    scores = [1.0] * stats.wins_p1 + [0.5] * stats.ties + [0.0] * stats.wins_p2
    mean = sum(scores) / n
    var = sum((s - mean) ** 2 for s in scores) / max(1, n - 1)
    half = 1.96 * (var / n) ** 0.5
    return mean - half, mean + half
