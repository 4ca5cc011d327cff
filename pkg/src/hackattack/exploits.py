"""Exploit identities, their rarity distribution, and draw mathematics.

An exploit is an (os, power) pair; a patch blocks exactly one such pair.
Power level n is found with probability 2^-(n+1), renormalized so the
truncated range 0..max_power sums to one.  Hidden starting patches are
drawn from the same power distribution but always target the computer's
own operating system, so the per-power containment probabilities below
drive both the patch prior and the opponent-hand prior.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import GameConfig


@dataclass(frozen=True, order=False)
class Exploit:
    os: int
    power: int

    def sort_key(self) -> tuple[int, int]:
        """Canonical ordering: strongest first, then by OS index."""
        return (-self.power, self.os)

    def to_list(self) -> list[int]:
        return [self.os, self.power]

    @classmethod
    def from_list(cls, data) -> "Exploit":
        return cls(int(data[0]), int(data[1]))


def exploit_index(e: Exploit, config: GameConfig) -> int:
    return e.os * config.num_powers + e.power


def exploit_from_index(idx: int, config: GameConfig) -> Exploit:
    return Exploit(idx // config.num_powers, idx % config.num_powers)


def all_exploits(config: GameConfig) -> list[Exploit]:
    return [
        Exploit(os, power)
        for os in range(config.num_os)
        for power in range(config.num_powers)
    ]


@lru_cache(maxsize=None)
def power_weights(max_power: int) -> tuple[float, ...]:
    """P(power = n) = 2^-(n+1) / (1 - 2^-(max_power+1)) for n in 0..max_power."""
    raw = [2.0 ** -(n + 1) for n in range(max_power + 1)]
    total = sum(raw)
    return tuple(w / total for w in raw)


def exploit_weight(e: Exploit, config: GameConfig) -> float:
    """Sampling probability of one specific (os, power) identity."""
    return power_weights(config.max_power)[e.power] / config.num_os


def sample_power(rng: random.Random, config: GameConfig) -> int:
    weights = power_weights(config.max_power)
    u = rng.random()
    acc = 0.0
    for power, w in enumerate(weights):
        acc += w
        if u < acc:
            return power
    return config.max_power


def sample_exploit(rng: random.Random, config: GameConfig) -> Exploit:
    """Draw one exploit: OS uniform, power geometrically rare."""
    os = rng.randrange(config.num_os)
    return Exploit(os, sample_power(rng, config))


def sample_distinct_exploits(
    rng: random.Random, config: GameConfig, count: int, exclude: frozenset | set = frozenset()
) -> list[Exploit]:
    """Sample `count` distinct exploits, redrawing duplicates.

    Raises ValueError if the identity space cannot supply `count` new items.
    """
    if config.num_exploits - len(exclude) < count:
        raise ValueError("exploit space exhausted")
    drawn: list[Exploit] = []
    seen = set(exclude)
    while len(drawn) < count:
        e = sample_exploit(rng, config)
        if e not in seen:
            seen.add(e)
            drawn.append(e)
    return drawn


def sample_distinct_powers(rng: random.Random, config: GameConfig, count: int) -> list[int]:
    """Sample `count` distinct power levels, redrawing duplicates."""
    if config.num_powers < count:
        raise ValueError("power space exhausted")
    drawn: list[int] = []
    seen: set[int] = set()
    while len(drawn) < count:
        p = sample_power(rng, config)
        if p not in seen:
            seen.add(p)
            drawn.append(p)
    return drawn


def containment_probabilities(weights, draws: int) -> np.ndarray:
    """P(item i is among `draws` sequential distinct draws), per item.

    Draws are taken one at a time from `weights`; a draw that repeats an
    earlier item is rejected and retaken, which is equivalent to sampling
    the next item from the remaining ones with renormalized weights.
    Exact for draws <= 4 via position-by-position summation.
    """
    w = np.asarray(weights, dtype=float)
    if not np.isclose(w.sum(), 1.0):
        raise ValueError("weights must sum to 1")
    n = w.size
    if draws > 4:
        raise NotImplementedError("closed form implemented for up to 4 draws")
    if draws > n:
        raise ValueError("more draws than items")

    total = w.copy()  # P(first draw = i)
    if draws >= 2:
        # P(second draw = i) = sum_{a != i} w_a * w_i / (1 - w_a)
        f = w / (1.0 - w)
        total += w * (f.sum() - f)
    if draws >= 3:
        # M2[a, b] = P(first two draws = (a, b)), a != b
        m2 = np.outer(w, w) / (1.0 - w)[:, None]
        np.fill_diagonal(m2, 0.0)
        rem2 = 1.0 - w[:, None] - w[None, :]  # remaining mass after (a, b)
        g = m2 / rem2
        total += w * (g.sum() - g.sum(axis=1) - g.sum(axis=0))
    if draws >= 4:
        # M3[a, b, c] = P(first three draws = (a, b, c)), all distinct
        m2 = np.outer(w, w) / (1.0 - w)[:, None]
        np.fill_diagonal(m2, 0.0)
        rem2 = 1.0 - w[:, None] - w[None, :]
        m3 = (m2 / rem2)[:, :, None] * w[None, None, :]
        idx = np.arange(n)
        m3[:, idx, idx] = 0.0
        m3[idx, :, idx] = 0.0
        rem3 = 1.0 - w[:, None, None] - w[None, :, None] - w[None, None, :]
        h = m3 / rem3
        contains_i = h.sum(axis=(1, 2)) + h.sum(axis=(0, 2)) + h.sum(axis=(0, 1))
        total += w * (h.sum() - contains_i)
    return total


@lru_cache(maxsize=None)
def initial_patch_prior(max_power: int, patches: int) -> tuple[float, ...]:
    """P(a computer's hidden patches include power level n), per n.

    Starting patches are distinct power levels drawn from the rarity
    distribution, targeting the computer's own OS.
    """
    if patches == 0:
        return tuple(0.0 for _ in range(max_power + 1))
    probs = containment_probabilities(power_weights(max_power), patches)
    return tuple(float(p) for p in probs)


@lru_cache(maxsize=None)
def starting_hand_prior(num_os: int, max_power: int, hand_size: int) -> tuple[float, ...]:
    """P(a player's starting hand includes a specific exploit), indexed by
    os * (max_power+1) + power."""
    if hand_size == 0:
        return tuple(0.0 for _ in range(num_os * (max_power + 1)))
    pw = power_weights(max_power)
    weights = [p / num_os for _ in range(num_os) for p in pw]
    probs = containment_probabilities(weights, hand_size)
    return tuple(float(p) for p in probs)
