"""Seedable Monte Carlo estimators for NOMA outage and sum rates and the two
baselines (randomly scheduled OMA user, opportunistic best user).

Trials are cut into fixed-size blocks. Block ``b`` of an SNR point draws from
a Philox generator keyed by ``(seed, snr_key, b)``, so results do not depend
on how many workers run the blocks, and trial ``i`` is reproducible by
regenerating block ``i // BLOCK_SIZE`` alone.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import Geometry, sample_sorted_block
from .noma import PowerAllocation, RateTargets, achievable_rates_array, outage_thresholds, rate_j_to_m
from .numerics import DomainError

BLOCK_SIZE = 1 << 16
Z95 = 1.959963984540054

SCHEMES = ("noma", "oma_random", "opportunistic")


@dataclass(frozen=True)
class EstimatorResult:
    mean: float
    ci95_halfwidth: float
    trials: int
    seed: int


@dataclass(frozen=True)
class SimulationSetup:
    """Everything the estimators need for one SNR point."""

    geometry: Geometry
    alloc: PowerAllocation
    snr_db: float
    trials: int
    seed: int
    targets: RateTargets | None = None
    oma_split: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if self.alloc.num_users != self.geometry.num_users:
            raise DomainError("allocation length does not match the number of users")

    @property
    def rho(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    @property
    def snr_key(self) -> int:
        return int(np.float64(self.snr_db).view(np.uint64))


def block_generator(seed: int, snr_key: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(snr_key, block))
    return np.random.Generator(np.random.Philox(ss))


def _block_sizes(trials: int) -> list[int]:
    full, rest = divmod(trials, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def draw_block(setup: SimulationSetup, block: int, size: int):
    """Sorted gains (size x M) and the index of the randomly scheduled user."""
    rng = block_generator(setup.seed, setup.snr_key, block)
    gains = sample_sorted_block(rng, setup.geometry, size)
    pick = rng.integers(0, setup.geometry.num_users, size)
    return gains, pick


def _map_blocks(setup: SimulationSetup, fn: Callable, workers: int) -> list:
    sizes = _block_sizes(setup.trials)

    def job(b):
        gains, pick = draw_block(setup, b, sizes[b])
        return fn(gains, pick)

    if workers <= 1 or len(sizes) == 1:
        return [job(b) for b in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, range(len(sizes))))


def _proportion(count: int, setup: SimulationSetup) -> EstimatorResult:
    p = count / setup.trials
    half = Z95 * math.sqrt(p * (1.0 - p) / setup.trials)
    return EstimatorResult(p, half, setup.trials, setup.seed)


def _average(blocks: list[tuple[float, float]], setup: SimulationSetup) -> EstimatorResult:
    n = setup.trials
    mean = math.fsum(s for s, _ in blocks) / n
    second = math.fsum(q for _, q in blocks) / n
    var = max(second - mean * mean, 0.0) * n / max(n - 1, 1)
    return EstimatorResult(mean, Z95 * math.sqrt(var / n), n, setup.seed)


def _require_targets(setup: SimulationSetup) -> RateTargets:
    if setup.targets is None:
        raise DomainError("outage estimation needs rate targets")
    return setup.targets


def estimate_outage_all(setup: SimulationSetup, workers: int = 1) -> list[EstimatorResult]:
    """Outage of every user from the threshold rule gains[m] <= psi*_m."""
    thr = outage_thresholds(setup.alloc, _require_targets(setup), setup.rho)
    counts = _map_blocks(setup, lambda g, _: (g <= thr).sum(axis=0), workers)
    total = np.sum(counts, axis=0)
    out = []
    for m, t in enumerate(thr):
        if math.isinf(t):
            out.append(EstimatorResult(1.0, 0.0, setup.trials, setup.seed))
        else:
            out.append(_proportion(int(total[m]), setup))
    return out


def estimate_outage(setup: SimulationSetup, user_m: int, workers: int = 1) -> EstimatorResult:
    _check_user(setup, user_m)
    return estimate_outage_all(setup, workers)[user_m - 1]


def _check_user(setup: SimulationSetup, user_m: int):
    if not 1 <= user_m <= setup.geometry.num_users:
        raise DomainError(f"user index {user_m} outside 1..{setup.geometry.num_users}")


def estimate_outage_via_sinr(setup: SimulationSetup, user_m: int, workers: int = 1) -> EstimatorResult:
    """Outage straight from the SIC events: user m fails if any R_{j->m} < R~_j, j <= m."""
    _check_user(setup, user_m)
    targets = _require_targets(setup).targets

    def count(gains, _):
        g = gains[:, user_m - 1]
        fail = np.zeros(g.shape, dtype=bool)
        for j in range(1, user_m + 1):
            fail |= rate_j_to_m(g, setup.rho, setup.alloc, j) < targets[j - 1]
        return int(fail.sum())

    return _proportion(sum(_map_blocks(setup, count, workers)), setup)


def _oma_share(setup: SimulationSetup) -> float:
    return 1.0 / setup.geometry.num_users if setup.oma_split else 1.0


def oma_rate(gains, setup: SimulationSetup):
    """Rate of a scheduled OMA user; with ``oma_split`` it only holds 1/M of the slot."""
    return _oma_share(setup) * np.log2(1.0 + setup.rho * np.asarray(gains))


def oma_threshold(setup: SimulationSetup) -> float:
    """Gain below which the OMA user misses the summed NOMA target."""
    total = float(_require_targets(setup).targets.sum())
    return math.expm1(total / _oma_share(setup) * math.log(2.0)) / setup.rho


def estimate_oma_outage(setup: SimulationSetup, workers: int = 1) -> EstimatorResult:
    thr = oma_threshold(setup)

    def count(gains, pick):
        g = gains[np.arange(gains.shape[0]), pick]
        return int((g <= thr).sum())

    return _proportion(sum(_map_blocks(setup, count, workers)), setup)


def estimate_sum_rate(setup: SimulationSetup, scheme: str, workers: int = 1) -> EstimatorResult:
    if scheme not in SCHEMES:
        raise DomainError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")

    def per_trial(gains, pick):
        if scheme == "noma":
            return achievable_rates_array(gains, setup.rho, setup.alloc).sum(axis=1)
        if scheme == "opportunistic":
            return np.log2(1.0 + setup.rho * gains[:, -1])
        return oma_rate(gains[np.arange(gains.shape[0]), pick], setup)

    def stats(gains, pick):
        r = per_trial(gains, pick)
        return float(r.sum()), float((r * r).sum())

    return _average(_map_blocks(setup, stats, workers), setup)
