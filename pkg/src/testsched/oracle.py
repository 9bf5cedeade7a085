"""Ground-truth engines used to check the solver.

* exhaustive enumeration of every integer schedule for both models,
* a lattice search of the real-valued relaxation around the symmetric schedule,
* a stochastic contact simulation of the infection recursion.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np
from scipy import stats

from .epidemics import (
    DEFAULT_SOURCE_MODEL,
    DetectionTimeEvaluator,
    RiskComposition,
    assess_risk,
    continuous_detection_time,
)
from .model import (
    EpidemicParams,
    FacilityParams,
    RealStrategy,
    TestingStrategy,
    pair_within_budget,
    pair_workload,
)
from .solver import TIE_DIGITS, symmetry_strategy

ENUMERATION_LIMIT = 10**8


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    optimum: Optional[TestingStrategy]
    objective: Optional[float]
    strategies_enumerated: int
    expected_detection_time: Optional[float] = None


def compositions(m: int, k: int, max_group: int) -> Iterator[tuple[int, ...]]:
    """Ordered ways to split ``m`` residents into ``k`` non-empty groups of at most ``max_group``."""
    if k == 1:
        if 1 <= m <= max_group:
            yield (m,)
        return
    low = max(1, m - (k - 1) * max_group)
    high = min(max_group, m - (k - 1))
    for first in range(low, high + 1):
        for rest in compositions(m - first, k - 1, max_group):
            yield (first,) + rest


@lru_cache(maxsize=None)
def count_compositions(m: int, k: int, max_group: int) -> int:
    if k == 0:
        return 1 if m == 0 else 0
    return sum(count_compositions(m - g, k - 1, max_group) for g in range(1, min(m, max_group) + 1))


def day_sets(k: int, tau: int) -> Iterator[tuple[int, ...]]:
    for head in itertools.combinations(range(1, tau), k - 1):
        yield head + (tau,)


def enumeration_size(facility: FacilityParams, pairs) -> int:
    return sum(
        math.comb(tau - 1, k - 1) * count_compositions(facility.m, k, facility.max_group)
        for k, tau in pairs
    )


def _valid_pairs(facility: FacilityParams, cap: float):
    return [
        (k, tau)
        for tau in range(1, facility.max_tau + 1)
        for k in range(facility.min_groups, min(tau, facility.m) + 1)
        if pair_within_budget(k, tau, facility, cap)
    ]


def _guard(facility: FacilityParams, pairs, limit: int) -> None:
    size = enumeration_size(facility, pairs)
    if size > limit:
        raise InstanceTooLarge(f"{size} strategies exceed the enumeration limit of {limit}")


def _best_in_pair(facility, epid, k, tau, source_model):
    best_key = None
    best = None
    count = 0
    for days in day_sets(k, tau):
        evaluator = DetectionTimeEvaluator(facility.m, epid, tau, days, source_model)
        for sizes in compositions(facility.m, k, facility.max_group):
            count += 1
            value = evaluator(sizes)
            key = (round(value, TIE_DIGITS), days, sizes)
            if best_key is None or key < best_key:
                best_key, best = key, (value, TestingStrategy(k, tau, sizes, days))
    return best, count


def brute_force_model1(
    facility: FacilityParams,
    epid: EpidemicParams,
    p_cap: float,
    source_model: str = DEFAULT_SOURCE_MODEL,
    limit: int = ENUMERATION_LIMIT,
) -> OracleResult:
    """Exact minimum detection time over every budget-feasible integer schedule."""
    pairs = _valid_pairs(facility, p_cap)
    _guard(facility, pairs, limit)
    best_key = None
    best = None
    total = 0
    for k, tau in pairs:
        found, count = _best_in_pair(facility, epid, k, tau, source_model)
        total += count
        if found is None:
            continue
        value, strategy = found
        key = (round(value, TIE_DIGITS), tau, k, strategy.test_days, strategy.group_sizes)
        if best_key is None or key < best_key:
            best_key, best = key, found
    if best is None:
        return OracleResult(None, None, total)
    return OracleResult(best[1], best[0], total, best[0])


def brute_force_model2(
    facility: FacilityParams,
    epid: EpidemicParams,
    alpha: float,
    source_model: str = DEFAULT_SOURCE_MODEL,
    composition: RiskComposition = RiskComposition(),
    limit: int = ENUMERATION_LIMIT,
) -> OracleResult:
    """Exact minimum workload over every schedule whose risk stays within ``alpha`` times background."""
    pairs = _valid_pairs(facility, 1.0)
    _guard(facility, pairs, limit)
    total = 0
    for workload, tau, k in sorted((pair_workload(k, tau, facility), tau, k) for k, tau in pairs):
        found, count = _best_in_pair(facility, epid, k, tau, source_model)
        total += count
        if found is None:
            continue
        value, strategy = found
        # Risk grows with detection time, so the fastest schedule of the pair decides feasibility.
        if assess_risk(value, tau, epid, facility, composition).within(alpha):
            return OracleResult(strategy, workload, total, value)
    return OracleResult(None, None, total)


@dataclass(frozen=True)
class GridCheckResult:
    passed: bool
    symmetric_value: float
    best_value: float
    best_strategy: RealStrategy
    points_evaluated: int
    exhaustive: bool


class _Lattice:
    """Real schedules on a lattice of spacing ``step`` anchored at the symmetric schedule."""

    def __init__(self, m: float, k: int, tau: int, step: float) -> None:
        self.m, self.k, self.tau, self.step = m, k, tau, step
        seed = symmetry_strategy(k, tau, m)
        self.base_days = np.array(seed.test_days)
        self.base_sizes = np.array(seed.group_sizes)

    def decode(self, offsets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Offsets hold k-1 day shifts then k-1 size shifts, in lattice units."""
        k = self.k
        shift_days = np.concatenate([offsets[:, : k - 1], np.zeros((len(offsets), 1))], axis=1)
        size_part = offsets[:, k - 1 :]
        shift_sizes = np.concatenate([size_part, -size_part.sum(axis=1, keepdims=True)], axis=1)
        return self.base_days + shift_days * self.step, self.base_sizes + shift_sizes * self.step

    def admissible(self, days: np.ndarray, sizes: np.ndarray) -> np.ndarray:
        eps = 1e-9
        gaps = np.diff(np.concatenate([np.zeros((len(days), 1)), days], axis=1), axis=1)
        return (gaps >= self.step - eps).all(axis=1) & (sizes >= self.step - eps).all(axis=1)


def symmetry_grid_check(
    m: float,
    k: int,
    tau: int,
    epid: EpidemicParams,
    grid_step: float = 0.05,
    source_model: str = DEFAULT_SOURCE_MODEL,
    tolerance: float = 1e-9,
    exhaustive_limit: int = 300_000,
    random_starts: int = 2,
    seed: int = 0,
) -> GridCheckResult:
    """Check that no lattice schedule beats the symmetric one in the real-space objective.

    The lattice has spacing ``grid_step`` in every day and size coordinate
    and passes through the symmetric schedule. Small lattices are scanned
    completely. Larger ones are explored by a multi-scale pattern search
    (single-day shifts and one-to-one size transfers) started from the
    symmetric schedule and from random lattice points.
    """
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    if not 1 <= k <= tau:
        raise ValueError("need 1 <= k <= tau")
    lattice = _Lattice(m, k, tau, grid_step)
    dims = 2 * (k - 1)

    def score(offsets: np.ndarray) -> np.ndarray:
        days, sizes = lattice.decode(offsets)
        values = np.full(len(offsets), np.inf)
        ok = lattice.admissible(days, sizes)
        if ok.any():
            values[ok] = continuous_detection_time(
                m, epid, tau, sizes[ok], days[ok], source_model
            )
        return values

    origin = np.zeros((1, dims))
    symmetric_value = float(score(origin)[0])
    evaluated = 1
    span_days = int(math.ceil(tau / grid_step))
    span_sizes = int(math.ceil(m / grid_step))

    if dims == 0:
        best_offsets, best_value, exhaustive = origin[0], symmetric_value, True
    else:
        axes = [
            np.arange(math.ceil(-base / grid_step), math.floor((tau - base) / grid_step) + 1)
            for base in lattice.base_days[:-1]
        ] + [
            np.arange(math.ceil(-base / grid_step), math.floor((m - base) / grid_step) + 1)
            for base in lattice.base_sizes[:-1]
        ]
        full = math.prod(len(axis) for axis in axes)
        exhaustive = full <= exhaustive_limit
        if exhaustive:
            grid = np.array(np.meshgrid(*axes, indexing="ij")).reshape(dims, -1).T
            days, sizes = lattice.decode(grid)
            grid = grid[lattice.admissible(days, sizes)]
            best_value, best_offsets = np.inf, origin[0]
            for chunk in np.array_split(grid, max(1, len(grid) // 20000)):
                values = score(chunk)
                evaluated += len(chunk)
                i = int(np.argmin(values))
                if values[i] < best_value:
                    best_value, best_offsets = float(values[i]), chunk[i]
        else:
            moves = _pattern_moves(k)
            rng = np.random.default_rng(seed)
            starts = [origin[0]] + [_random_offsets(lattice, rng) for _ in range(random_starts)]
            best_value, best_offsets = np.inf, origin[0]
            top_scale = 2 ** int(math.log2(max(span_days, span_sizes, 1)))
            for start in starts:
                value, offsets, count = _pattern_search(score, start, moves, top_scale)
                evaluated += count
                if value < best_value:
                    best_value, best_offsets = value, offsets

    days, sizes = lattice.decode(np.atleast_2d(best_offsets))
    best_strategy = RealStrategy(k=k, tau=tau, group_sizes=tuple(sizes[0]), test_days=tuple(days[0]))
    slack = tolerance * max(1.0, abs(symmetric_value))
    return GridCheckResult(
        passed=bool(best_value >= symmetric_value - slack),
        symmetric_value=symmetric_value,
        best_value=float(best_value),
        best_strategy=best_strategy,
        points_evaluated=evaluated,
        exhaustive=exhaustive,
    )


def _pattern_moves(k: int) -> np.ndarray:
    dims = 2 * (k - 1)
    moves = []
    for i in range(k - 1):
        for sign in (1, -1):
            move = np.zeros(dims)
            move[i] = sign
            moves.append(move)
    # Size coordinates cover groups 1..k-1; group k absorbs the difference,
    # so a single-coordinate change is a transfer with the last group.
    for i, j in itertools.permutations(range(k), 2):
        move = np.zeros(dims)
        if i < k - 1:
            move[k - 1 + i] += 1
        if j < k - 1:
            move[k - 1 + j] -= 1
        moves.append(move)
    return np.unique(np.array(moves), axis=0)


def _random_offsets(lattice: _Lattice, rng: np.random.Generator) -> np.ndarray:
    k, tau, m, step = lattice.k, lattice.tau, lattice.m, lattice.step
    while True:
        days = np.sort(rng.uniform(0, tau, k - 1))
        sizes = rng.dirichlet(np.ones(k)) * m
        offsets = np.concatenate(
            [np.round((days - lattice.base_days[:-1]) / step), np.round((sizes[:-1] - lattice.base_sizes[:-1]) / step)]
        )
        d, s = lattice.decode(offsets[None, :])
        if lattice.admissible(d, s)[0]:
            return offsets


def _pattern_search(score, start, moves, top_scale):
    current = np.asarray(start, dtype=float)
    value = float(score(current[None, :])[0])
    count = 1
    scale = top_scale
    while scale >= 1:
        while True:
            candidates = current + scale * moves
            values = score(candidates)
            count += len(candidates)
            i = int(np.argmin(values))
            if values[i] < value - 1e-15:
                current, value = candidates[i], float(values[i])
            else:
                break
        scale //= 2
    return value, current, count


def monte_carlo_infection_probability(
    m: int,
    kappa: float,
    beta: float,
    d: int,
    replicates: int = 100_000,
    seed: int = 0,
) -> tuple[float, float]:
    """Stochastic estimate of ``P_I(d)`` with a 95% confidence half-width.

    Every day each susceptible resident meets ``round(kappa)`` distinct
    residents chosen uniformly, and each meeting with an infected resident
    transmits with probability ``beta``. Infections acquired on a day become
    infectious the next day. Residents are exchangeable, so the daily new
    cases are drawn as a binomial whose success probability averages over the
    hypergeometric number of infected contacts.
    """
    if replicates < 1000:
        raise ValueError("replicates must be at least 1000")
    if m < 2:
        raise ValueError("m must be >= 2")
    contacts = min(int(round(kappa)), m - 1)
    rng = np.random.default_rng(seed)
    infected = np.ones(replicates, dtype=np.int64)
    if beta == 0 or contacts == 0 or d == 0:
        return 0.0, 0.0
    # Chance that a susceptible escapes infection, for each possible infected count.
    escape = np.empty(m + 1)
    for count in range(m + 1):
        meets = np.arange(contacts + 1)
        pmf = stats.hypergeom.pmf(meets, m - 1, min(count, m - 1), contacts)
        escape[count] = float(np.sum(pmf * (1 - beta) ** meets))
    for _ in range(d):
        susceptible = m - infected
        infected = infected + rng.binomial(susceptible, 1 - escape[infected])
    fraction = (infected - 1) / (m - 1)
    half_width = 1.96 * float(fraction.std(ddof=1)) / math.sqrt(replicates)
    return float(fraction.mean()), half_width
