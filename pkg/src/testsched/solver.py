"""Symmetry-seeded local search for both scheduling models.

For every (k, tau) pair the search starts from the evenly spread schedule,
rounds it to the neighbouring integer schedules and improves the group sizes
by simulated annealing. A pair is skipped outright when even its fractional
symmetric schedule cannot beat the incumbent.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .epidemics import (
    DEFAULT_SOURCE_MODEL,
    DetectionTimeEvaluator,
    RiskAssessment,
    RiskComposition,
    assess_risk,
)
from .model import (
    EpidemicParams,
    FacilityParams,
    RealStrategy,
    TestingStrategy,
    pair_within_budget,
    pair_workload,
    validate,
)

# Objective values closer than this are treated as ties.
TIE_DIGITS = 10


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 5
    max_iterations: Optional[int] = None
    cooling_rate: float = 0.9
    rng_seed: int = 0
    prune: bool = True
    source_model: str = DEFAULT_SOURCE_MODEL
    risk: RiskComposition = RiskComposition()

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not 0 < self.cooling_rate < 1:
            raise ValueError("cooling_rate must lie in (0, 1)")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")


@dataclass
class SolveReport:
    strategy: Optional[TestingStrategy]
    objective: Optional[float]
    feasible: bool
    pairs_explored: int = 0
    pairs_pruned: int = 0
    restarts: int = 0
    seed: int = 0
    expected_detection_time: Optional[float] = None
    workload: Optional[float] = None
    risk: Optional[RiskAssessment] = None

    @classmethod
    def infeasible(cls, explored: int, pruned: int, config: SearchConfig) -> "SolveReport":
        return cls(None, None, False, explored, pruned, config.restarts, config.rng_seed)


def symmetry_strategy(k: int, tau: int, m: float) -> RealStrategy:
    """Equal groups of ``m / k`` tested every ``tau / k`` days."""
    if not 1 <= k <= tau:
        raise ValueError(f"need 1 <= k <= tau (got k={k}, tau={tau})")
    return RealStrategy(
        k=k,
        tau=tau,
        group_sizes=tuple(m / k for _ in range(k)),
        test_days=tuple(i * tau / k for i in range(1, k + 1)),
    )


def round_days(real_days: Sequence[float], tau: int) -> list[tuple[int, ...]]:
    """All floor/ceil neighbours of the first k-1 days, keeping the last day at ``tau``."""
    options = []
    for day in real_days[:-1]:
        lo, hi = math.floor(day + 1e-9), math.ceil(day - 1e-9)
        options.append(sorted({lo, hi}))
    found = []
    seen = set()
    for head in itertools.product(*options):
        days = tuple(head) + (tau,)
        if days in seen:
            continue
        seen.add(days)
        if days[0] >= 1 and all(b > a for a, b in zip(days, days[1:])):
            found.append(days)
    return found


def round_groups(real_sizes: Sequence[float], m: int, max_group: int) -> tuple[int, ...]:
    """Largest-remainder rounding to integers summing to ``m``, capped at ``max_group``.

    Ties go to the lower index. Residents above the cap move to the
    currently smallest group (lowest index on ties).
    """
    k = len(real_sizes)
    if m > k * max_group:
        raise ValueError(f"{m} residents do not fit in {k} groups of at most {max_group}")
    sizes = [math.floor(g + 1e-9) for g in real_sizes]
    short = m - sum(sizes)
    by_remainder = sorted(range(k), key=lambda i: (-(real_sizes[i] - sizes[i]), i))
    for i in by_remainder[: max(0, short)]:
        sizes[i] += 1
    overflow = 0
    for i in range(k):
        if sizes[i] > max_group:
            overflow += sizes[i] - max_group
            sizes[i] = max_group
    while overflow:
        i = min(range(k), key=lambda j: (sizes[j], j))
        sizes[i] += 1
        overflow -= 1
    return tuple(sizes)


def _sub_seed(seed: int, *parts: int) -> int:
    # String seeding is hashed with SHA-512, so this is stable across processes.
    return random.Random(":".join(str(x) for x in (seed,) + parts)).getrandbits(32)


def anneal_groups(
    seed_sizes: Sequence[int],
    objective: Callable[[tuple[int, ...]], float],
    max_group: int,
    iterations: int,
    cooling_rate: float = 0.9,
    rng: Optional[random.Random] = None,
) -> tuple[tuple[int, ...], float]:
    """Simulated annealing over size vectors, moving one resident per step.

    The temperature starts at the seed's objective value and shrinks by
    ``cooling_rate`` every iteration. Returns the best vector seen.
    """
    rng = rng or random.Random(0)
    current = tuple(seed_sizes)
    current_value = objective(current)
    best, best_value = current, current_value
    k = len(current)
    if k < 2:
        return best, best_value
    temperature = current_value
    for _ in range(iterations):
        donors = [i for i in range(k) if current[i] > 1]
        takers = [i for i in range(k) if current[i] < max_group]
        moves = [(i, j) for i in donors for j in takers if i != j]
        if not moves:
            break
        i, j = rng.choice(moves)
        candidate = list(current)
        candidate[i] -= 1
        candidate[j] += 1
        candidate = tuple(candidate)
        value = objective(candidate)
        delta = value - current_value
        if delta < 0 or (temperature > 0 and rng.random() < math.exp(-delta / temperature)):
            current, current_value = candidate, value
            if value < best_value:
                best, best_value = candidate, value
        temperature *= cooling_rate
    return best, best_value


class _PairSearch:
    """Shared per-instance machinery: cached evaluators and the per-pair search."""

    def __init__(self, facility: FacilityParams, epid: EpidemicParams, config: SearchConfig) -> None:
        self.facility = facility
        self.epid = epid
        self.config = config
        self._evaluators: dict[tuple[int, tuple], DetectionTimeEvaluator] = {}
        self._scores: dict[tuple, float] = {}

    def evaluator(self, tau: float, days: tuple) -> DetectionTimeEvaluator:
        key = (tau, days)
        if key not in self._evaluators:
            self._evaluators[key] = DetectionTimeEvaluator(
                self.facility.m, self.epid, tau, days, self.config.source_model
            )
        return self._evaluators[key]

    def lower_bound(self, k: int, tau: int) -> float:
        """Detection time of the fractional symmetric schedule, used to prune the pair."""
        seed = symmetry_strategy(k, tau, self.facility.m)
        return self.evaluator(tau, seed.test_days)(seed.group_sizes)

    def score(self, tau: int, days: tuple[int, ...], sizes: tuple[int, ...]) -> float:
        key = (tau, days, sizes)
        value = self._scores.get(key)
        if value is None:
            value = self.evaluator(tau, days)(sizes)
            self._scores[key] = value
        return value

    def best_in_pair(self, k: int, tau: int) -> tuple[float, TestingStrategy]:
        facility, config = self.facility, self.config
        seed = symmetry_strategy(k, tau, facility.m)
        start = round_groups(seed.group_sizes, facility.m, facility.max_group)
        iterations = (
            config.max_iterations if config.max_iterations is not None else k * tau * facility.m
        )
        best_key = None
        best = None
        for days in round_days(seed.test_days, tau):
            objective = lambda sizes, days=days: self.score(tau, days, sizes)  # noqa: E731
            for restart in range(config.restarts):
                rng = random.Random(_sub_seed(config.rng_seed, restart, k, tau, *days))
                sizes, value = anneal_groups(
                    start, objective, facility.max_group, iterations, config.cooling_rate, rng
                )
                key = (round(value, TIE_DIGITS), days, sizes)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (value, TestingStrategy(k, tau, sizes, days))
        assert best is not None
        return best


def _pairs(facility: FacilityParams):
    for tau in range(1, facility.max_tau + 1):
        for k in range(facility.min_groups, min(tau, facility.m) + 1):
            yield k, tau


def solve_model1(
    facility: FacilityParams,
    epid: EpidemicParams,
    p_cap: float,
    config: SearchConfig = SearchConfig(),
) -> SolveReport:
    """Minimize expected detection time subject to the staff workload cap ``p_cap``."""
    search = _PairSearch(facility, epid, config)
    explored = pruned = 0
    best_key = None
    best: Optional[tuple[float, TestingStrategy]] = None
    for k, tau in _pairs(facility):
        if not pair_within_budget(k, tau, facility, p_cap):
            continue
        explored += 1
        if config.prune and best is not None and search.lower_bound(k, tau) >= best[0]:
            pruned += 1
            continue
        value, strategy = search.best_in_pair(k, tau)
        key = (round(value, TIE_DIGITS), tau, k, strategy.test_days, strategy.group_sizes)
        if best_key is None or key < best_key:
            best_key, best = key, (value, strategy)
    if best is None:
        return SolveReport.infeasible(explored, pruned, config)
    value, strategy = best
    assert not validate(strategy, facility)
    return SolveReport(
        strategy=strategy,
        objective=value,
        feasible=True,
        pairs_explored=explored,
        pairs_pruned=pruned,
        restarts=config.restarts,
        seed=config.rng_seed,
        expected_detection_time=value,
        workload=pair_workload(k=strategy.k, tau=strategy.tau, facility=facility),
    )


def solve_model2(
    facility: FacilityParams,
    epid: EpidemicParams,
    alpha: float,
    config: SearchConfig = SearchConfig(),
) -> SolveReport:
    """Minimize staff workload subject to the introduction risk staying below ``alpha`` times background.

    Workload depends only on (k, tau), so pairs are visited cheapest first and
    the first pair holding a risk-feasible schedule wins. Within a pair the
    search minimizes detection time, which minimizes risk.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    search = _PairSearch(facility, epid, config)
    candidates = sorted(
        (pair_workload(k, tau, facility), tau, k)
        for k, tau in _pairs(facility)
        if pair_within_budget(k, tau, facility, 1.0)
    )
    explored = pruned = 0
    for workload, tau, k in candidates:
        explored += 1
        if config.prune:
            bound = search.lower_bound(k, tau)
            optimistic = assess_risk(bound, tau, epid, facility, config.risk)
            if not optimistic.within(alpha):
                pruned += 1
                continue
        value, strategy = search.best_in_pair(k, tau)
        risk = assess_risk(value, tau, epid, facility, config.risk)
        if risk.within(alpha):
            assert not validate(strategy, facility)
            return SolveReport(
                strategy=strategy,
                objective=workload,
                feasible=True,
                pairs_explored=explored,
                pairs_pruned=pruned,
                restarts=config.restarts,
                seed=config.rng_seed,
                expected_detection_time=value,
                workload=workload,
                risk=risk,
            )
    return SolveReport.infeasible(explored, pruned, config)


@dataclass
class SweepPoint:
    value: float
    report: SolveReport = field(repr=False)

    @property
    def objective(self) -> Optional[float]:
        return self.report.objective


def sweep_p(
    facility: FacilityParams,
    epid: EpidemicParams,
    p_values: Sequence[float],
    config: SearchConfig = SearchConfig(),
) -> list[SweepPoint]:
    if not p_values:
        raise ValueError("p_values must not be empty")
    return [SweepPoint(p, solve_model1(facility, epid, p, config)) for p in p_values]


def sweep_alpha(
    facility: FacilityParams,
    epid: EpidemicParams,
    alpha_values: Sequence[float],
    config: SearchConfig = SearchConfig(),
) -> list[SweepPoint]:
    if not alpha_values:
        raise ValueError("alpha_values must not be empty")
    return [SweepPoint(a, solve_model2(facility, epid, a, config)) for a in alpha_values]
