"""Domain types and the cost/budget arithmetic shared by both models."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class FacilityParams:
    """Census, staffing and scheduling limits of one care home.

    Times are in minutes. ``day_length`` is one staff member's working day.
    """

    m: int
    n: int
    max_tau: int
    max_group: int
    prep_time: float = 180.0
    test_time: float = 15.0
    day_length: float = 480.0

    def __post_init__(self) -> None:
        problems = []
        if self.m < 1:
            problems.append(f"m must be >= 1 (got {self.m})")
        if self.n < 1:
            problems.append(f"n must be >= 1 (got {self.n})")
        if self.max_tau < 1:
            problems.append(f"max_tau must be >= 1 (got {self.max_tau})")
        if not 1 <= self.max_group <= self.m:
            problems.append(f"max_group must lie in [1, m] (got {self.max_group})")
        if self.prep_time < 0 or self.test_time < 0:
            problems.append("prep_time and test_time must be non-negative")
        if self.day_length <= 0:
            problems.append("day_length must be positive")
        if problems:
            raise ValueError("; ".join(problems))

    @property
    def min_groups(self) -> int:
        return math.ceil(self.m / self.max_group)

    @property
    def schedulable(self) -> bool:
        """True when one batch per day leaves room for every resident."""
        return self.min_groups <= self.max_tau


@dataclass(frozen=True)
class EpidemicParams:
    beta: float
    kappa: float
    weekly_incidence: float = 0.006
    visitor_rate: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1] (got {self.beta})")
        if self.kappa < 0:
            raise ValueError(f"kappa must be non-negative (got {self.kappa})")
        if not 0.0 <= self.weekly_incidence <= 1.0:
            raise ValueError(f"weekly_incidence must lie in [0, 1] (got {self.weekly_incidence})")
        if self.visitor_rate < 0:
            raise ValueError(f"visitor_rate must be non-negative (got {self.visitor_rate})")


@dataclass(frozen=True)
class TestingStrategy:
    """Integer schedule: ``k`` batches over a ``tau``-day cycle.

    Group ``i`` holds ``group_sizes[i]`` residents and is tested on day
    ``test_days[i]`` of the cycle. Shape problems are reported by
    :func:`validate` rather than raised here.
    """

    __test__ = False  # keep pytest from collecting this class

    k: int
    tau: int
    group_sizes: tuple[int, ...]
    test_days: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "group_sizes", tuple(int(g) for g in self.group_sizes))
        object.__setattr__(self, "test_days", tuple(int(d) for d in self.test_days))

    @property
    def m(self) -> int:
        return sum(self.group_sizes)

    def gaps(self) -> list[int]:
        """Circular gaps between consecutive test days."""
        previous = self.test_days[-1] - self.tau
        out = []
        for day in self.test_days:
            out.append(day - previous)
            previous = day
        return out

    def describe(self) -> str:
        sizes = ",".join(str(g) for g in self.group_sizes)
        days = ",".join(str(d) for d in self.test_days)
        return f"k={self.k} tau={self.tau} G={{{sizes}}} D={{{days}}}"


@dataclass(frozen=True)
class RealStrategy:
    """Fractional schedule used as a relaxation and as the search seed."""

    k: int
    tau: float
    group_sizes: tuple[float, ...]
    test_days: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "group_sizes", tuple(float(g) for g in self.group_sizes))
        object.__setattr__(self, "test_days", tuple(float(d) for d in self.test_days))
        if len(self.group_sizes) != self.k or len(self.test_days) != self.k:
            raise ValueError("group_sizes and test_days must both have k entries")
        if any(b <= a for a, b in zip(self.test_days, self.test_days[1:])):
            raise ValueError("test days must be strictly increasing")
        if not math.isclose(self.test_days[-1], self.tau):
            raise ValueError("the last test day must equal tau")

    @property
    def m(self) -> float:
        return math.fsum(self.group_sizes)


@dataclass(frozen=True)
class ModelOneConfig:
    p_cap: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_cap <= 1.0:
            raise ValueError(f"p_cap must lie in [0, 1] (got {self.p_cap})")


@dataclass(frozen=True)
class ModelTwoConfig:
    alpha: float

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive (got {self.alpha})")


def testing_cost(k: int, facility: FacilityParams) -> float:
    """Staff minutes for one full round: a preparation per batch plus one test per resident."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return k * facility.prep_time + facility.m * facility.test_time


def staff_capacity(tau: int, facility: FacilityParams) -> float:
    """Staff minutes available over a ``tau``-day cycle."""
    return facility.n * tau * facility.day_length


def pair_workload(k: int, tau: int, facility: FacilityParams) -> float:
    return testing_cost(k, facility) / staff_capacity(tau, facility)


def workload_fraction(strategy: TestingStrategy, facility: FacilityParams) -> float:
    return pair_workload(strategy.k, strategy.tau, facility)


def pair_within_budget(k: int, tau: int, facility: FacilityParams, p_cap: float) -> bool:
    return testing_cost(k, facility) <= p_cap * staff_capacity(tau, facility)


def is_budget_feasible(strategy: TestingStrategy, facility: FacilityParams, p_cap: float) -> bool:
    return pair_within_budget(strategy.k, strategy.tau, facility, p_cap)


def validate(strategy: TestingStrategy, facility: FacilityParams) -> list[str]:
    """Return every violated schedule rule; an empty list means the strategy is valid."""
    problems: list[str] = []
    sizes, days = strategy.group_sizes, strategy.test_days
    if strategy.k < 1:
        problems.append(f"k must be >= 1 (got {strategy.k})")
    if len(sizes) != strategy.k:
        problems.append(f"expected {strategy.k} group sizes, got {len(sizes)}")
    if len(days) != strategy.k:
        problems.append(f"expected {strategy.k} test days, got {len(days)}")
    if strategy.k > strategy.tau:
        problems.append(f"k={strategy.k} exceeds tau={strategy.tau} (one batch per day)")
    if strategy.tau > facility.max_tau:
        problems.append(f"tau={strategy.tau} exceeds max_tau={facility.max_tau}")
    if sum(sizes) != facility.m:
        problems.append(f"sum of sizes {sum(sizes)} ≠ m={facility.m}")
    for i, g in enumerate(sizes):
        if g < 1:
            problems.append(f"group {i + 1} is empty")
        elif g > facility.max_group:
            problems.append(f"group {i + 1} has {g} residents, above max_group={facility.max_group}")
    if any(b <= a for a, b in zip(days, days[1:])):
        problems.append("test days are not strictly increasing")
    if days and days[0] < 1:
        problems.append("test days must be >= 1")
    if days and days[-1] != strategy.tau:
        problems.append(f"d_k={days[-1]} ≠ tau={strategy.tau}")
    return problems



def cyclic_signature(strategy: TestingStrategy) -> tuple[tuple[int, int], ...]:
    """Smallest rotation of the (gap before test, group size) cycle.

    Detection time depends only on this cycle, so two strategies with the same
    signature are interchangeable: they are shifts of each other in time.
    """
    cycle = list(zip(strategy.gaps(), strategy.group_sizes))
    return min(tuple(cycle[i:] + cycle[:i]) for i in range(len(cycle)))


def rotation_equivalent(a: TestingStrategy, b: TestingStrategy) -> bool:
    return a.tau == b.tau and a.k == b.k and cyclic_signature(a) == cyclic_signature(b)
