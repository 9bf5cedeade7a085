"""Infection probabilities, detection times and the introduction risk.

Residents mix on a complete contact graph. ``P_I(d)`` is the probability
that a given resident has been infected ``d`` days after one infectious
person entered the home, built by a one-day recursion on expected contacts.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .model import EpidemicParams, FacilityParams, RealStrategy, TestingStrategy

Strategy = Union[TestingStrategy, RealStrategy]

# How the chance that a tested group contains the index case is modelled.
#   remaining:   the index case is uniformly among residents not yet tested in
#                this cycle, and secondary cases follow the epidemic inside that
#                remaining population.
#   verbatim:    the group term g/m is kept inside the per-group detection
#                probability and the whole home is the contact population.
#   conditional: as verbatim but without the g/m term.
SOURCE_MODELS = ("remaining", "verbatim", "conditional")
DEFAULT_SOURCE_MODEL = "remaining"


def _contact_exponents(m: float, kappa: float) -> tuple[float, float]:
    # One of each resident's kappa daily contacts is, on average, with the
    # index case; the rest go to other residents.
    direct = kappa / (m - 1)
    indirect = max(0.0, kappa * (1 - 1 / (m - 1)))
    return direct, indirect


def _step(p: float, beta: float, direct: float, indirect: float, fraction: float = 1.0) -> float:
    escape = (1 - beta) ** (fraction * direct) * (1 - p * beta) ** (fraction * indirect)
    return 1 - (1 - p) * escape


class InfectionCurve:
    """Memoized ``P_I(d)`` for one ``(m, kappa, beta)``.

    ``m`` may be fractional (used by the real-valued relaxation) but must
    exceed one. The table grows lazily; growth is serialized by a lock so
    concurrent readers never observe a partial extension.
    """

    def __init__(self, m: float, kappa: float, beta: float) -> None:
        if m <= 1:
            raise ValueError(f"the contact population must exceed one resident (got m={m})")
        self.m = m
        self.kappa = kappa
        self.beta = beta
        self._direct, self._indirect = _contact_exponents(m, kappa)
        self._values = [0.0]
        self._lock = threading.Lock()

    def __call__(self, d: int) -> float:
        if d < 0:
            raise ValueError("d must be non-negative")
        values = self._values
        if d < len(values):
            return values[d]
        with self._lock:
            values = self._values
            while len(values) <= d:
                values.append(_step(values[-1], self.beta, self._direct, self._indirect))
            return values[d]

    def linear(self, d: float) -> float:
        """Straight-line interpolation between neighbouring whole days."""
        lo = math.floor(d)
        frac = d - lo
        if frac == 0:
            return self(lo)
        return (1 - frac) * self(lo) + frac * self(lo + 1)

    def fractional(self, d: float) -> float:
        """Run the recursion for the whole days, then a partial step scaled by the leftover fraction."""
        lo = math.floor(d)
        frac = d - lo
        base = self(lo)
        if frac == 0:
            return base
        return _step(base, self.beta, self._direct, self._indirect, frac)

    def at(self, d: float) -> float:
        if float(d).is_integer():
            return self(int(d))
        return self.fractional(d)


@lru_cache(maxsize=8192)
def infection_curve(m: float, kappa: float, beta: float) -> InfectionCurve:
    return InfectionCurve(m, kappa, beta)


def infection_probability(m: int, kappa: float, beta: float, d: int) -> float:
    if m < 2:
        raise ValueError("m must be >= 2")
    return infection_curve(m, kappa, beta)(d)


def infection_probability_interp(
    m: float, kappa: float, beta: float, d: float, method: str = "linear"
) -> float:
    """``P_I`` at a fractional number of days.

    ``method="linear"`` interpolates between whole days, ``"fractional"``
    applies the recursion with a partial final day.
    """
    if d < 0:
        raise ValueError("d must be non-negative")
    curve = infection_curve(m, kappa, beta)
    if method == "linear":
        return curve.linear(d)
    if method == "fractional":
        return curve.fractional(d)
    raise ValueError(f"unknown interpolation method {method!r}")


def group_detection_probability(m: int, kappa: float, beta: float, d: int, r: int) -> float:
    """Chance that testing ``r`` of ``m`` residents, ``d`` days after an introduction, finds a case."""
    if not 1 <= r <= m:
        raise ValueError(f"group size must lie in [1, m] (got r={r}, m={m})")
    share = r / m
    if share == 1:
        return 1.0
    p = infection_curve(m, kappa, beta).at(d)
    return share + (1 - share) * (1 - (1 - p) ** r)


def expected_infections(m: int, kappa: float, beta: float, d: float) -> float:
    """Index case plus expected secondary cases after ``d`` days."""
    return 1 + (m - 1) * infection_curve(m, kappa, beta).at(d)


def _rotation(test_days: Sequence[float], tau: float, t0: float) -> list[int]:
    # Tests on or before the arrival day wait for the next cycle.
    keyed = sorted(
        ((day if day > t0 else day + tau), i) for i, day in enumerate(test_days)
    )
    return [i for _, i in keyed]


class DetectionTimeEvaluator:
    """Expected detection time for a fixed cycle ``(tau, test_days)`` as a function of group sizes.

    The rotation order and test distances for each arrival day are computed
    once, so scoring many size vectors (as the annealer does) stays cheap.
    Works for integer and fractional inputs alike.
    """

    def __init__(
        self,
        m: float,
        epid: EpidemicParams,
        tau: float,
        test_days: Sequence[float],
        source_model: str = DEFAULT_SOURCE_MODEL,
        midday_arrival: bool = True,
    ) -> None:
        if source_model not in SOURCE_MODELS:
            raise ValueError(f"unknown source model {source_model!r}")
        self.m = m
        self.epid = epid
        self.tau = tau
        self.test_days = tuple(test_days)
        self.source_model = source_model
        self.midday_arrival = midday_arrival
        self._arrivals = []
        for t0 in range(math.ceil(tau)):
            order = _rotation(self.test_days, tau, t0)
            distances = [
                (self.test_days[i] if self.test_days[i] > t0 else self.test_days[i] + tau) - t0
                for i in order
            ]
            self._arrivals.append((order, distances))

    def _infected(self, population: float, d: float) -> float:
        return infection_curve(population, self.epid.kappa, self.epid.beta).at(d)

    def from_arrival(self, sizes: Sequence[float], t0: int) -> float:
        """Expected days from an introduction on day ``t0`` to the first positive batch."""
        order, distances = self._arrivals[t0]
        return self._walk(sizes, order, distances)

    def _walk(self, sizes: Sequence[float], order: Sequence[int], distances: Sequence[float]) -> float:
        m = self.m
        model = self.source_model
        total = 0.0
        undetected = 1.0
        tested = 0.0
        for i, dist in zip(order, distances):
            size = sizes[i]
            remaining = m - tested
            share = size / remaining if remaining > 0 else 1.0
            if model == "remaining":
                if share >= 1 or remaining <= 1:
                    detect = 1.0
                else:
                    hit = 1 - (1 - self._infected(remaining, dist)) ** size
                    detect = share + (1 - share) * hit
                miss = 1 - detect
            else:
                spread = 1 - (1 - self._infected(m, dist)) ** size
                if model == "verbatim":
                    spread = size / m + (1 - size / m) * spread
                detect = min(1.0, share) + (1 - min(1.0, share)) * spread
                miss = 1 - spread
            total += dist * detect * undetected
            undetected *= miss
            tested += size
        return total

    def __call__(self, sizes: Sequence[float]) -> float:
        total = math.fsum(self._walk(sizes, order, dist) for order, dist in self._arrivals)
        mean = total / len(self._arrivals)
        return mean - 0.5 if self.midday_arrival else mean


def expected_detection_time_from(
    strategy: Strategy,
    epid: EpidemicParams,
    t0: int,
    source_model: str = DEFAULT_SOURCE_MODEL,
) -> float:
    """Expected days to detection for an introduction at the start of day ``t0``."""
    if not 0 <= t0 < strategy.tau:
        raise ValueError(f"t0 must lie in [0, tau) (got {t0})")
    evaluator = DetectionTimeEvaluator(
        strategy.m, epid, strategy.tau, strategy.test_days, source_model, midday_arrival=False
    )
    return evaluator.from_arrival(strategy.group_sizes, t0)


def expected_detection_time(
    strategy: Strategy,
    epid: EpidemicParams,
    source_model: str = DEFAULT_SOURCE_MODEL,
    midday_arrival: bool = True,
) -> float:
    """Mean detection delay over a uniformly random arrival day of the cycle.

    With ``midday_arrival`` the introduction happens half-way through its
    arrival day, which subtracts half a day from the start-of-day average.
    A single batch every ``tau`` days then scores ``tau / 2``; counting from
    the start of the day it scores ``(tau + 1) / 2``.
    """
    evaluator = DetectionTimeEvaluator(
        strategy.m, epid, strategy.tau, strategy.test_days, source_model, midday_arrival
    )
    return evaluator(strategy.group_sizes)


def _fractional_curve_batch(population, kappa: float, beta: float, dist):
    """Vectorized fractional-step ``P_I`` for arrays of populations and distances."""
    population = np.asarray(population, dtype=float)
    dist = np.asarray(dist, dtype=float)
    safe = np.maximum(population, 1 + 1e-9)
    direct = kappa / (safe - 1)
    indirect = np.maximum(0.0, kappa * (1 - 1 / (safe - 1)))
    whole = np.floor(dist)
    frac = dist - whole
    p = np.zeros(np.broadcast(safe, dist).shape)
    for step in range(int(whole.max(initial=0))):
        advance = whole > step
        nxt = 1 - (1 - p) * (1 - beta) ** direct * (1 - p * beta) ** indirect
        p = np.where(advance, nxt, p)
    return 1 - (1 - p) * (1 - beta) ** (frac * direct) * (1 - p * beta) ** (frac * indirect)


def continuous_detection_time(
    m: float,
    epid: EpidemicParams,
    tau: float,
    sizes,
    days,
    source_model: str = DEFAULT_SOURCE_MODEL,
    nodes: int = 12,
) -> np.ndarray:
    """Real-space objective: detection time averaged over a continuous arrival time.

    ``sizes`` and ``days`` are ``(N, k)`` arrays of candidate strategies with
    increasing days ending at ``tau``. The arrival time is integrated with
    Gauss-Legendre quadrature on each stretch between consecutive test days,
    where the rotation order is fixed.
    """
    if source_model not in SOURCE_MODELS:
        raise ValueError(f"unknown source model {source_model!r}")
    sizes = np.atleast_2d(np.asarray(sizes, dtype=float))
    days = np.atleast_2d(np.asarray(days, dtype=float))
    count, k = sizes.shape
    xs, ws = np.polynomial.legendre.leggauss(nodes)
    kappa, beta = epid.kappa, epid.beta
    starts = np.concatenate([np.zeros((count, 1)), days[:, :-1]], axis=1)
    total = np.zeros(count)
    for segment in range(k):
        lo, hi = starts[:, segment], days[:, segment]
        half = (hi - lo) / 2
        order = list(range(segment, k)) + list(range(segment))
        for x, w in zip(xs, ws):
            t0 = lo + half * (x + 1)
            acc = np.zeros(count)
            undetected = np.ones(count)
            tested = np.zeros(count)
            for i in order:
                size = sizes[:, i]
                dist = days[:, i] - t0 + (tau if i < segment else 0.0)
                remaining = m - tested
                share = np.minimum(1.0, size / remaining)
                if source_model == "remaining":
                    p = _fractional_curve_batch(remaining, kappa, beta, dist)
                    hit = 1 - (1 - p) ** size
                    detect = np.where(share >= 1 - 1e-12, 1.0, share + (1 - share) * hit)
                    miss = 1 - detect
                else:
                    p = _fractional_curve_batch(np.full(count, float(m)), kappa, beta, dist)
                    spread = 1 - (1 - p) ** size
                    if source_model == "verbatim":
                        spread = size / m + (1 - size / m) * spread
                    detect = share + (1 - share) * spread
                    miss = 1 - spread
                acc += dist * detect * undetected
                undetected = undetected * miss
                tested = tested + size
            total += w * half * acc
    return total / tau


def arrival_probability(epid: EpidemicParams, facility: FacilityParams, horizon_days: float) -> float:
    """Chance that staff or visitors bring an infection in within ``horizon_days``.

    Each of the ``n`` staff and the ``m * visitor_rate / 14`` weekly visitors
    is independently infected with the local weekly incidence.
    """
    if horizon_days <= 0:
        raise ValueError("horizon_days must be positive")
    contacts = facility.n + facility.m * epid.visitor_rate / 14
    return 1 - (1 - epid.weekly_incidence) ** (contacts * horizon_days / 7)


def background_risk(epid: EpidemicParams, horizon_days: float) -> float:
    """Infection probability of one person outside the home over ``horizon_days``."""
    return 1 - (1 - epid.weekly_incidence) ** (horizon_days / 7)


@dataclass(frozen=True)
class RiskComposition:
    """How the in-home risk and its background reference are assembled.

    ``horizon="day"`` compares one day of introductions against one day of
    background risk; ``"interval"`` uses the whole test interval for both.
    ``interpolation`` selects how ``P_I`` is read at the fractional
    detection time.
    """

    horizon: str = "day"
    interpolation: str = "fractional"

    def __post_init__(self) -> None:
        if self.horizon not in ("day", "interval"):
            raise ValueError(f"horizon must be 'day' or 'interval' (got {self.horizon!r})")
        if self.interpolation not in ("linear", "fractional"):
            raise ValueError(
                f"interpolation must be 'linear' or 'fractional' (got {self.interpolation!r})"
            )

    def horizon_days(self, tau: float) -> float:
        return 1.0 if self.horizon == "day" else float(tau)


@dataclass(frozen=True)
class RiskAssessment:
    expected_detection_time: float
    infection_probability_at_detection: float
    arrival_probability: float
    risk: float
    background_risk: float

    def within(self, alpha: float) -> bool:
        return self.risk <= alpha * self.background_risk

    @property
    def relative_risk(self) -> float:
        if self.background_risk == 0:
            return 0.0 if self.risk == 0 else math.inf
        return self.risk / self.background_risk


def risk_of_infection(
    strategy: Strategy,
    epid: EpidemicParams,
    facility: FacilityParams,
    composition: RiskComposition = RiskComposition(),
    source_model: str = DEFAULT_SOURCE_MODEL,
    detection_time: float | None = None,
) -> RiskAssessment:
    """Probability that a resident is infected through an introduction before it is detected.

    ``detection_time`` may be passed in when the caller already computed it.
    """
    if detection_time is None:
        detection_time = expected_detection_time(strategy, epid, source_model)
    return assess_risk(detection_time, strategy.tau, epid, facility, composition)


def assess_risk(
    detection_time: float,
    tau: float,
    epid: EpidemicParams,
    facility: FacilityParams,
    composition: RiskComposition = RiskComposition(),
) -> RiskAssessment:
    """Risk of a schedule with interval ``tau`` whose expected detection time is known."""
    if facility.m >= 2:
        at_detection = infection_probability_interp(
            facility.m, epid.kappa, epid.beta, max(0.0, detection_time), composition.interpolation
        )
    else:
        at_detection = 0.0
    horizon = composition.horizon_days(tau)
    arrival = arrival_probability(epid, facility, horizon)
    return RiskAssessment(
        expected_detection_time=detection_time,
        infection_probability_at_detection=at_detection,
        arrival_probability=arrival,
        risk=arrival * at_detection,
        background_risk=background_risk(epid, horizon),
    )
