"""Reference optima for the 48-run benchmark grids of both models.

Both grids use beta = 0.1, 180-minute batch preparation and 15-minute tests.
Rows without a schedule are instances reported as infeasible. For the
detection-time grid ``cap`` is the workload cap p and ``value`` is the
expected detection time in days; for the workload grid ``cap`` is alpha and
``value`` is the workload in percent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .model import EpidemicParams, FacilityParams, TestingStrategy


@dataclass(frozen=True)
class ReferenceRun:
    run: int
    m: int
    n: int
    cap: float
    max_tau: int
    max_group: int
    kappa: int
    k: Optional[int] = None
    tau: Optional[int] = None
    group_sizes: Optional[tuple[int, ...]] = None
    test_days: Optional[tuple[int, ...]] = None
    value: Optional[float] = None

    @property
    def feasible(self) -> bool:
        return self.k is not None

    def facility(self) -> FacilityParams:
        return FacilityParams(m=self.m, n=self.n, max_tau=self.max_tau, max_group=self.max_group)

    def epidemic(self) -> EpidemicParams:
        return EpidemicParams(beta=0.1, kappa=self.kappa)

    def strategy(self) -> Optional[TestingStrategy]:
        if not self.feasible:
            return None
        return TestingStrategy(self.k, self.tau, self.group_sizes, self.test_days)


DETECTION_TIME_RUNS = (
    ReferenceRun(1, 50, 10, 0.05, 4, 30, 9),
    ReferenceRun(2, 50, 10, 0.05, 4, 30, 17),
    ReferenceRun(3, 50, 10, 0.05, 4, 22, 9),
    ReferenceRun(4, 50, 10, 0.05, 4, 22, 17),
    ReferenceRun(5, 50, 10, 0.05, 7, 30, 9, 2, 5, (28, 22), (2, 5), 1.7365),
    ReferenceRun(6, 50, 10, 0.05, 7, 30, 17, 3, 6, (16, 17, 17), (2, 4, 6), 1.4355),
    ReferenceRun(7, 50, 10, 0.05, 7, 22, 9, 3, 6, (16, 17, 17), (2, 4, 6), 1.7587),
    ReferenceRun(8, 50, 10, 0.05, 7, 22, 17, 3, 6, (16, 17, 17), (2, 4, 6), 1.4355),
    ReferenceRun(9, 50, 10, 0.1, 4, 30, 9, 3, 3, (16, 17, 17), (1, 2, 3), 1.0427),
    ReferenceRun(10, 50, 10, 0.1, 4, 30, 17, 3, 3, (16, 17, 17), (1, 2, 3), 0.8692),
    ReferenceRun(11, 50, 10, 0.1, 4, 22, 9, 3, 3, (16, 17, 17), (1, 2, 3), 1.0427),
    ReferenceRun(12, 50, 10, 0.1, 4, 22, 17, 3, 3, (16, 17, 17), (1, 2, 3), 0.8692),
    ReferenceRun(13, 50, 10, 0.1, 7, 30, 9, 3, 3, (16, 17, 17), (1, 2, 3), 1.0427),
    ReferenceRun(14, 50, 10, 0.1, 7, 30, 17, 3, 3, (16, 17, 17), (1, 2, 3), 0.8692),
    ReferenceRun(15, 50, 10, 0.1, 7, 22, 9, 3, 3, (16, 17, 17), (1, 2, 3), 1.0427),
    ReferenceRun(16, 50, 10, 0.1, 7, 22, 17, 3, 3, (16, 17, 17), (1, 2, 3), 0.8692),
    ReferenceRun(17, 50, 10, 0.2, 4, 30, 9, 2, 2, (25, 25), (1, 2), 0.8082),
    ReferenceRun(18, 50, 10, 0.2, 4, 30, 17, 2, 2, (25, 25), (1, 2), 0.7005),
    ReferenceRun(19, 50, 10, 0.2, 4, 22, 9, 3, 3, (16, 17, 17), (1, 2, 3), 1.0427),
    ReferenceRun(20, 50, 10, 0.2, 4, 22, 17, 3, 3, (16, 17, 17), (1, 2, 3), 0.8692),
    ReferenceRun(21, 50, 10, 0.2, 7, 30, 9, 2, 2, (25, 25), (1, 2), 0.8082),
    ReferenceRun(22, 50, 10, 0.2, 7, 30, 17, 2, 2, (25, 25), (1, 2), 0.7005),
    ReferenceRun(23, 50, 10, 0.2, 7, 22, 9, 3, 3, (16, 17, 17), (1, 2, 3), 1.0427),
    ReferenceRun(24, 50, 10, 0.2, 7, 22, 17, 3, 3, (16, 17, 17), (1, 2, 3), 0.8692),
    ReferenceRun(25, 90, 15, 0.05, 4, 30, 15),
    ReferenceRun(26, 90, 15, 0.05, 4, 30, 29),
    ReferenceRun(27, 90, 15, 0.05, 4, 22, 15),
    ReferenceRun(28, 90, 15, 0.05, 4, 22, 29),
    ReferenceRun(29, 90, 15, 0.05, 7, 30, 15, 4, 6, (25, 20, 25, 20), (1, 3, 4, 6), 1.4332),
    ReferenceRun(30, 90, 15, 0.05, 7, 30, 29, 6, 7, (13, 13, 13, 12, 23, 16), (1, 2, 3, 4, 5, 7), 1.1547),
    ReferenceRun(31, 90, 15, 0.05, 7, 22, 15, 6, 7, (21, 17, 13, 13, 13, 13), (1, 3, 4, 5, 6, 7), 1.4673),
    ReferenceRun(32, 90, 15, 0.05, 7, 22, 29, 6, 7, (13, 13, 13, 22, 16, 13), (1, 2, 3, 4, 6, 7), 1.1548),
    ReferenceRun(33, 90, 15, 0.1, 4, 30, 15, 3, 3, (30, 30, 30), (1, 2, 3), 0.9035),
    ReferenceRun(34, 90, 15, 0.1, 4, 30, 29, 3, 3, (30, 30, 30), (1, 2, 3), 0.7381),
    ReferenceRun(35, 90, 15, 0.1, 4, 22, 15),
    ReferenceRun(36, 90, 15, 0.1, 4, 22, 29),
    ReferenceRun(37, 90, 15, 0.1, 7, 30, 15, 3, 3, (30, 30, 30), (1, 2, 3), 0.9035),
    ReferenceRun(38, 90, 15, 0.1, 7, 30, 29, 3, 3, (30, 30, 30), (1, 2, 3), 0.7381),
    ReferenceRun(39, 90, 15, 0.1, 7, 22, 15, 5, 5, (18, 18, 18, 18, 18), (1, 2, 3, 4, 5), 1.1904),
    ReferenceRun(40, 90, 15, 0.1, 7, 22, 29, 5, 5, (18, 18, 18, 18, 18), (1, 2, 3, 4, 5), 0.9391),
    ReferenceRun(41, 90, 15, 0.2, 4, 30, 15, 3, 3, (30, 30, 30), (1, 2, 3), 0.9035),
    ReferenceRun(42, 90, 15, 0.2, 4, 30, 29, 3, 3, (30, 30, 30), (1, 2, 3), 0.7381),
    ReferenceRun(43, 90, 15, 0.2, 4, 22, 15),
    ReferenceRun(44, 90, 15, 0.2, 4, 22, 29),
    ReferenceRun(45, 90, 15, 0.2, 7, 30, 15, 3, 3, (30, 30, 30), (1, 2, 3), 0.9035),
    ReferenceRun(46, 90, 15, 0.2, 7, 30, 29, 3, 3, (30, 30, 30), (1, 2, 3), 0.7381),
    ReferenceRun(47, 90, 15, 0.2, 7, 22, 15, 5, 5, (18, 18, 18, 18, 18), (1, 2, 3, 4, 5), 1.1904),
    ReferenceRun(48, 90, 15, 0.2, 7, 22, 29, 5, 5, (18, 18, 18, 18, 18), (1, 2, 3, 4, 5), 0.9391),
)

WORKLOAD_RUNS = (
    ReferenceRun(1, 50, 10, 0.3, 4, 30, 9, 3, 3, (16, 17, 17), (1, 2, 3), 8.96),
    ReferenceRun(2, 50, 10, 0.3, 4, 30, 17),
    ReferenceRun(3, 50, 10, 0.3, 4, 22, 9, 3, 3, (16, 17, 17), (1, 2, 3), 8.96),
    ReferenceRun(4, 50, 10, 0.3, 4, 22, 17),
    ReferenceRun(5, 50, 10, 0.3, 7, 30, 9, 3, 3, (16, 17, 17), (1, 2, 3), 8.96),
    ReferenceRun(6, 50, 10, 0.3, 7, 30, 17),
    ReferenceRun(7, 50, 10, 0.3, 7, 22, 9, 3, 3, (16, 17, 17), (1, 2, 3), 8.96),
    ReferenceRun(8, 50, 10, 0.3, 7, 22, 17),
    ReferenceRun(9, 50, 10, 0.5, 4, 30, 9, 2, 4, (25, 25), (2, 4), 5.78),
    ReferenceRun(10, 50, 10, 0.5, 4, 30, 17, 4, 4, (12, 13, 12, 13), (1, 2, 3, 4), 7.66),
    ReferenceRun(11, 50, 10, 0.5, 4, 22, 9, 3, 4, (16, 17, 17), (1, 2, 4), 6.72),
    ReferenceRun(12, 50, 10, 0.5, 4, 22, 17, 4, 4, (12, 13, 12, 13), (1, 2, 3, 4), 7.66),
    ReferenceRun(13, 50, 10, 0.5, 7, 30, 9, 2, 4, (25, 25), (2, 4), 5.78),
    ReferenceRun(14, 50, 10, 0.5, 7, 30, 17, 4, 4, (12, 13, 12, 13), (1, 2, 3, 4), 7.66),
    ReferenceRun(15, 50, 10, 0.5, 7, 22, 9, 4, 5, (12, 13, 12, 13), (1, 2, 3, 5), 6.13),
    ReferenceRun(16, 50, 10, 0.5, 7, 22, 17, 4, 4, (12, 13, 12, 13), (1, 2, 3, 4), 7.66),
    ReferenceRun(17, 50, 10, 0.75, 4, 30, 9, 2, 4, (25, 25), (2, 4), 5.78),
    ReferenceRun(18, 50, 10, 0.75, 4, 30, 17, 3, 4, (16, 17, 17), (1, 2, 4), 6.72),
    ReferenceRun(19, 50, 10, 0.75, 4, 22, 9, 3, 4, (16, 17, 17), (1, 2, 4), 6.72),
    ReferenceRun(20, 50, 10, 0.75, 4, 22, 17, 3, 4, (16, 17, 17), (1, 2, 4), 6.72),
    ReferenceRun(21, 50, 10, 0.75, 7, 30, 9, 3, 7, (16, 17, 17), (2, 4, 7), 3.84),
    ReferenceRun(22, 50, 10, 0.75, 7, 30, 17, 3, 4, (16, 17, 17), (1, 2, 4), 6.72),
    ReferenceRun(23, 50, 10, 0.75, 7, 22, 9, 3, 7, (16, 17, 17), (2, 4, 7), 3.84),
    ReferenceRun(24, 50, 10, 0.75, 7, 22, 17, 3, 4, (16, 17, 17), (1, 2, 4), 6.72),
    ReferenceRun(25, 90, 15, 0.3, 4, 30, 15),
    ReferenceRun(26, 90, 15, 0.3, 4, 30, 29),
    ReferenceRun(27, 90, 15, 0.3, 4, 22, 15),
    ReferenceRun(28, 90, 15, 0.3, 4, 22, 29),
    ReferenceRun(29, 90, 15, 0.3, 7, 30, 15),
    ReferenceRun(30, 90, 15, 0.3, 7, 30, 29),
    ReferenceRun(31, 90, 15, 0.3, 7, 22, 15),
    ReferenceRun(32, 90, 15, 0.3, 7, 22, 29),
    ReferenceRun(33, 90, 15, 0.5, 4, 30, 15, 4, 4, (22, 23, 22, 23), (1, 2, 3, 4), 7.19),
    ReferenceRun(34, 90, 15, 0.5, 4, 30, 29),
    ReferenceRun(35, 90, 15, 0.5, 4, 22, 15),
    ReferenceRun(36, 90, 15, 0.5, 4, 22, 29),
    ReferenceRun(37, 90, 15, 0.5, 7, 30, 15, 4, 4, (22, 23, 22, 23), (1, 2, 3, 4), 7.19),
    ReferenceRun(38, 90, 15, 0.5, 7, 30, 29),
    ReferenceRun(39, 90, 15, 0.5, 7, 22, 15),
    ReferenceRun(40, 90, 15, 0.5, 7, 22, 29),
    ReferenceRun(41, 90, 15, 0.75, 4, 30, 15, 3, 4, (30, 30, 30), (1, 2, 4), 6.56),
    ReferenceRun(42, 90, 15, 0.75, 4, 30, 29, 3, 4, (30, 30, 30), (1, 2, 4), 6.56),
    ReferenceRun(43, 90, 15, 0.75, 4, 22, 15),
    ReferenceRun(44, 90, 15, 0.75, 4, 22, 29),
    ReferenceRun(45, 90, 15, 0.75, 7, 30, 15, 5, 6, (18, 18, 18, 18, 18), (1, 2, 3, 4, 6), 5.21),
    ReferenceRun(46, 90, 15, 0.75, 7, 30, 29, 5, 5, (18, 18, 18, 18, 18), (1, 2, 3, 4, 5), 6.25),
    ReferenceRun(47, 90, 15, 0.75, 7, 22, 15, 5, 6, (18, 18, 18, 18, 18), (1, 2, 3, 4, 6), 5.21),
    ReferenceRun(48, 90, 15, 0.75, 7, 22, 29, 5, 5, (18, 18, 18, 18, 18), (1, 2, 3, 4, 5), 6.25),
)

TABLES = {1: DETECTION_TIME_RUNS, 2: WORKLOAD_RUNS}
