"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected and repeated in the pytest terminal summary.
"""

import math
import random
import time

import pytest

import conftest
from testsched.cli import main
from testsched.epidemics import (
    SOURCE_MODELS,
    expected_detection_time,
    expected_infections,
    group_detection_probability,
    infection_probability,
)
from testsched.model import (
    EpidemicParams,
    FacilityParams,
    TestingStrategy,
    rotation_equivalent,
    testing_cost as round_cost,
    workload_fraction,
)
from testsched.oracle import brute_force_model1, brute_force_model2, symmetry_grid_check
from testsched.solver import SearchConfig, solve_model1, solve_model2, sweep_alpha, sweep_p
from testsched.tables import DETECTION_TIME_RUNS, WORKLOAD_RUNS

SMALL_HOME = FacilityParams(m=30, n=5, max_tau=7, max_group=20, prep_time=180, test_time=15)


def record(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'} | {detail}"
    print(line)
    conftest.ACCEPTANCE_LINES[number] = line
    assert passed, line


def random_strategy(rng: random.Random, m: int, tau: int) -> TestingStrategy:
    k = rng.randint(1, min(tau, m))
    days = sorted(rng.sample(range(1, tau), k - 1)) + [tau]
    cuts = sorted(rng.sample(range(1, m), k - 1))
    sizes = [b - a for a, b in zip([0] + cuts, cuts + [m])]
    return TestingStrategy(k, tau, sizes, days)


def test_criterion_01_small_home_detection_time():
    epid = EpidemicParams(beta=0.1, kappa=15)
    target = TestingStrategy(4, 5, (6, 10, 8, 6), (1, 2, 4, 5))
    start = time.perf_counter()
    report = solve_model1(SMALL_HOME, epid, 0.10)
    elapsed = time.perf_counter() - start
    direct = {model: expected_detection_time(target, epid, model) for model in SOURCE_MODELS}
    matching = [model for model, value in direct.items() if abs(value - 1.2133) <= 1e-3]
    solver_ok = (
        report.feasible
        and abs(report.objective - 1.2133) <= 1e-3
        and rotation_equivalent(report.strategy, target)
    )
    at_17 = expected_detection_time(target, EpidemicParams(beta=0.1, kappa=17))
    detail = (
        f"solver {report.strategy.describe() if report.feasible else 'infeasible'} "
        f"E={report.objective:.4f} in {elapsed:.1f}s; target strategy evaluates to "
        + ", ".join(f"{m}={v:.4f}" for m, v in direct.items())
        + f" (expected 1.2133; kappa=17 gives {at_17:.4f})"
    )
    record(1, solver_ok and bool(matching) and elapsed < 10, detail)


def test_criterion_02_small_home_workload():
    epid = EpidemicParams(beta=0.1, kappa=15)
    target = TestingStrategy(3, 3, (10, 10, 10), (1, 2, 3))
    report = solve_model2(SMALL_HOME, epid, 0.5)
    exact_p = round_cost(3, SMALL_HOME) / 7200
    strategy_ok = report.feasible and rotation_equivalent(report.strategy, target)
    p_ok = report.feasible and report.objective == exact_p == 0.1375
    e_value = expected_detection_time(target, epid)
    e_ok = strategy_ok and abs(report.expected_detection_time - 0.8658) <= 1e-3
    detail = (
        f"solver {report.strategy.describe() if report.feasible else 'infeasible'} "
        f"p={report.objective if report.feasible else float('nan'):.4f} "
        f"E={report.expected_detection_time if report.feasible else float('nan'):.4f}; "
        f"target evaluates to E={e_value:.4f} (expected 0.8658, p=0.1375)"
    )
    record(2, strategy_ok and p_ok and e_ok, detail)


GOLDEN_RUNS = (5, 6, 9, 17, 29, 33, 38, 45)
INFEASIBLE_RUNS = (1, 2, 3, 4, 25, 26, 27, 28, 35, 36, 43, 44)


@pytest.mark.slow
def test_criterion_03_detection_time_grid():
    start = time.perf_counter()
    reports = {}
    for row in DETECTION_TIME_RUNS:
        reports[row.run] = solve_model1(row.facility(), row.epidemic(), row.cap)
    elapsed = time.perf_counter() - start
    problems = []
    for row in DETECTION_TIME_RUNS:
        report = reports[row.run]
        if row.run in INFEASIBLE_RUNS and report.feasible:
            problems.append(f"run {row.run} should be infeasible")
        if row.run not in GOLDEN_RUNS:
            continue
        if not report.feasible:
            problems.append(f"run {row.run} infeasible")
            continue
        s, ref = report.strategy, row.strategy()
        same_pair = (s.k, s.tau) == (ref.k, ref.tau)
        # Tie-equivalent: a time shift of the reference, or an equally good schedule of the same pair.
        reference_value = expected_detection_time(ref, row.epidemic())
        tie = rotation_equivalent(s, ref) or abs(report.objective - reference_value) <= 1e-3
        if not (same_pair and tie and abs(report.objective - row.value) <= 1e-3):
            problems.append(f"run {row.run}: got {s.describe()} E={report.objective:.4f}, want {row.value}")
    detail = f"{len(GOLDEN_RUNS)} golden + {len(INFEASIBLE_RUNS)} infeasible runs checked, 48 runs in {elapsed:.1f}s"
    if problems:
        detail += "; " + "; ".join(problems)
    record(3, not problems and elapsed < 600, detail)


def test_criterion_04_workload_arithmetic():
    worst = 0.0
    checked = 0
    for row in WORKLOAD_RUNS:
        if not row.feasible:
            continue
        checked += 1
        percent = 100 * workload_fraction(row.strategy(), row.facility())
        worst = max(worst, abs(percent - row.value))
    record(4, worst <= 0.01 + 1e-9, f"{checked} rows, worst deviation {worst:.4f} percentage points")


def _oracle_instances(seed: int, count: int):
    rng = random.Random(seed)
    for _ in range(count):
        m = rng.randint(8, 20)
        max_tau = rng.randint(3, 5)
        max_group = rng.randint(math.ceil(m / max_tau), m)
        facility = FacilityParams(m=m, n=rng.randint(2, 6), max_tau=max_tau, max_group=max_group)
        epid = EpidemicParams(beta=rng.uniform(0.02, 0.5), kappa=rng.uniform(1, m))
        yield rng, facility, epid


def _compare(pairs):
    exact = within = 0
    for solver_value, oracle_value in pairs:
        if solver_value is None or oracle_value is None:
            if solver_value is None and oracle_value is None:
                exact += 1
            continue
        if abs(solver_value - oracle_value) <= 1e-9:
            exact += 1
        elif solver_value <= oracle_value * 1.01:
            within += 1
    return exact, within


@pytest.mark.slow
def test_criterion_05_oracle_equivalence():
    count = 60
    model1, model2 = [], []
    for rng, facility, epid in _oracle_instances(2024, count):
        p_cap = rng.uniform(0.05, 0.6)
        model1.append(
            (solve_model1(facility, epid, p_cap).objective, brute_force_model1(facility, epid, p_cap).objective)
        )
        alpha = rng.uniform(0.2, 2.0)
        model2.append(
            (solve_model2(facility, epid, alpha).objective, brute_force_model2(facility, epid, alpha).objective)
        )
    exact1, near1 = _compare(model1)
    exact2, near2 = _compare(model2)
    feasible1 = sum(o is not None for _, o in model1)
    feasible2 = sum(o is not None for _, o in model2)
    ok = all(
        exact / count >= 0.98 and exact + near == count for exact, near in ((exact1, near1), (exact2, near2))
    )
    detail = (
        f"detection model {exact1}/{count} exact, {near1} within 1% ({feasible1} feasible); "
        f"workload model {exact2}/{count} exact, {near2} within 1% ({feasible2} feasible)"
    )
    record(5, ok, detail)


def test_criterion_06_limit_regimes():
    rng = random.Random(6)
    worst_high = 0.0
    for _ in range(100):
        m = rng.randint(5, 30)
        tau = rng.randint(1, 7)
        strategy = random_strategy(rng, m, tau)
        # Contact rates of at least m make one day of spread certain at this beta.
        epid = EpidemicParams(beta=1 - 1e-9, kappa=rng.uniform(m, 3 * m))
        gaps = strategy.gaps()
        closed = (tau + sum(g * g for g in gaps)) / (2 * tau)
        value = expected_detection_time(strategy, epid, midday_arrival=False)
        worst_high = max(worst_high, abs(value - closed))

    worst_low = 0.0
    for _ in range(20):
        m = rng.randint(5, 30)
        tau = rng.randint(1, 7)
        epid = EpidemicParams(beta=1e-9, kappa=rng.uniform(1, m))
        values = [expected_detection_time(random_strategy(rng, m, tau), epid) for _ in range(5)]
        worst_low = max(worst_low, max(values) - min(values))

    regimes = {
        "beta->0": EpidemicParams(beta=1e-9, kappa=5),
        "beta->1": EpidemicParams(beta=1 - 1e-9, kappa=5),
        "kappa->0": EpidemicParams(beta=0.1, kappa=1e-9),
        "kappa->inf": EpidemicParams(beta=0.1, kappa=1e6),
    }
    grid_failures = []
    for name, epid in regimes.items():
        for m, k, tau in ((10, 2, 4), (10, 3, 5), (20, 4, 6)):
            result = symmetry_grid_check(m, k, tau, epid, grid_step=0.05, tolerance=1e-6)
            if not result.passed:
                grid_failures.append(f"{name} m={m} k={k} tau={tau}")
    ok = worst_high <= 1e-6 and worst_low <= 1e-6 and not grid_failures
    detail = (
        f"beta->1 closed-form error {worst_high:.2e}; beta->0 same-tau spread {worst_low:.2e}; "
        f"grid check failures: {grid_failures or 'none'}"
    )
    record(6, ok, detail)


def test_criterion_07_closed_forms_and_probability_properties():
    problems = []
    for tau in range(1, 15):
        for m in (2, 10, 50):
            s = TestingStrategy(1, tau, (m,), (tau,))
            for epid in (EpidemicParams(0.1, 9), EpidemicParams(0.7, 40)):
                if expected_detection_time(s, epid, midday_arrival=False) != (tau + 1) / 2:
                    problems.append(f"single batch tau={tau} m={m}")
    betas = [i / 20 for i in range(21)]
    for m in (10, 30, 50):
        for kappa in range(51):
            for beta in betas:
                previous = -1.0
                for d in range(29):
                    p = infection_probability(m, kappa, beta, d)
                    if d == 0 and p != 0.0:
                        problems.append("P_I(0) != 0")
                    if p < previous:
                        problems.append(f"not monotone in d at m={m} kappa={kappa} beta={beta}")
                        break
                    previous = p
            for d in range(29):
                column = [infection_probability(m, kappa, beta, d) for beta in betas]
                if any(b < a for a, b in zip(column, column[1:])):
                    problems.append(f"not monotone in beta at m={m} kappa={kappa} d={d}")
        for beta in betas:
            for d in range(29):
                row = [infection_probability(m, kappa, beta, d) for kappa in range(51)]
                if any(b < a for a, b in zip(row, row[1:])):
                    problems.append(f"not monotone in kappa at m={m} beta={beta} d={d}")
        for r_d in range(10):
            if group_detection_probability(m, 9, 0.1, r_d, m) != 1.0:
                problems.append("whole-home group detection != 1")
    for m in (10, 30, 50):
        for kappa in (1, 9, 17, 29):
            for beta in (0.02, 0.1, 0.3):
                values = [expected_infections(m, kappa, beta, d) for d in range(29)]
                for a, b in zip(values, values[1:]):
                    # strictly increasing until the whole home is infected in floating point
                    if not (b > a or a == m):
                        problems.append(f"expected infections flat at m={m} kappa={kappa} beta={beta}")
                        break
    record(7, not problems, "all closed forms and monotonicity checks hold" if not problems else "; ".join(problems[:5]))


@pytest.mark.slow
def test_criterion_08_symmetry_grid():
    start = time.perf_counter()
    failures = []
    checks = 0
    for m in (10, 20, 40):
        for beta in (0.05, 0.1, 0.3):
            epid = EpidemicParams(beta=beta, kappa=0.5 * m)
            for tau in range(1, 8):
                for k in range(1, tau + 1):
                    result = symmetry_grid_check(m, k, tau, epid, grid_step=0.05)
                    checks += 1
                    if not result.passed:
                        failures.append(
                            f"m={m} beta={beta} k={k} tau={tau}: {result.best_value:.6f} < {result.symmetric_value:.6f}"
                        )
    elapsed = time.perf_counter() - start
    detail = f"{checks} (m, beta, k, tau) checks in {elapsed:.0f}s; {len(failures)} failures {failures[:3] or ''}"
    record(8, not failures and elapsed < 1800, detail)


def _prefix_structure(values):
    """True when infeasible entries (None) form a prefix and the rest is non-increasing."""
    first = next((i for i, v in enumerate(values) if v is not None), len(values))
    tail = values[first:]
    return all(v is not None for v in tail) and all(b <= a + 1e-12 for a, b in zip(tail, tail[1:])), first


def test_criterion_09_sweeps():
    facility = FacilityParams(m=50, n=10, max_tau=7, max_group=30)
    problems = []
    p_values = [round(0.01 * i, 2) for i in range(0, 16)]
    for kappa in (9, 17):
        values = [pt.objective for pt in sweep_p(facility, EpidemicParams(0.1, kappa), p_values)]
        ok, first = _prefix_structure(values)
        if not ok:
            problems.append(f"p sweep kappa={kappa} not monotone: {values}")
        if first == 0:
            problems.append(f"p sweep kappa={kappa} has no infeasible prefix")
        if values[-1] != values[-2]:
            problems.append(f"p sweep kappa={kappa} has no plateau")
    alpha_values = [round(0.05 * i, 2) for i in range(1, 21)]
    thresholds = []
    for kappa in (9, 17):
        loads = [pt.objective for pt in sweep_alpha(facility, EpidemicParams(0.1, kappa), alpha_values)]
        ok, first = _prefix_structure(loads)
        if not ok:
            problems.append(f"alpha sweep kappa={kappa} not monotone: {loads}")
        if first == 0:
            problems.append(f"alpha sweep kappa={kappa} has no infeasible prefix")
        thresholds.append(alpha_values[first] if first < len(alpha_values) else None)
    detail = f"first feasible alpha {thresholds}" if not problems else "; ".join(problems)
    record(9, not problems, detail)


def test_criterion_10_determinism(tmp_path):
    config = tmp_path / "home.ini"
    config.write_text(
        "[facility]\nm = 30\nn = 5\nmax_tau = 7\nmax_group = 20\n"
        "[epidemic]\nbeta = 0.1\nkappa = 17\n[model]\ntype = 1\np_cap = 0.1\n"
    )
    outputs = []
    for attempt in range(2):
        folder = tmp_path / f"run{attempt}"
        folder.mkdir()
        main(["solve", "--config", str(config), "--seed", "3", "--out", str(folder / "solve.csv")])
        main(["sweep", "--config", str(config), "--axis", "p", "--from", "0.04", "--to", "0.12",
              "--step", "0.02", "--out", str(folder / "sweep.csv"), "--plot", str(folder / "sweep.svg")])
        main(["reproduce", "--table", "2", "--out", str(folder / "table2.csv")])
        outputs.append([(folder / n).read_bytes() for n in ("solve.csv", "sweep.csv", "sweep.svg", "table2.csv")])
    identical = outputs[0] == outputs[1]

    drift = []
    for row in DETECTION_TIME_RUNS:
        if row.run not in GOLDEN_RUNS:
            continue
        a = solve_model1(row.facility(), row.epidemic(), row.cap, SearchConfig(rng_seed=0))
        b = solve_model1(row.facility(), row.epidemic(), row.cap, SearchConfig(rng_seed=1))
        if round(a.objective, 4) != round(b.objective, 4):
            drift.append(row.run)
    detail = f"outputs byte-identical: {identical}; golden objectives differing across seeds: {drift or 'none'}"
    record(10, identical and not drift, detail)
