"""Command-line entry point: ``solve``, ``reproduce`` and ``sweep``.

Configuration files use ``key = value`` lines grouped under ``[facility]``,
``[epidemic]``, ``[model]``, ``[search]`` and an optional ``[output]``
section. See the README for every key.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Optional, Sequence

from .epidemics import SOURCE_MODELS, RiskComposition
from .model import EpidemicParams, FacilityParams, TestingStrategy
from .solver import SearchConfig, SolveReport, solve_model1, solve_model2
from .tables import TABLES, ReferenceRun

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
NO_STRATEGY = "There is no feasible strategy"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    facility: FacilityParams
    epidemic: EpidemicParams
    model: int
    parameter: float
    search: SearchConfig
    csv_path: Optional[str] = None
    report_path: Optional[str] = None


_FACILITY_KEYS = {
    "m": int, "n": int, "max_tau": int, "max_group": int,
    "prep_time": float, "test_time": float, "day_length": float,
}
_EPIDEMIC_KEYS = {"beta": float, "kappa": float, "weekly_incidence": float, "visitor_rate": float}
_REQUIRED = {"facility": ("m", "n", "max_tau", "max_group"), "epidemic": ("beta", "kappa")}


def _read_section(parser, name, schema):
    if not parser.has_section(name):
        raise ConfigError(f"missing section [{name}]")
    section = parser[name]
    for key in _REQUIRED.get(name, ()):
        if key not in section:
            raise ConfigError(f"missing key '{key}' in [{name}]")
    values = {}
    for key, raw in section.items():
        if key not in schema:
            raise ConfigError(f"unknown key '{key}' in [{name}]")
        try:
            values[key] = schema[key](raw)
        except ValueError:
            raise ConfigError(f"key '{key}' in [{name}] has invalid value {raw!r}") from None
    return values


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    try:
        facility = FacilityParams(**_read_section(parser, "facility", _FACILITY_KEYS))
        epidemic = EpidemicParams(**_read_section(parser, "epidemic", _EPIDEMIC_KEYS))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None

    model = _read_section(parser, "model", {"type": int, "p_cap": float, "alpha": float})
    kind = model.get("type")
    if kind not in (1, 2):
        raise ConfigError("key 'type' in [model] must be 1 or 2")
    key = "p_cap" if kind == 1 else "alpha"
    if key not in model:
        raise ConfigError(f"missing key '{key}' in [model]")
    parameter = model[key]
    if kind == 1 and not 0 <= parameter <= 1:
        raise ConfigError("p_cap must lie in [0, 1]")
    if kind == 2 and parameter <= 0:
        raise ConfigError("alpha must be positive")

    search_keys = {
        "restarts": int, "seed": int, "cooling_rate": float, "max_iterations": int,
        "source_model": str, "risk_horizon": str, "risk_interpolation": str, "prune": str,
    }
    search_values = _read_section(parser, "search", search_keys) if parser.has_section("search") else {}
    try:
        search = SearchConfig(
            restarts=search_values.get("restarts", 5),
            max_iterations=search_values.get("max_iterations"),
            cooling_rate=search_values.get("cooling_rate", 0.9),
            rng_seed=search_values.get("seed", 0),
            prune=search_values.get("prune", "yes").lower() in ("yes", "true", "1", "on"),
            source_model=search_values.get("source_model", "remaining"),
            risk=RiskComposition(
                horizon=search_values.get("risk_horizon", "day"),
                interpolation=search_values.get("risk_interpolation", "fractional"),
            ),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if search.source_model not in SOURCE_MODELS:
        raise ConfigError(f"source_model must be one of {', '.join(SOURCE_MODELS)}")

    output = parser["output"] if parser.has_section("output") else {}
    return RunConfig(
        facility, epidemic, kind, parameter, search,
        csv_path=output.get("csv"), report_path=output.get("report"),
    )


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


def run(config: RunConfig) -> SolveReport:
    if config.model == 1:
        return solve_model1(config.facility, config.epidemic, config.parameter, config.search)
    return solve_model2(config.facility, config.epidemic, config.parameter, config.search)


def fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.4f}"


def fmt_set(values) -> str:
    return "{" + ",".join(str(v) for v in values) + "}"


def write_atomic(path: str, text: str) -> None:
    """Write to a temporary file beside ``path`` and rename it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def to_csv(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


SOLVE_HEADER = ["m", "n", "cap", "max_tau", "max_group", "kappa", "k", "tau", "G", "D", "objective"]


def _strategy_cells(strategy: Optional[TestingStrategy]) -> list[str]:
    if strategy is None:
        return ["", "", "", ""]
    return [str(strategy.k), str(strategy.tau), fmt_set(strategy.group_sizes), fmt_set(strategy.test_days)]


def solve_row(config: RunConfig, report: SolveReport) -> list[str]:
    f, e = config.facility, config.epidemic
    return [
        str(f.m), str(f.n), f"{config.parameter:g}", str(f.max_tau), str(f.max_group), f"{e.kappa:g}",
        *_strategy_cells(report.strategy), fmt(report.objective),
    ]


def describe(config: RunConfig, report: SolveReport) -> str:
    if not report.feasible:
        return NO_STRATEGY + "\n"
    s = report.strategy
    lines = [
        f"groups k          : {s.k}",
        f"interval tau      : {s.tau} days",
        f"group sizes G     : {fmt_set(s.group_sizes)}",
        f"test days D       : {fmt_set(s.test_days)}",
        f"detection time    : {report.expected_detection_time:.4f} days",
        f"staff workload p  : {100 * report.workload:.2f}%",
    ]
    if report.risk is not None:
        lines.append(
            f"risk              : {report.risk.risk:.3g} "
            f"({report.risk.relative_risk:.4f} x background, cap {config.parameter:g})"
        )
    lines.append(f"pairs explored    : {report.pairs_explored} ({report.pairs_pruned} pruned)")
    return "\n".join(lines) + "\n"


def cmd_solve(args) -> int:
    config = load_config(args.config)
    search = config.search
    overrides = {}
    if args.seed is not None:
        overrides["rng_seed"] = args.seed
    if args.source_model is not None:
        overrides["source_model"] = args.source_model
    if overrides:
        search = SearchConfig(**{**search.__dict__, **overrides})
        config = RunConfig(**{**config.__dict__, "search": search})
    report = run(config)
    text = describe(config, report)
    sys.stdout.write(text)
    if args.report or config.report_path:
        write_atomic(args.report or config.report_path, text)
    csv_path = args.out or config.csv_path
    if csv_path:
        write_atomic(csv_path, to_csv(SOLVE_HEADER, [solve_row(config, report)]))
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


REPRODUCE_HEADER = [
    "run", "m", "n", "cap", "max_tau", "max_group", "kappa", "k", "tau", "G", "D",
    "objective", "reference", "diff",
]


def reproduce_row(row: ReferenceRun, table: int, seed: int) -> list[str]:
    config = SearchConfig(rng_seed=seed)
    if table == 1:
        report = solve_model1(row.facility(), row.epidemic(), row.cap, config)
        reference = row.value
    else:
        report = solve_model2(row.facility(), row.epidemic(), row.cap, config)
        reference = None if row.value is None else row.value / 100
    diff = None
    if report.objective is not None and reference is not None:
        diff = report.objective - reference
    return [
        str(row.run), str(row.m), str(row.n), f"{row.cap:g}", str(row.max_tau), str(row.max_group),
        str(row.kappa), *_strategy_cells(report.strategy), fmt(report.objective), fmt(reference), fmt(diff),
    ]


def cmd_reproduce(args) -> int:
    rows = [reproduce_row(row, args.table, args.seed) for row in TABLES[args.table]]
    write_atomic(args.out, to_csv(REPRODUCE_HEADER, rows))
    print(f"wrote {len(rows)} runs to {args.out}")
    return EXIT_OK


def frange(start: float, stop: float, step: float) -> list[float]:
    if step <= 0:
        raise ConfigError("--step must be positive")
    if not start < stop:
        raise ConfigError("--from must be smaller than --to")
    if step > stop - start:
        raise ConfigError("--step is larger than the sweep range")
    count = int(round((stop - start) / step, 9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


SWEEP_HEADER = ["kappa", "axis", "value", "feasible", "objective", "k", "tau", "G", "D"]


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    values = frange(args.start, args.stop, args.step)
    kappas = [float(x) for x in args.kappas.split(",")] if args.kappas else [config.epidemic.kappa]
    rows = []
    series = []
    for kappa in kappas:
        epid = EpidemicParams(
            beta=config.epidemic.beta, kappa=kappa,
            weekly_incidence=config.epidemic.weekly_incidence, visitor_rate=config.epidemic.visitor_rate,
        )
        points = []
        for value in values:
            if args.axis == "p":
                report = solve_model1(config.facility, epid, value, config.search)
            else:
                report = solve_model2(config.facility, epid, value, config.search)
            points.append((value, report.objective))
            rows.append([
                f"{kappa:g}", args.axis, f"{value:.4f}", "1" if report.feasible else "0",
                fmt(report.objective), *_strategy_cells(report.strategy),
            ])
        series.append((kappa, points))
    write_atomic(args.out, to_csv(SWEEP_HEADER, rows))
    if args.plot:
        plot_sweep(series, args.axis, args.plot)
    return EXIT_OK


def plot_sweep(series, axis: str, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "testsched"
    fig, ax = plt.subplots(figsize=(6, 4))
    for kappa, points in series:
        xs = [x for x, y in points if y is not None]
        ys = [y for _, y in points if y is not None]
        if axis == "p":
            xs = [100 * x for x in xs]
        else:
            ys = [100 * y for y in ys]
        ax.step(xs, ys, where="post", label=f"kappa = {kappa:g}")
    if axis == "p":
        ax.set_xlabel("staff workload p (%)")
        ax.set_ylabel("expected detection time (days)")
    else:
        ax.set_xlabel("alpha (risk relative to background)")
        ax.set_ylabel("staff workload p (%)")
    ax.legend()
    fig.tight_layout()
    buffer = io.StringIO()
    fig.savefig(buffer, format="svg", metadata={"Date": None})
    plt.close(fig)
    write_atomic(path, buffer.getvalue())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="testsched", description="Care-home testing schedule optimizer")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one configured instance")
    solve.add_argument("--config", required=True)
    solve.add_argument("--seed", type=int)
    solve.add_argument("--source-model", choices=SOURCE_MODELS)
    solve.add_argument("--out", help="CSV file for the result row")
    solve.add_argument("--report", help="text file for the readable report")
    solve.set_defaults(handler=cmd_solve)

    reproduce = sub.add_parser("reproduce", help="rerun one of the 48-run benchmark grids")
    reproduce.add_argument("--table", type=int, choices=(1, 2), required=True)
    reproduce.add_argument("--out", required=True)
    reproduce.add_argument("--seed", type=int, default=0)
    reproduce.set_defaults(handler=cmd_reproduce)

    sweep = sub.add_parser("sweep", help="trace the optimum along p or alpha")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--axis", choices=("p", "alpha"), required=True)
    sweep.add_argument("--from", dest="start", type=float, required=True)
    sweep.add_argument("--to", dest="stop", type=float, required=True)
    sweep.add_argument("--step", type=float, required=True)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--plot", help="SVG file for the curves")
    sweep.add_argument("--kappas", help="comma-separated contact rates, one curve each")
    sweep.set_defaults(handler=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        code = args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if code == EXIT_INFEASIBLE:
        print(NO_STRATEGY, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
