"""``frontier-bench`` command-line interface."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import report
from .benchmarking import project, project_period
from .dataset import PanelDataset, STD_CONVENTION, descriptive_stats, parse_panel_csv
from .dea import efficiency_table, scale_table
from .errors import FrontierBenchError, LookupFailure, ParseError, SolverInvariantError
from .lp_core import Tolerances
from .malmquist import malmquist_panel

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3

COMMANDS = ("efficiency", "malmquist", "project", "stats")
FORMATS = ("text", "csv", "json")

EPILOG = """\
exit codes:
  0  success
  1  usage error (unknown command or flag, flag not valid for the command)
  2  input error (file not found, CSV parse/validation failure, unknown DMU or
     period, empty selection, model domain violation)
  3  solver invariant violation (an LP that must be solvable was not)

environment:
  FRONTIER_BENCH_TOL_FEAS  phase-1 feasibility tolerance (default 1e-7);
                           --tol-feas takes precedence
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    input_path: Path
    command: str
    assumption: str | None = None
    period: str | None = None
    dmu: str | None = None
    output_format: str = "text"
    output_path: Path | None = None
    aggregates_path: Path | None = None
    tol_feas: float | None = None
    period_order: tuple[str, ...] | None = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.output_format not in FORMATS:
            raise UsageError(f"unknown format {self.output_format!r}")
        if self.dmu is not None and self.command != "project":
            raise UsageError("--dmu is only valid for 'project'")
        if self.assumption is not None:
            if self.command in ("stats", "malmquist"):
                raise UsageError(f"--rts is not valid for {self.command!r}")
            allowed = ("crs", "vrs", "nirs", "both") if self.command == "efficiency" else ("crs", "vrs", "nirs")
            if self.assumption not in allowed:
                raise UsageError(f"--rts for {self.command!r} must be one of {', '.join(allowed)}")
        if self.period is not None and self.command == "malmquist":
            raise UsageError("--period is not valid for 'malmquist' (use --period-order)")
        if self.aggregates_path is not None and self.command not in ("efficiency", "malmquist"):
            raise UsageError("--aggregates is only valid for 'efficiency' and 'malmquist'")
        if self.tol_feas is not None and not self.tol_feas > 0:
            raise UsageError("--tol-feas must be positive")

    def tolerances(self) -> Tolerances:
        if self.tol_feas is not None:
            return Tolerances(feas=self.tol_feas)
        return Tolerances.from_env()


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="frontier-bench",
        description="Input-oriented DEA efficiency, scale efficiency, Malmquist productivity "
                    "and peer projections for panel CSV data.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", required=True, type=Path, help="panel CSV (dmu,period,in:...,out:...)")
    parser.add_argument("--rts", choices=("crs", "vrs", "nirs", "both"),
                        help="returns-to-scale assumption (efficiency: default both; project: default vrs)")
    parser.add_argument("--period", help="restrict to one period label")
    parser.add_argument("--dmu", help="DMU id (project only; default: every DMU)")
    parser.add_argument("--format", choices=FORMATS, default="text", dest="output_format")
    parser.add_argument("--output", type=Path, help="write to this file instead of standard output")
    parser.add_argument("--aggregates", type=Path, help="also write plot-ready aggregate CSV here")
    parser.add_argument("--period-order", help="comma-separated period labels overriding file order")
    parser.add_argument("--tol-feas", type=float, help="LP feasibility tolerance")
    return parser


def _periods(dataset: PanelDataset, config: RunConfig) -> list[str]:
    if config.period is None:
        return list(dataset.periods)
    dataset.period_records(config.period)  # raises on unknown period
    return [config.period]


def _efficiency(dataset: PanelDataset, config: RunConfig, tol: Tolerances) -> tuple[str, str | None]:
    periods = _periods(dataset, config)
    rts = config.assumption or "both"
    fmt = config.output_format
    aggregates = None
    if rts == "both":
        scales = {p: scale_table(dataset, p, tol) for p in periods}
        aggregates = [report.efficiency_aggregate(p, s) for p, s in scales.items()]
        if fmt == "text":
            body = "\n".join(report.render_scale_text(p, s) for p, s in scales.items())
        elif fmt == "csv":
            body = report.scales_csv([r for s in scales.values() for r in s])
        else:
            body = report.dump_json({
                "command": "efficiency",
                "assumption": "both",
                "periods": [{"period": p, "results": [report.scale_to_dict(r) for r in s]}
                            for p, s in scales.items()],
                "aggregates": [vars(a) for a in aggregates],
            })
    else:
        tables = [efficiency_table(dataset, p, rts, tol) for p in periods]
        if fmt == "text":
            body = "\n".join(report.render_table_text(t) for t in tables)
        elif fmt == "csv":
            body = report.tables_csv(tables)
        else:
            body = report.dump_json({"command": "efficiency", "assumption": rts,
                                     "periods": [report.table_to_dict(t) for t in tables]})
    extra = None
    if config.aggregates_path is not None:
        if aggregates is None:
            aggregates = [report.efficiency_aggregate(p, scale_table(dataset, p, tol)) for p in periods]
        extra = report.efficiency_aggregates_csv(aggregates)
    return body, extra


def _malmquist(dataset: PanelDataset, config: RunConfig, tol: Tolerances) -> tuple[str, str | None]:
    panel = malmquist_panel(dataset, None, tol)
    if config.output_format == "text":
        body = report.render_malmquist_text(panel)
    elif config.output_format == "csv":
        body = report.malmquist_csv(panel)
    else:
        body = report.dump_json({
            "command": "malmquist",
            "pairs": [{"period_pair": list(a.period_pair),
                       "results": [report.malmquist_to_dict(r) for r in panel.for_pair(a.period_pair)],
                       "aggregate": report.pair_aggregate_to_dict(a)} for a in panel.aggregates],
            "skipped_dmus": list(panel.skipped_dmus),
        })
    extra = report.malmquist_aggregates_csv(panel.aggregates) if config.aggregates_path else None
    return body, extra


def _project(dataset: PanelDataset, config: RunConfig, tol: Tolerances) -> tuple[str, None]:
    rts = config.assumption or "vrs"
    periods = _periods(dataset, config)
    if config.dmu is not None:
        summaries = [project(dataset, config.dmu, p, rts, tol) for p in periods
                     if config.period is not None or dataset.has(config.dmu, p)]
        if not summaries:
            raise LookupFailure(f"dmu {config.dmu!r} does not appear in any period")
    else:
        summaries = [s for p in periods for s in project_period(dataset, p, rts, tol)]
    if config.output_format == "text":
        body = "\n".join(report.render_projection_text(s) for s in summaries)
    elif config.output_format == "csv":
        body = report.projections_csv(summaries)
    else:
        body = report.dump_json({"command": "project", "assumption": rts,
                                 "projections": [report.projection_to_dict(s) for s in summaries]})
    return body, None


def _stats(dataset: PanelDataset, config: RunConfig, tol: Tolerances) -> tuple[str, None]:
    stats = descriptive_stats(dataset, config.period)
    if config.output_format == "text":
        body = report.render_stats_text(stats, config.period)
    elif config.output_format == "csv":
        body = report.stats_csv(stats)
    else:
        body = report.dump_json({"command": "stats", "period": config.period,
                                 "std_convention": STD_CONVENTION,
                                 "variables": [report.stats_to_dict(s) for s in stats]})
    return body, None


HANDLERS = {"efficiency": _efficiency, "malmquist": _malmquist, "project": _project, "stats": _stats}


def _write(text: str, path: Path | None, stdout) -> None:
    if path is None:
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _report_error(kind: str, message: str, config: RunConfig | None, stderr, **location) -> None:
    if config is not None and config.output_format == "json":
        payload = {"schema_version": report.SCHEMA_VERSION, "error": {"kind": kind, "message": message}}
        payload["error"].update({k: v for k, v in location.items() if v is not None})
        stderr.write(json.dumps(payload) + "\n")
        return
    where = "".join(f" {k} {v}" for k, v in location.items() if v is not None)
    stderr.write(f"frontier-bench: {kind} error{(' at' + where) if where else ''}: {message}\n")


def run(config: RunConfig, stdout=None, stderr=None) -> int:
    """Execute one command; returns the process exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        config.validate()
    except UsageError as exc:
        stderr.write(f"frontier-bench: usage error: {exc}\n")
        return EXIT_USAGE
    try:
        tol = config.tolerances()
        try:
            raw = config.input_path.read_bytes()
        except FileNotFoundError:
            _report_error("file-not-found", f"no such file: {config.input_path}", config, stderr)
            return EXIT_INPUT
        except OSError as exc:
            _report_error("io", str(exc), config, stderr)
            return EXIT_INPUT
        dataset = parse_panel_csv(raw, config.period_order)
        body, extra = HANDLERS[config.command](dataset, config, tol)
    except SolverInvariantError as exc:
        _report_error(exc.kind, str(exc), config, stderr)
        return EXIT_SOLVER
    except ParseError as exc:
        _report_error(exc.kind, exc.message, config, stderr, line=exc.line, column=exc.column)
        return EXIT_INPUT
    except FrontierBenchError as exc:
        _report_error(exc.kind, str(exc), config, stderr)
        return EXIT_INPUT
    _write(body, config.output_path, stdout)
    if extra is not None:
        _write(extra, config.aggregates_path, stdout)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    order = None
    if args.period_order:
        order = tuple(p.strip() for p in args.period_order.split(",") if p.strip())
    config = RunConfig(
        input_path=args.input,
        command=args.command,
        assumption=args.rts,
        period=args.period,
        dmu=args.dmu,
        output_format=args.output_format,
        output_path=args.output,
        aggregates_path=args.aggregates,
        tol_feas=args.tol_feas,
        period_order=order,
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
