"""Text, CSV and JSON renderings of analysis results.

Text reports round scores and indices to three decimals; CSV and JSON carry
full double precision (``repr`` of the float). Undefined values are empty
cells in CSV and ``null`` in JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .benchmarking import ProjectionSummary
from .dataset import STD_CONVENTION, PanelDataset, VariableStats
from .dea import EFFICIENT_TOL, EfficiencyTable, ScaleResult, scale_table
from .lp_core import Tolerances
from .malmquist import COMPONENTS, MalmquistPanel, MalmquistResult, PairAggregate, malmquist_panel

SCHEMA_VERSION = "1.0"
DECIMALS = 3


def fmt(value: float | None, decimals: int = DECIMALS) -> str:
    """Fixed-point display value; never shows a negative zero."""
    if value is None:
        return "#N/A"
    text = f"{value:.{decimals}f}"
    if float(text) == 0.0:
        text = f"{0.0:.{decimals}f}"
    return text


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def dump_json(payload: dict) -> str:
    body = {"schema_version": SCHEMA_VERSION, **payload}
    return json.dumps(body, indent=2, allow_nan=False) + "\n"


# -- projection -------------------------------------------------------------

def render_projection_text(summary: ProjectionSummary) -> str:
    """Fixed-width projection summary: header, variable table, peer list."""
    lines = [
        f"Projection Summary, Results for DMU: {summary.dmu_id} "
        f"(period {summary.period}, {summary.assumption.value.upper()})",
        f"Technical efficiency = {fmt(summary.theta)}, "
        f"Scale efficiency = {fmt(summary.scale_efficiency)} ({summary.rts_class.value})",
        "",
        f"{'Variable':<24}{'Original value':>16}{'Radial movement':>17}{'Slack':>12}{'Projected value':>17}",
    ]
    # outputs first, the usual DEA listing order
    ordered = [r for r in summary.rows if r.kind == "output"] + [r for r in summary.rows if r.kind == "input"]
    counters = {"input": 0, "output": 0}
    for row in ordered:
        counters[row.kind] += 1
        label = f"{row.kind.capitalize()} {counters[row.kind]} ({row.variable_name})"
        lines.append(f"{label:<24}{fmt(row.original_value):>16}{fmt(row.radial_movement):>17}"
                     f"{fmt(row.slack):>12}{fmt(row.projected_value):>17}")
    lines += ["", f"{'Listing of peers:':<24}{'Peer weight':>16}"]
    for peer in summary.peers:
        lines.append(f"{peer.peer_dmu_id:<24}{fmt(peer.lambda_weight):>16}")
    return "\n".join(lines) + "\n"


def projection_to_dict(summary: ProjectionSummary) -> dict:
    return {
        "dmu": summary.dmu_id,
        "period": summary.period,
        "assumption": summary.assumption.value,
        "theta": summary.theta,
        "scale_efficiency": summary.scale_efficiency,
        "rts_class": summary.rts_class.value,
        "rows": [
            {
                "variable": r.variable_name,
                "kind": r.kind,
                "original_value": r.original_value,
                "radial_movement": r.radial_movement,
                "slack": r.slack,
                "projected_value": r.projected_value,
            }
            for r in summary.rows
        ],
        "peers": [{"dmu": p.peer_dmu_id, "weight": p.lambda_weight} for p in summary.peers],
    }


PROJECTION_CSV_HEADER = ("period", "dmu", "assumption", "theta", "scale_efficiency", "rts_class",
                         "record", "name", "kind", "original_value", "radial_movement", "slack",
                         "projected_value", "peer_weight")


def projections_csv(summaries: Sequence[ProjectionSummary]) -> str:
    rows = []
    for s in summaries:
        head = [s.period, s.dmu_id, s.assumption.value, s.theta, s.scale_efficiency, s.rts_class.value]
        for r in s.rows:
            rows.append(head + ["variable", r.variable_name, r.kind, r.original_value,
                                r.radial_movement, r.slack, r.projected_value, None])
        for p in s.peers:
            rows.append(head + ["peer", p.peer_dmu_id, None, None, None, None, None, p.lambda_weight])
    return _write_csv(PROJECTION_CSV_HEADER, rows)


# -- efficiency -------------------------------------------------------------

@dataclass(frozen=True)
class EfficiencyAggregateRow:
    period: str
    n_dmus: int
    mean_theta_crs: float
    mean_theta_vrs: float
    mean_scale_eff: float
    percent_efficient_crs: float
    percent_efficient_vrs: float


EFFICIENCY_AGGREGATE_HEADER = ("period", "n_dmus", "mean_theta_crs", "mean_theta_vrs",
                               "mean_scale_eff", "percent_efficient_crs", "percent_efficient_vrs")


def efficiency_aggregate(period: str, scales: Sequence[ScaleResult]) -> EfficiencyAggregateRow:
    n = len(scales)
    return EfficiencyAggregateRow(
        period=period,
        n_dmus=n,
        mean_theta_crs=math.fsum(s.theta_crs for s in scales) / n,
        mean_theta_vrs=math.fsum(s.theta_vrs for s in scales) / n,
        mean_scale_eff=math.fsum(s.scale_efficiency for s in scales) / n,
        percent_efficient_crs=100.0 * sum(s.theta_crs >= 1 - EFFICIENT_TOL for s in scales) / n,
        percent_efficient_vrs=100.0 * sum(s.theta_vrs >= 1 - EFFICIENT_TOL for s in scales) / n,
    )


def efficiency_aggregates_csv(rows: Sequence[EfficiencyAggregateRow]) -> str:
    return _write_csv(EFFICIENCY_AGGREGATE_HEADER,
                      ([getattr(r, f) for f in EFFICIENCY_AGGREGATE_HEADER] for r in rows))


def scale_to_dict(s: ScaleResult) -> dict:
    return {"dmu": s.dmu_id, "period": s.period, "theta_crs": s.theta_crs, "theta_vrs": s.theta_vrs,
            "theta_nirs": s.theta_nirs, "scale_efficiency": s.scale_efficiency,
            "rts_class": s.rts_class.value}


def render_scale_text(period: str, scales: Sequence[ScaleResult]) -> str:
    agg = efficiency_aggregate(period, scales)
    lines = [f"Efficiency summary, period {period} (input orientation)",
             f"{'DMU':<16}{'CRS TE':>10}{'VRS TE':>10}{'Scale':>10}  RTS"]
    for s in scales:
        lines.append(f"{s.dmu_id:<16}{fmt(s.theta_crs):>10}{fmt(s.theta_vrs):>10}"
                     f"{fmt(s.scale_efficiency):>10}  {s.rts_class.value}")
    lines.append(f"{'Mean':<16}{fmt(agg.mean_theta_crs):>10}{fmt(agg.mean_theta_vrs):>10}"
                 f"{fmt(agg.mean_scale_eff):>10}")
    lines.append(f"Efficient DMUs: CRS {fmt(agg.percent_efficient_crs, 1)}%, "
                 f"VRS {fmt(agg.percent_efficient_vrs, 1)}% of {agg.n_dmus}")
    return "\n".join(lines) + "\n"


def _peer_text(lambdas: dict[str, float]) -> str:
    return " ".join(f"{pid}({fmt(w)})" for pid, w in sorted(lambdas.items(), key=lambda kv: -kv[1]))


def render_table_text(table: EfficiencyTable) -> str:
    lines = [f"Efficiency summary, period {table.period} "
             f"({table.assumption.value.upper()}, input orientation)",
             f"{'DMU':<16}{'TE':>10}  Peers"]
    for r in table:
        lines.append(f"{r.dmu_id:<16}{fmt(r.theta):>10}  {_peer_text(r.lambdas)}")
    lines.append(f"{'Mean':<16}{fmt(table.mean_theta):>10}")
    lines.append(f"Efficient DMUs: {table.n_efficient} of {len(table)} "
                 f"({fmt(table.percent_efficient, 1)}%)")
    return "\n".join(lines) + "\n"


def table_to_dict(table: EfficiencyTable) -> dict:
    return {
        "period": table.period,
        "assumption": table.assumption.value,
        "mean_theta": table.mean_theta,
        "n_efficient": table.n_efficient,
        "percent_efficient": table.percent_efficient,
        "results": [
            {"dmu": r.dmu_id, "theta": r.theta, "lambdas": r.lambdas,
             "input_slacks": list(r.input_slacks), "output_slacks": list(r.output_slacks)}
            for r in table
        ],
    }


SCALE_CSV_HEADER = ("period", "dmu", "theta_crs", "theta_vrs", "theta_nirs", "scale_efficiency", "rts_class")
TABLE_CSV_HEADER = ("period", "dmu", "assumption", "theta", "efficient", "peers")


def scales_csv(scales: Sequence[ScaleResult]) -> str:
    return _write_csv(SCALE_CSV_HEADER, ([s.period, s.dmu_id, s.theta_crs, s.theta_vrs, s.theta_nirs,
                                          s.scale_efficiency, s.rts_class.value] for s in scales))


def tables_csv(tables: Sequence[EfficiencyTable]) -> str:
    rows = []
    for t in tables:
        for r in t:
            peers = ";".join(f"{pid}:{w!r}" for pid, w in r.lambdas.items())
            rows.append([t.period, r.dmu_id, t.assumption.value, r.theta, int(r.is_efficient), peers])
    return _write_csv(TABLE_CSV_HEADER, rows)


# -- Malmquist --------------------------------------------------------------

def malmquist_to_dict(r: MalmquistResult) -> dict:
    out = {"dmu": r.dmu_id}
    out.update({c: r.component(c) for c in COMPONENTS})
    out["diagnostics"] = sorted(r.diagnostics)
    out["distances"] = dict(r.distances)
    return out


def pair_aggregate_to_dict(a: PairAggregate) -> dict:
    return {
        "period_pair": list(a.period_pair),
        "n_dmus": a.n_dmus,
        "geometric_mean": a.geometric_mean,
        "arithmetic_mean": a.arithmetic_mean,
        "n_tfpch_gt_1": a.n_growth,
        "percent_tfpch_gt_1": a.percent_growth,
        "min_tfpch": {"dmu": a.min_tfpch[0], "value": a.min_tfpch[1]},
        "max_tfpch": {"dmu": a.max_tfpch[0], "value": a.max_tfpch[1]},
    }


MALMQUIST_CSV_HEADER = ("period_from", "period_to", "dmu") + COMPONENTS + ("diagnostics",)
MALMQUIST_AGGREGATE_HEADER = (
    ("period_from", "period_to", "n_dmus")
    + tuple(f"geo_{c}" for c in COMPONENTS)
    + tuple(f"arith_{c}" for c in COMPONENTS)
    + ("n_tfpch_gt_1", "percent_tfpch_gt_1", "min_dmu", "min_tfpch", "max_dmu", "max_tfpch")
)


def malmquist_csv(panel: MalmquistPanel) -> str:
    return _write_csv(MALMQUIST_CSV_HEADER, (
        [*r.period_pair, r.dmu_id, *(r.component(c) for c in COMPONENTS), ";".join(sorted(r.diagnostics))]
        for r in panel.results))


def malmquist_aggregates_csv(aggregates: Sequence[PairAggregate]) -> str:
    return _write_csv(MALMQUIST_AGGREGATE_HEADER, (
        [*a.period_pair, a.n_dmus,
         *(a.geometric_mean[c] for c in COMPONENTS),
         *(a.arithmetic_mean[c] for c in COMPONENTS),
         a.n_growth, a.percent_growth, a.min_tfpch[0], a.min_tfpch[1], a.max_tfpch[0], a.max_tfpch[1]]
        for a in aggregates))


def render_malmquist_text(panel: MalmquistPanel) -> str:
    blocks = []
    for agg in panel.aggregates:
        t, t1 = agg.period_pair
        lines = [f"Malmquist index summary, {t} -> {t1}",
                 f"{'DMU':<16}" + "".join(f"{c:>10}" for c in COMPONENTS)]
        for r in panel.for_pair(agg.period_pair):
            flag = "  *" if r.diagnostics else ""
            lines.append(f"{r.dmu_id:<16}" + "".join(f"{fmt(r.component(c)):>10}" for c in COMPONENTS) + flag)
        lines.append(f"{'Geometric mean':<16}" + "".join(f"{fmt(agg.geometric_mean[c]):>10}" for c in COMPONENTS))
        lines.append(f"{'Arithmetic mean':<16}" + "".join(f"{fmt(agg.arithmetic_mean[c]):>10}" for c in COMPONENTS))
        lines.append(f"tfpch > 1: {agg.n_growth} of {agg.n_dmus} ({fmt(agg.percent_growth, 1)}%); "
                     f"lowest {agg.min_tfpch[0]} ({fmt(agg.min_tfpch[1])}), "
                     f"highest {agg.max_tfpch[0]} ({fmt(agg.max_tfpch[1])})")
        blocks.append("\n".join(lines))
    text = "\n\n".join(blocks) + "\n"
    if any(r.diagnostics for r in panel.results):
        text += "* diagnostics attached (see JSON output)\n"
    if panel.skipped_dmus:
        text += f"Skipped (not observed in every period): {', '.join(panel.skipped_dmus)}\n"
    return text


# -- descriptive statistics -------------------------------------------------

STATS_ROWS = (("Mode", "mode"), ("Median", "median"), ("Standard Deviation", "standard_deviation"),
              ("Maximum", "maximum"), ("Minimum", "minimum"), ("Mean", "mean"),
              ("Coefficient of Variation", "coefficient_of_variation"))


def render_stats_text(stats: Sequence[VariableStats], period: str | None) -> str:
    scope = f"period {period}" if period is not None else "all periods"
    width = max(12, *(len(s.variable_name) + 2 for s in stats))
    lines = [f"Descriptive statistics, {scope} (std: {STD_CONVENTION})",
             f"{'':<26}" + "".join(f"{s.variable_name:>{width}}" for s in stats)]
    for label, attr in STATS_ROWS:
        lines.append(f"{label:<26}" + "".join(f"{fmt(getattr(s, attr)):>{width}}" for s in stats))
    lines.append(f"{'Observations':<26}" + "".join(f"{s.count:>{width}}" for s in stats))
    return "\n".join(lines) + "\n"


STATS_CSV_HEADER = ("variable", "kind", "count", "mean", "median", "mode", "standard_deviation",
                    "minimum", "maximum", "coefficient_of_variation")


def stats_to_dict(s: VariableStats) -> dict:
    return {f: getattr(s, "variable_name" if f == "variable" else f) for f in STATS_CSV_HEADER}


def stats_csv(stats: Sequence[VariableStats]) -> str:
    return _write_csv(STATS_CSV_HEADER, (list(stats_to_dict(s).values()) for s in stats))


# -- aggregate tables -------------------------------------------------------

@dataclass(frozen=True)
class AggregateTable:
    efficiency: tuple[EfficiencyAggregateRow, ...]
    malmquist: tuple[PairAggregate, ...]


def emit_aggregates(dataset: PanelDataset, periods: Sequence[str] | None = None,
                    tol: Tolerances | None = None, malmquist: MalmquistPanel | None = None
                    ) -> AggregateTable:
    """Per-period efficiency means and per-pair Malmquist summaries.

    Malmquist rows are empty when fewer than two periods are selected.
    """
    periods = list(dataset.periods if periods is None else periods)
    eff = tuple(efficiency_aggregate(p, scale_table(dataset, p, tol)) for p in periods)
    if malmquist is None and len(periods) >= 2:
        malmquist = malmquist_panel(dataset, periods, tol)
    return AggregateTable(eff, malmquist.aggregates if malmquist is not None else ())

