"""Malmquist total factor productivity index between two periods.

Distances are Farrell input efficiencies (1 on the frontier, below 1 inside
it, above 1 when a period's data lies beyond another period's frontier). With
``d[f][v]`` the CRS distance of data vintage ``v`` against the frontier of
period ``f``::

    tfpch  = sqrt(d[t][t1] / d[t][t] * d[t1][t1] / d[t1][t])
    effch  = d[t1][t1] / d[t][t]
    techch = sqrt(d[t][t1] / d[t1][t1] * d[t][t] / d[t1][t])
    pech   = vrs[t1][t1] / vrs[t][t]
    sech   = effch / pech

so ``tfpch = effch * techch`` and ``effch = pech * sech``. Values above 1
signal productivity growth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .dataset import PanelDataset, balanced_subpanel
from .dea import RtsAssumption, _as_assumption, evaluate_point
from .errors import DomainError, EmptySelectionError
from .lp_core import Tolerances

VRS_CROSS_INFEASIBLE = "vrs-cross-infeasible"
COMPONENTS = ("effch", "techch", "pech", "sech", "tfpch")
GROWTH_TOL = 1e-9


@dataclass(frozen=True)
class CrossDistance:
    dmu_id: str
    evaluated_period: str
    frontier_period: str
    assumption: RtsAssumption
    value: float | None

    @property
    def feasible(self) -> bool:
        return self.value is not None


def cross_distance(dataset: PanelDataset, dmu_id: str, data_period: str,
                   frontier_period: str, assumption: RtsAssumption | str = RtsAssumption.CRS,
                   tol: Tolerances | None = None) -> CrossDistance:
    """Distance of a DMU's ``data_period`` observation to ``frontier_period``'s technology.

    An infeasible LP (possible under VRS across periods) is reported through
    ``feasible``/``value=None`` rather than raised.
    """
    assumption = _as_assumption(assumption)
    record = dataset.get(dmu_id, data_period)
    ids, X, Y = dataset.matrices(frontier_period)
    self_index = ids.index(dmu_id) if data_period == frontier_period else None
    ev = evaluate_point(record.inputs, record.outputs, X, Y, assumption, slacks=False,
                        self_index=self_index, tol=tol)
    return CrossDistance(dmu_id, data_period, frontier_period, assumption, ev.theta)


@dataclass(frozen=True)
class MalmquistResult:
    dmu_id: str
    period_pair: tuple[str, str]
    effch: float
    techch: float
    pech: float | None
    sech: float | None
    tfpch: float
    distances: dict[str, float | None] = field(default_factory=dict, compare=False)
    diagnostics: frozenset[str] = frozenset()

    def component(self, name: str) -> float | None:
        return getattr(self, name)


def _positive(value: float | None, what: str, dmu_id: str) -> float:
    if value is None or not value > 0:
        raise DomainError(
            f"{what} for dmu {dmu_id!r} is {value!r}; the index needs positive distances "
            "(check for all-zero outputs)"
        )
    return value


def malmquist_index(dataset: PanelDataset, dmu_id: str, t: str, t_plus_1: str,
                    tol: Tolerances | None = None,
                    cache: dict | None = None) -> MalmquistResult:
    """Malmquist index and decomposition for one DMU from ``t`` to ``t_plus_1``.

    ``cache`` may be shared across calls on the same dataset to avoid
    re-solving distances common to adjacent period pairs.
    """
    crs, vrs = RtsAssumption.CRS, RtsAssumption.VRS
    cache = {} if cache is None else cache
    dist: dict[str, float | None] = {}
    for assumption in (crs, vrs):
        for frontier in (t, t_plus_1):
            for data in (t, t_plus_1):
                key = f"{assumption.value}:{frontier}<-{data}"
                if (dmu_id, key) not in cache:
                    cache[dmu_id, key] = cross_distance(dataset, dmu_id, data, frontier,
                                                        assumption, tol).value
                dist[key] = cache[dmu_id, key]

    def d(a, f, v):
        return dist[f"{a.value}:{f}<-{v}"]

    d_tt = _positive(d(crs, t, t), f"CRS distance {t}<-{t}", dmu_id)
    d_t_t1 = _positive(d(crs, t, t_plus_1), f"CRS distance {t}<-{t_plus_1}", dmu_id)
    d_t1_t = _positive(d(crs, t_plus_1, t), f"CRS distance {t_plus_1}<-{t}", dmu_id)
    d_t1t1 = _positive(d(crs, t_plus_1, t_plus_1), f"CRS distance {t_plus_1}<-{t_plus_1}", dmu_id)

    tfpch = math.sqrt((d_t_t1 / d_tt) * (d_t1t1 / d_t1_t))
    effch = d_t1t1 / d_tt
    techch = math.sqrt((d_t_t1 / d_t1t1) * (d_tt / d_t1_t))

    diagnostics = set()
    if d(vrs, t, t_plus_1) is None or d(vrs, t_plus_1, t) is None:
        diagnostics.add(VRS_CROSS_INFEASIBLE)
    v_tt, v_t1t1 = d(vrs, t, t), d(vrs, t_plus_1, t_plus_1)
    if v_tt and v_t1t1:
        pech = v_t1t1 / v_tt
        sech = effch / pech
    else:
        pech = sech = None
        diagnostics.add("vrs-undefined")
    return MalmquistResult(dmu_id, (t, t_plus_1), effch, techch, pech, sech, tfpch,
                           dist, frozenset(diagnostics))


def _geomean(values: list[float]) -> float | None:
    if not values:
        return None
    return math.exp(math.fsum(math.log(v) for v in values) / len(values))


def _mean(values: list[float]) -> float | None:
    return math.fsum(values) / len(values) if values else None


@dataclass(frozen=True)
class PairAggregate:
    """Summary of one period pair across DMUs.

    Geometric means are the primary average (indices are multiplicative);
    arithmetic means are kept for comparison with reports that average
    directly. ``n_growth`` counts DMUs with tfpch strictly above 1.
    """

    period_pair: tuple[str, str]
    n_dmus: int
    geometric_mean: dict[str, float | None]
    arithmetic_mean: dict[str, float | None]
    n_growth: int
    percent_growth: float
    min_tfpch: tuple[str, float]
    max_tfpch: tuple[str, float]


def aggregate_pair(results: list[MalmquistResult]) -> PairAggregate:
    if not results:
        raise EmptySelectionError("no Malmquist results to aggregate")
    geo, arith = {}, {}
    for name in COMPONENTS:
        values = [r.component(name) for r in results if r.component(name) is not None]
        geo[name] = _geomean(values)
        arith[name] = _mean(values)
    n_growth = sum(r.tfpch > 1 + GROWTH_TOL for r in results)
    lo = min(results, key=lambda r: r.tfpch)
    hi = max(results, key=lambda r: r.tfpch)
    return PairAggregate(
        period_pair=results[0].period_pair,
        n_dmus=len(results),
        geometric_mean=geo,
        arithmetic_mean=arith,
        n_growth=n_growth,
        percent_growth=100.0 * n_growth / len(results),
        min_tfpch=(lo.dmu_id, lo.tfpch),
        max_tfpch=(hi.dmu_id, hi.tfpch),
    )


@dataclass(frozen=True)
class MalmquistPanel:
    results: tuple[MalmquistResult, ...]
    aggregates: tuple[PairAggregate, ...]
    skipped_dmus: tuple[str, ...] = ()

    def for_pair(self, pair: tuple[str, str]) -> list[MalmquistResult]:
        return [r for r in self.results if r.period_pair == tuple(pair)]


def malmquist_panel(dataset: PanelDataset, periods: list[str] | None = None,
                    tol: Tolerances | None = None) -> MalmquistPanel:
    """Indices for every DMU and every adjacent pair of ``periods``.

    DMUs missing from any of the periods are dropped (and listed in
    ``skipped_dmus``); frontiers are built from the remaining balanced panel.
    """
    periods = list(dataset.periods if periods is None else periods)
    if len(periods) < 2:
        raise EmptySelectionError("the Malmquist index needs at least two periods")
    panel, skipped = balanced_subpanel(dataset, periods)
    results, aggregates, cache = [], [], {}
    for t, t1 in zip(periods, periods[1:]):
        pair = [malmquist_index(panel, dmu, t, t1, tol, cache) for dmu in panel.dmu_ids(t)]
        results.extend(pair)
        aggregates.append(aggregate_pair(pair))
    return MalmquistPanel(tuple(results), tuple(aggregates), tuple(skipped))

