"""Peers and projection targets for inefficient DMUs."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .dataset import PanelDataset
from .dea import (
    RtsAssumption,
    RtsClass,
    ScaleResult,
    _as_assumption,
    efficiency_table,
    radial_efficiency,
    scale_analysis,
    scale_table,
)
from .lp_core import Tolerances


@dataclass(frozen=True)
class PeerEntry:
    peer_dmu_id: str
    lambda_weight: float


@dataclass(frozen=True)
class ProjectionRow:
    variable_name: str
    kind: str  # "input" or "output"
    original_value: float
    radial_movement: float
    slack: float
    projected_value: float


@dataclass(frozen=True)
class ProjectionSummary:
    dmu_id: str
    period: str
    assumption: RtsAssumption
    theta: float
    scale_efficiency: float
    rts_class: RtsClass
    rows: tuple[ProjectionRow, ...]
    peers: tuple[PeerEntry, ...]

    def projected(self, kind: str) -> np.ndarray:
        return np.array([r.projected_value for r in self.rows if r.kind == kind])

    @property
    def projected_inputs(self) -> np.ndarray:
        return self.projected("input")

    @property
    def projected_outputs(self) -> np.ndarray:
        return self.projected("output")


def project(dataset: PanelDataset, dmu_id: str, period: str,
            assumption: RtsAssumption | str = RtsAssumption.VRS,
            tol: Tolerances | None = None,
            scale: ScaleResult | None = None) -> ProjectionSummary:
    """Projection of a DMU onto the efficient frontier with its peers.

    Inputs move radially by ``(theta - 1) * x`` and then by their slack;
    outputs only by their slack. Peers are the positive weights of the
    slack-maximal intensity vector, heaviest first. A precomputed ``scale``
    result for the same DMU and period saves the radial solves.
    """
    assumption = _as_assumption(assumption)
    if scale is None:
        scale = scale_analysis(dataset, dmu_id, period, tol)
    known = {RtsAssumption.CRS: scale.theta_crs, RtsAssumption.VRS: scale.theta_vrs,
             RtsAssumption.NIRS: scale.theta_nirs}[assumption]
    result = radial_efficiency(dataset, dmu_id, period, assumption, tol, theta=known)
    record = dataset.get(dmu_id, period)
    theta = result.theta
    rows = []
    for name, x, s in zip(dataset.input_names, record.inputs, result.input_slacks):
        radial = (theta - 1.0) * x
        rows.append(ProjectionRow(name, "input", x, radial, s, x + radial - s))
    for name, y, s in zip(dataset.output_names, record.outputs, result.output_slacks):
        rows.append(ProjectionRow(name, "output", y, 0.0, s, y + s))
    peers = tuple(PeerEntry(pid, w) for pid, w in result.peers)
    return ProjectionSummary(dmu_id, period, assumption, theta, scale.scale_efficiency,
                             scale.rts_class, tuple(rows), peers)


def project_period(dataset: PanelDataset, period: str,
                   assumption: RtsAssumption | str = RtsAssumption.VRS,
                   tol: Tolerances | None = None,
                   scales: list[ScaleResult] | None = None) -> list[ProjectionSummary]:
    if scales is None:
        scales = scale_table(dataset, period, tol)
    return [project(dataset, s.dmu_id, period, assumption, tol, s) for s in scales]


@dataclass(frozen=True)
class PeerFrequency:
    """How often each DMU serves as a peer to another DMU in one period.

    A DMU counts as inefficient when any of its peers is a DMU other than
    itself (this includes radially efficient DMUs with remaining slack).
    """

    period: str
    assumption: RtsAssumption
    counts: dict[str, int]
    n_dmus: int
    n_inefficient: int

    @property
    def percent_inefficient(self) -> float:
        return 100.0 * self.n_inefficient / self.n_dmus


def peer_frequency(dataset: PanelDataset, period: str,
                   assumption: RtsAssumption | str = RtsAssumption.VRS,
                   tol: Tolerances | None = None) -> PeerFrequency:
    assumption = _as_assumption(assumption)
    table = efficiency_table(dataset, period, assumption, tol)
    counts: Counter[str] = Counter()
    inefficient = 0
    for res in table:
        others = [pid for pid in res.lambdas if pid != res.dmu_id]
        if others:
            inefficient += 1
            counts.update(others)
    order = {dmu: i for i, dmu in enumerate(dataset.dmu_ids(period))}
    ranked = dict(sorted(counts.items(), key=lambda kv: (-kv[1], order[kv[0]])))
    return PeerFrequency(period, assumption, ranked, len(table), inefficient)
