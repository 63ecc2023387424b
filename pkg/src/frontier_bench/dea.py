"""Input-oriented DEA envelopment models (CRS, VRS, NIRS).

Each evaluation is two LPs. The radial stage finds the smallest ``theta``
such that some intensity vector ``lam >= 0`` satisfies::

    X.T @ lam <= theta * x0      (every input)
    Y.T @ lam >= y0              (every output)
    sum(lam) == 1                (VRS)   or   sum(lam) <= 1   (NIRS)

The slack stage holds ``theta`` fixed and maximises the total input and
output slack, which yields the intensity vector used for peers and targets.

Rows and slack variables are scaled by each variable's largest magnitude in
the reference set (and evaluated point), so the LPs, and therefore every
score, peer set and slack, are invariant to the units a column is recorded in.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dataset import PanelDataset
from .errors import DomainError, EmptySelectionError, SolverInvariantError
from .lp_core import LinearProgram, Relation, Sense, Status, Tolerances, solve

EFFICIENT_TOL = 1e-6


class Orientation(str, Enum):
    INPUT = "input"


class RtsAssumption(str, Enum):
    CRS = "crs"
    VRS = "vrs"
    NIRS = "nirs"


class RtsClass(str, Enum):
    CRS = "CRS"
    DRS = "DRS"
    IRS = "IRS"
    NOT_CLASSIFIED = "not-classified"


def _as_assumption(value) -> RtsAssumption:
    return value if isinstance(value, RtsAssumption) else RtsAssumption(str(value).lower())


@dataclass(frozen=True, eq=False)
class PointEvaluation:
    """Raw result of evaluating one (x, y) point against a reference set.

    ``theta`` is None when the radial LP is infeasible (possible only when the
    point is not part of its own reference set). ``lambdas`` is indexed like
    the reference rows.
    """

    theta: float | None
    lambdas: np.ndarray | None = None
    input_slacks: np.ndarray | None = None
    output_slacks: np.ndarray | None = None

    @property
    def feasible(self) -> bool:
        return self.theta is not None


def _scales(point: np.ndarray, ref: np.ndarray) -> np.ndarray:
    scale = np.maximum(np.abs(ref).max(axis=0), np.abs(point))
    scale[scale == 0] = 1.0
    return scale


def _convexity(assumption: RtsAssumption, n_ref: int, lead: int, trail: int):
    if assumption is RtsAssumption.CRS:
        return [], [], []
    row = np.concatenate([np.zeros(lead), np.ones(n_ref), np.zeros(trail)])
    rel = Relation.EQ if assumption is RtsAssumption.VRS else Relation.LE
    return [row], [rel], [1.0]


def radial_theta(x0, y0, X, Y, assumption, tol: Tolerances | None = None):
    """Optimal radial contraction of ``x0``; returns ``(theta, lambdas)`` or None if infeasible."""
    assumption = _as_assumption(assumption)
    x0 = np.asarray(x0, float)
    y0 = np.asarray(y0, float)
    X = np.atleast_2d(np.asarray(X, float))
    Y = np.atleast_2d(np.asarray(Y, float))
    n = X.shape[0]
    sx, sy = _scales(x0, X), _scales(y0, Y)
    Xn, Yn, x0n, y0n = X / sx, Y / sy, x0 / sx, y0 / sy

    # variables: [theta, lam_1 .. lam_n]
    rows = [np.concatenate([[-x0n[i]], Xn[:, i]]) for i in range(len(x0))]
    rels = [Relation.LE] * len(x0)
    rhs = [0.0] * len(x0)
    rows += [np.concatenate([[0.0], Yn[:, r]]) for r in range(len(y0))]
    rels += [Relation.GE] * len(y0)
    rhs += list(y0n)
    crow, crel, crhs = _convexity(assumption, n, 1, 0)
    cost = np.zeros(n + 1)
    cost[0] = 1.0
    sol = solve(LinearProgram(cost, np.array(rows + crow), rels + crel, rhs + crhs), tol)
    if sol.status is Status.INFEASIBLE:
        return None
    if sol.status is not Status.OPTIMAL:
        raise SolverInvariantError(f"radial LP ended with status {sol.status.value}")
    return float(sol.primal_values[0]), np.array(sol.primal_values[1:])


def slack_stage(x0, y0, X, Y, assumption, theta: float, tol: Tolerances | None = None):
    """Slack-maximal intensity vector at fixed ``theta``.

    Returns ``(input_slacks, output_slacks, lambdas)`` in the data's units.
    """
    assumption = _as_assumption(assumption)
    x0 = np.asarray(x0, float)
    y0 = np.asarray(y0, float)
    X = np.atleast_2d(np.asarray(X, float))
    Y = np.atleast_2d(np.asarray(Y, float))
    n, m = X.shape
    s = Y.shape[1]
    sx, sy = _scales(x0, X), _scales(y0, Y)
    Xn, Yn, x0n, y0n = X / sx, Y / sy, x0 / sx, y0 / sy

    # variables: [lam (n), input slacks (m), output slacks (s)]
    rows = [np.concatenate([Xn[:, i], np.eye(m)[i], np.zeros(s)]) for i in range(m)]
    rhs = list(theta * x0n)
    rows += [np.concatenate([Yn[:, r], np.zeros(m), -np.eye(s)[r]]) for r in range(s)]
    rhs += list(y0n)
    rels = [Relation.EQ] * (m + s)
    crow, crel, crhs = _convexity(assumption, n, 0, m + s)
    cost = np.concatenate([np.zeros(n), np.ones(m + s)])
    sol = solve(LinearProgram(cost, np.array(rows + crow), rels + crel, rhs + crhs,
                              Sense.MAXIMIZE), tol)
    if sol.status is not Status.OPTIMAL:
        raise SolverInvariantError(
            f"slack stage is {sol.status.value} at theta={theta!r}; theta is not the radial optimum"
        )
    v = sol.primal_values
    return v[n:n + m] * sx, v[n + m:] * sy, np.array(v[:n])


def evaluate_point(x0, y0, X, Y, assumption, *, slacks: bool = True,
                   self_index: int | None = None, tol: Tolerances | None = None,
                   theta: float | None = None) -> PointEvaluation:
    """Radial score and (optionally) max-slack solution of a point.

    When ``self_index`` names the reference row holding the point itself and
    the point is efficient with zero slacks, the intensity vector is reported
    as that row alone with weight 1. A known radial score may be passed as
    ``theta`` to skip the first stage.
    """
    x0 = np.asarray(x0, float)
    if (x0 <= 0).any():
        raise DomainError(f"evaluated inputs must be strictly positive, got {x0.tolist()}")
    if theta is None or not slacks:
        radial = radial_theta(x0, y0, X, Y, assumption, tol)
        if radial is None:
            return PointEvaluation(None)
        theta, lam = radial
    if not slacks:
        return PointEvaluation(theta, lam)
    s_in, s_out, lam = slack_stage(x0, y0, X, Y, assumption, theta, tol)
    if self_index is not None and theta >= 1 - EFFICIENT_TOL:
        sx = _scales(x0, np.atleast_2d(X))
        sy = _scales(np.asarray(y0, float), np.atleast_2d(Y))
        if max((s_in / sx).max(initial=0.0), (s_out / sy).max(initial=0.0)) <= EFFICIENT_TOL:
            lam = np.zeros(len(lam))
            lam[self_index] = 1.0
            s_in = np.zeros_like(s_in)
            s_out = np.zeros_like(s_out)
    return PointEvaluation(theta, lam, s_in, s_out)


@dataclass(frozen=True)
class EfficiencyResult:
    """Radial input efficiency of one DMU with its slack-maximal solution.

    ``lambdas`` holds only the strictly positive intensity weights, keyed by
    reference DMU id in dataset order.
    """

    dmu_id: str
    period: str
    theta: float
    lambdas: dict[str, float]
    input_slacks: tuple[float, ...]
    output_slacks: tuple[float, ...]
    assumption: RtsAssumption
    rts_class: RtsClass = RtsClass.NOT_CLASSIFIED

    @property
    def is_efficient(self) -> bool:
        return self.theta >= 1 - EFFICIENT_TOL

    @property
    def peers(self) -> list[tuple[str, float]]:
        """Peers sorted by descending weight (ties keep dataset order)."""
        return sorted(self.lambdas.items(), key=lambda kv: -kv[1])


@dataclass(frozen=True)
class ScaleResult:
    dmu_id: str
    period: str
    theta_crs: float
    theta_vrs: float
    theta_nirs: float
    scale_efficiency: float
    rts_class: RtsClass


def _reference(dataset: PanelDataset, dmu_id: str, period: str):
    record = dataset.get(dmu_id, period)
    ids, X, Y = dataset.matrices(period)
    return record, ids, X, Y


def _check_inputs(record) -> None:
    if any(v <= 0 for v in record.inputs):
        raise DomainError(
            f"dmu {record.dmu_id!r} in period {record.period!r} has a non-positive input; "
            "radial input contraction is undefined"
        )


def _result(record, ids, ev: PointEvaluation, assumption) -> EfficiencyResult:
    if not ev.feasible:
        raise SolverInvariantError(
            f"same-period envelopment LP infeasible for dmu {record.dmu_id!r} ({assumption.value})"
        )
    lambdas = {ids[j]: float(w) for j, w in enumerate(ev.lambdas) if w > 0}
    return EfficiencyResult(
        dmu_id=record.dmu_id,
        period=record.period,
        theta=ev.theta,
        lambdas=lambdas,
        input_slacks=tuple(float(v) for v in ev.input_slacks),
        output_slacks=tuple(float(v) for v in ev.output_slacks),
        assumption=assumption,
    )


def radial_efficiency(dataset: PanelDataset, dmu_id: str, period: str,
                      assumption: RtsAssumption | str = RtsAssumption.CRS,
                      tol: Tolerances | None = None,
                      theta: float | None = None) -> EfficiencyResult:
    """Input-oriented efficiency of ``dmu_id`` against its own period's DMUs.

    ``theta`` may carry an already computed radial score for the same model.
    Raises LookupFailure for an unknown DMU/period and DomainError when the
    DMU has a zero input.
    """
    assumption = _as_assumption(assumption)
    record, ids, X, Y = _reference(dataset, dmu_id, period)
    _check_inputs(record)
    ev = evaluate_point(record.inputs, record.outputs, X, Y, assumption,
                        self_index=ids.index(dmu_id), tol=tol, theta=theta)
    return _result(record, ids, ev, assumption)


def max_slacks(dataset: PanelDataset, dmu_id: str, period: str,
               assumption: RtsAssumption | str, theta: float,
               tol: Tolerances | None = None):
    """Second-stage slacks at a given radial score.

    Returns ``(input_slacks, output_slacks, lambdas)`` where ``lambdas`` maps
    reference DMU ids to positive weights.
    """
    assumption = _as_assumption(assumption)
    record, ids, X, Y = _reference(dataset, dmu_id, period)
    _check_inputs(record)
    s_in, s_out, lam = slack_stage(record.inputs, record.outputs, X, Y, assumption, theta, tol)
    lambdas = {ids[j]: float(w) for j, w in enumerate(lam) if w > 0}
    return tuple(map(float, s_in)), tuple(map(float, s_out)), lambdas


def classify_scale(theta_crs: float, theta_vrs: float, theta_nirs: float) -> tuple[float, RtsClass]:
    """Scale efficiency and returns-to-scale class by the NIRS comparison."""
    se = theta_crs / theta_vrs
    if se >= 1 - EFFICIENT_TOL:
        return se, RtsClass.CRS
    if abs(theta_nirs - theta_vrs) <= EFFICIENT_TOL:
        return se, RtsClass.DRS
    return se, RtsClass.IRS


def scale_analysis(dataset: PanelDataset, dmu_id: str, period: str,
                   tol: Tolerances | None = None) -> ScaleResult:
    record, ids, X, Y = _reference(dataset, dmu_id, period)
    _check_inputs(record)
    return _scale(record, X, Y, tol)


def _scale(record, X, Y, tol) -> ScaleResult:
    thetas = {}
    for a in RtsAssumption:
        ev = evaluate_point(record.inputs, record.outputs, X, Y, a, slacks=False, tol=tol)
        if not ev.feasible:
            raise SolverInvariantError(
                f"same-period envelopment LP infeasible for dmu {record.dmu_id!r} ({a.value})"
            )
        thetas[a] = ev.theta
    se, cls = classify_scale(thetas[RtsAssumption.CRS], thetas[RtsAssumption.VRS],
                             thetas[RtsAssumption.NIRS])
    return ScaleResult(record.dmu_id, record.period, thetas[RtsAssumption.CRS],
                       thetas[RtsAssumption.VRS], thetas[RtsAssumption.NIRS], se, cls)


def scale_table(dataset: PanelDataset, period: str, tol: Tolerances | None = None) -> list[ScaleResult]:
    ids, X, Y = dataset.matrices(period)
    out = []
    for dmu in ids:
        record = dataset.get(dmu, period)
        _check_inputs(record)
        out.append(_scale(record, X, Y, tol))
    return out


@dataclass(frozen=True)
class EfficiencyTable:
    period: str
    assumption: RtsAssumption
    results: tuple[EfficiencyResult, ...]

    def __iter__(self):
        return iter(self.results)

    def __len__(self) -> int:
        return len(self.results)

    def __getitem__(self, i):
        return self.results[i]

    @property
    def scores(self) -> list[float]:
        return [r.theta for r in self.results]

    @property
    def mean_theta(self) -> float:
        return float(np.mean(self.scores))

    @property
    def n_efficient(self) -> int:
        return sum(r.is_efficient for r in self.results)

    @property
    def percent_efficient(self) -> float:
        return 100.0 * self.n_efficient / len(self.results)


def efficiency_table(dataset: PanelDataset, period: str,
                     assumption: RtsAssumption | str = RtsAssumption.CRS,
                     tol: Tolerances | None = None) -> EfficiencyTable:
    """Score every DMU of ``period`` (dataset order) under one assumption."""
    assumption = _as_assumption(assumption)
    ids, X, Y = dataset.matrices(period)
    if not ids:
        raise EmptySelectionError(f"period {period!r} has no DMUs")
    results = []
    for j, dmu in enumerate(ids):
        record = dataset.get(dmu, period)
        _check_inputs(record)
        ev = evaluate_point(record.inputs, record.outputs, X, Y, assumption, self_index=j, tol=tol)
        results.append(_result(record, ids, ev, assumption))
    return EfficiencyTable(period, assumption, tuple(results))
