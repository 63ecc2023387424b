"""Dense two-phase primal simplex.

Small and deliberately plain: DEA envelopment problems have a handful of rows
and at most a few hundred columns, so a full tableau is cheap, and a simplex
method returns vertex solutions (sparse intensity vectors) rather than the
interior averages an interior-point code would produce.

Bland's rule is used for both the entering column (lowest index with a
negative reduced cost) and the leaving row (lowest basic index among ratio
ties), which guarantees termination on degenerate problems.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import DimensionError, NonFiniteError, SolverInvariantError

TOL_FEAS_ENV = "FRONTIER_BENCH_TOL_FEAS"


class Sense(str, Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


class Relation(str, Enum):
    LE = "<="
    EQ = "="
    GE = ">="

    @classmethod
    def parse(cls, value: "Relation | str") -> "Relation":
        if isinstance(value, Relation):
            return value
        aliases = {"<=": cls.LE, "≤": cls.LE, "le": cls.LE,
                   "=": cls.EQ, "==": cls.EQ, "eq": cls.EQ,
                   ">=": cls.GE, "≥": cls.GE, "ge": cls.GE}
        try:
            return aliases[str(value).strip().lower()]
        except KeyError:
            raise DimensionError(f"unknown constraint relation {value!r}") from None


class Status(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used by :func:`solve`.

    feas:  phase-1 residual above which a problem is declared infeasible.
    opt:   reduced-cost threshold for optimality.
    zero:  primal values with magnitude below this are clipped to 0.
    pivot: smallest column entry accepted in the ratio test.
    """

    feas: float = 1e-7
    opt: float = 1e-9
    zero: float = 1e-9
    pivot: float = 1e-9

    @classmethod
    def from_env(cls) -> "Tolerances":
        raw = os.environ.get(TOL_FEAS_ENV)
        if not raw:
            return cls()
        try:
            feas = float(raw)
        except ValueError:
            raise NonFiniteError(f"{TOL_FEAS_ENV}={raw!r} is not a number") from None
        if not np.isfinite(feas) or feas <= 0:
            raise NonFiniteError(f"{TOL_FEAS_ENV} must be a positive finite number, got {raw!r}")
        return cls(feas=feas)


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """``optimize cost @ x`` subject to ``matrix @ x (relations) rhs``, ``x >= 0``."""

    cost: np.ndarray
    matrix: np.ndarray
    relations: tuple[Relation, ...]
    rhs: np.ndarray
    sense: Sense = Sense.MINIMIZE

    def __post_init__(self) -> None:
        cost = np.array(self.cost, dtype=float, ndmin=1)
        matrix = np.array(self.matrix, dtype=float, ndmin=2)
        rhs = np.array(self.rhs, dtype=float, ndmin=1)
        relations = tuple(Relation.parse(r) for r in self.relations)
        if cost.ndim != 1 or rhs.ndim != 1 or matrix.ndim != 2:
            raise DimensionError("cost and rhs must be vectors, matrix must be 2-D")
        m, n = matrix.shape
        if n < 1 or m < 1:
            raise DimensionError(f"need at least one variable and one constraint, got {m}x{n}")
        if cost.shape[0] != n:
            raise DimensionError(f"cost has length {cost.shape[0]} but matrix has {n} columns")
        if rhs.shape[0] != m or len(relations) != m:
            raise DimensionError(
                f"matrix has {m} rows but rhs has {rhs.shape[0]} and relations {len(relations)}"
            )
        for arr in (cost, matrix, rhs):
            arr.flags.writeable = False
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "sense", Sense(self.sense))

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: Status
    objective_value: float | None
    primal_values: np.ndarray
    iterations: int
    basis: tuple[int, ...] = field(default=(), repr=False)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def _set_objective(T: np.ndarray, cost: np.ndarray, basis: Sequence[int]) -> None:
    m = T.shape[0] - 1
    cb = cost[list(basis)]
    T[m, :-1] = cost - cb @ T[:m, :-1]
    T[m, -1] = -(cb @ T[:m, -1])


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    pivot_row = T[row]
    pivot_row /= pivot_row[col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= factors[:, None] * pivot_row
    T[:, col] = 0.0
    T[row, col] = 1.0


def _iterate(T: np.ndarray, basis: list[int], n_enter: int, tol: Tolerances,
             max_iter: int) -> tuple[Status, int]:
    """Run Bland-rule simplex pivots on ``T`` until optimal or unbounded."""
    m = T.shape[0] - 1
    reduced = T[m, :n_enter]
    rhs = T[:m, -1]
    basis_arr = np.asarray(basis)
    ratios = np.empty(m)
    big = np.iinfo(basis_arr.dtype).max
    for it in range(max_iter):
        negative = reduced < -tol.opt
        enter = int(negative.argmax())
        if not negative[enter]:
            return Status.OPTIMAL, it
        column = T[:m, enter]
        eligible = column > tol.pivot
        ratios.fill(np.inf)
        np.divide(np.maximum(rhs, 0.0), column, out=ratios, where=eligible)
        best = ratios.min()
        if best == np.inf:
            return Status.UNBOUNDED, it
        ties = ratios <= best + 1e-12 * max(1.0, best)
        leave = int(np.where(ties, basis_arr, big).argmin())
        _pivot(T, leave, enter)
        basis[leave] = enter
        basis_arr[leave] = enter
    raise SolverInvariantError(f"simplex did not terminate within {max_iter} pivots")


def solve(lp: LinearProgram, tol: Tolerances | None = None) -> LpSolution:
    """Solve ``lp`` with the two-phase primal simplex method.

    Infeasibility is reported when the phase-1 artificial objective exceeds
    ``tol.feas``; unboundedness when an entering column has no positive entry.
    The returned primal vector is recomputed from the final basis against the
    original data, then values below ``tol.zero`` in magnitude are set to 0.
    """
    tol = tol or Tolerances.from_env()
    if not (np.isfinite(lp.cost).all() and np.isfinite(lp.matrix).all()
            and np.isfinite(lp.rhs).all()):
        raise NonFiniteError("linear program has non-finite coefficients")

    A = lp.matrix.copy()
    b = lp.rhs.copy()
    relations = list(lp.relations)
    m, n = A.shape
    for i in np.flatnonzero(b < 0):
        A[i] *= -1.0
        b[i] *= -1.0
        if relations[i] is Relation.LE:
            relations[i] = Relation.GE
        elif relations[i] is Relation.GE:
            relations[i] = Relation.LE

    n_slack = sum(r is not Relation.EQ for r in relations)
    n_art = sum(r is not Relation.LE for r in relations)
    art_start = n + n_slack
    N = art_start + n_art
    A_std = np.zeros((m, N))
    A_std[:, :n] = A
    basis = [0] * m
    s, a = n, art_start
    for i, rel in enumerate(relations):
        if rel is Relation.LE:
            A_std[i, s] = 1.0
            basis[i] = s
            s += 1
        else:
            if rel is Relation.GE:
                A_std[i, s] = -1.0
                s += 1
            A_std[i, a] = 1.0
            basis[i] = a
            a += 1

    T = np.zeros((m + 1, N + 1))
    T[:m, :N] = A_std
    T[:m, N] = b
    max_iter = 200 * (m + N) + 1000
    iterations = 0

    if n_art:
        phase1_cost = np.zeros(N)
        phase1_cost[art_start:] = 1.0
        _set_objective(T, phase1_cost, basis)
        _, it = _iterate(T, basis, N, tol, max_iter)
        iterations += it
        if -T[m, N] > tol.feas:
            return LpSolution(Status.INFEASIBLE, None, np.full(n, np.nan), iterations)
        for i in range(m):
            if basis[i] < art_start:
                continue
            row = np.abs(T[i, :art_start])
            j = int(np.argmax(row))
            if row[j] > tol.pivot:
                _pivot(T, i, j)
                basis[i] = j
                iterations += 1
            # otherwise the row is redundant; its artificial stays basic at zero

    cost = np.zeros(N)
    cost[:n] = lp.cost if lp.sense is Sense.MINIMIZE else -lp.cost
    _set_objective(T, cost, basis)
    status, it = _iterate(T, basis, art_start, tol, max_iter)
    iterations += it
    if status is Status.UNBOUNDED:
        return LpSolution(status, None, np.full(n, np.nan), iterations, tuple(basis))

    x = np.zeros(N)
    try:
        x[basis] = np.linalg.solve(A_std[:, basis], b)
    except np.linalg.LinAlgError:
        x[basis] = T[:m, N]
    x[np.abs(x) < tol.zero] = 0.0
    primal = x[:n]
    primal.flags.writeable = False
    return LpSolution(Status.OPTIMAL, float(lp.cost @ primal), primal, iterations, tuple(basis))
