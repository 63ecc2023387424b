"""Small hand-built panels and hypothesis strategies shared by the tests."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from frontier_bench.dataset import DmuRecord, PanelDataset

THREE_DMU_CSV = b"""dmu,period,in:x,out:y
A,2020,2,2
B,2020,4,5
C,2020,5,3
"""


def panel(data: dict[str, dict[str, tuple]], n_inputs: int = 1,
          input_names=None, output_names=None) -> PanelDataset:
    """Build a dataset from ``{period: {dmu: (x..., y...)}}``."""
    records, periods = [], list(data)
    n_outputs = None
    for period, rows in data.items():
        for dmu, values in rows.items():
            values = tuple(float(v) for v in values)
            n_outputs = len(values) - n_inputs
            records.append(DmuRecord(dmu, period, values[:n_inputs], values[n_inputs:]))
    return PanelDataset(
        input_names=tuple(input_names or (f"x{j + 1}" for j in range(n_inputs))),
        output_names=tuple(output_names or (f"y{r + 1}" for r in range(n_outputs))),
        periods=tuple(periods),
        records=tuple(records),
    )


def three_dmu() -> PanelDataset:
    return panel({"2020": {"A": (2, 2), "B": (4, 5), "C": (5, 3)}},
                 input_names=("x",), output_names=("y",))


def from_arrays(X, Y, period="t", ids=None) -> PanelDataset:
    X, Y = np.atleast_2d(X), np.atleast_2d(Y)
    ids = ids or [f"D{j}" for j in range(X.shape[0])]
    rows = {dmu: tuple(X[j]) + tuple(Y[j]) for j, dmu in enumerate(ids)}
    return panel({period: rows}, n_inputs=X.shape[1])


def panel_from_arrays(Xs, Ys, periods) -> PanelDataset:
    data = {}
    for p, X, Y in zip(periods, Xs, Ys):
        data[p] = {f"D{j}": tuple(X[j]) + tuple(Y[j]) for j in range(X.shape[0])}
    return panel(data, n_inputs=Xs[0].shape[1])


positive = st.floats(0.5, 100.0, allow_nan=False, allow_infinity=False)


@st.composite
def dea_data(draw, max_dmus=8, max_inputs=3, max_outputs=3, min_dmus=2):
    """Random strictly positive input/output matrices (rounded to keep them well scaled)."""
    n = draw(st.integers(min_dmus, max_dmus))
    m = draw(st.integers(1, max_inputs))
    s = draw(st.integers(1, max_outputs))
    X = np.array([[round(draw(positive), 2) for _ in range(m)] for _ in range(n)])
    Y = np.array([[round(draw(positive), 2) for _ in range(s)] for _ in range(n)])
    return X, Y


@st.composite
def two_period_data(draw, max_dmus=6, max_inputs=2, max_outputs=2):
    n = draw(st.integers(2, max_dmus))
    m = draw(st.integers(1, max_inputs))
    s = draw(st.integers(1, max_outputs))

    def matrix(rows, cols):
        return np.array([[round(draw(positive), 2) for _ in range(cols)] for _ in range(rows)])

    return [matrix(n, m), matrix(n, m)], [matrix(n, s), matrix(n, s)]
