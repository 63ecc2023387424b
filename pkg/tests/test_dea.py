import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frontier_bench.dea import (
    EFFICIENT_TOL,
    RtsAssumption,
    RtsClass,
    classify_scale,
    efficiency_table,
    evaluate_point,
    max_slacks,
    radial_efficiency,
    scale_analysis,
    scale_table,
)
from frontier_bench.errors import DomainError, LookupFailure, SolverInvariantError

from fixtures import dea_data, from_arrays, panel, three_dmu
from oracles import crs_ratio_oracle, enumerate_vertices, vrs_hull_oracle

CRS, VRS, NIRS = RtsAssumption.CRS, RtsAssumption.VRS, RtsAssumption.NIRS


def two_input():
    return panel({"t": {"A": (1, 3, 1), "B": (3, 1, 1), "C": (3, 3, 1), "D": (1, 4, 1)}},
                 n_inputs=2)


def envelopment_oracle(x0, y0, X, Y):
    """CRS theta by vertex enumeration over [theta, lambda...]."""
    n = X.shape[0]
    rows, rels, rhs = [], [], []
    for i in range(X.shape[1]):
        rows.append([-x0[i]] + list(X[:, i]))
        rels.append("<=")
        rhs.append(0.0)
    for r in range(Y.shape[1]):
        rows.append([0.0] + list(Y[:, r]))
        rels.append(">=")
        rhs.append(y0[r])
    return enumerate_vertices([1.0] + [0.0] * n, rows, rels, rhs)[0]


# -- worked examples ----------------------------------------------------------

def test_three_dmu_crs():
    ds = three_dmu()
    assert radial_efficiency(ds, "C", "2020", "crs").theta == pytest.approx(0.48, abs=1e-12)
    table = efficiency_table(ds, "2020", CRS)
    assert table.scores == pytest.approx([0.8, 1.0, 0.48], abs=1e-12)
    assert table.mean_theta == pytest.approx(0.76, abs=1e-12)
    assert table.n_efficient == 1
    assert table.percent_efficient == pytest.approx(100 / 3)


def test_three_dmu_vrs():
    res = radial_efficiency(three_dmu(), "C", "2020", VRS)
    assert res.theta == pytest.approx(8 / 15, abs=1e-12)
    assert res.lambdas == pytest.approx({"A": 2 / 3, "B": 1 / 3}, abs=1e-12)
    assert res.input_slacks == pytest.approx((0.0,), abs=1e-12)
    assert res.output_slacks == pytest.approx((0.0,), abs=1e-12)
    assert res.peers[0][0] == "A"


def test_three_dmu_scale_is_irs():
    s = scale_analysis(three_dmu(), "C", "2020")
    assert s.scale_efficiency == pytest.approx(0.9, abs=1e-12)
    assert s.theta_nirs == pytest.approx(0.48, abs=1e-12)
    assert s.rts_class is RtsClass.IRS


def test_large_dmu_is_drs():
    ds = panel({"t": {"A": (2, 2), "B": (4, 5), "C": (5, 3), "E": (10, 6)}})
    s = scale_analysis(ds, "E", "t")
    assert (s.theta_crs, s.theta_vrs, s.theta_nirs) == pytest.approx((0.48, 1.0, 1.0), abs=1e-12)
    assert s.rts_class is RtsClass.DRS


def test_efficient_dmu_is_crs_class():
    s = scale_analysis(three_dmu(), "B", "2020")
    assert s.scale_efficiency == pytest.approx(1.0)
    assert s.rts_class is RtsClass.CRS


def test_self_reference_only():
    ds = panel({"t": {"solo": (3, 7, 2)}}, n_inputs=2)
    for a in RtsAssumption:
        res = radial_efficiency(ds, "solo", "t", a)
        assert res.theta == pytest.approx(1.0)
        assert res.lambdas == {"solo": 1.0}


def test_all_identical():
    ds = panel({"t": {k: (4, 2, 9) for k in "PQRS"}}, n_inputs=2)
    for a in RtsAssumption:
        table = efficiency_table(ds, "t", a)
        assert table.scores == pytest.approx([1.0] * 4)
        assert table.percent_efficient == 100.0
        for res in table:
            assert res.lambdas == {res.dmu_id: 1.0}


def test_two_input_radial_point():
    ds = two_input()
    res = radial_efficiency(ds, "C", "t", CRS)
    ids, X, Y = ds.matrices("t")
    expected = envelopment_oracle(X[2], Y[2], X, Y)
    assert expected == pytest.approx(2 / 3)
    assert res.theta == pytest.approx(expected, abs=1e-9)
    assert res.input_slacks == pytest.approx((0, 0), abs=1e-9)
    assert res.lambdas == pytest.approx({"A": 0.5, "B": 0.5})


def test_weakly_efficient_has_slack():
    ds = two_input()
    ids, X, Y = ds.matrices("t")
    assert envelopment_oracle(X[3], Y[3], X, Y) == pytest.approx(1.0)
    res = radial_efficiency(ds, "D", "t", CRS)
    assert res.theta == pytest.approx(1.0)
    assert res.input_slacks == pytest.approx((0.0, 1.0), abs=1e-9)
    assert res.lambdas == pytest.approx({"A": 1.0})
    assert not ("D" in res.lambdas)
    s_in, s_out, lam = max_slacks(ds, "D", "t", CRS, res.theta)
    assert s_in == pytest.approx((0.0, 1.0), abs=1e-9)


def test_frontier_point_has_zero_slacks():
    s_in, s_out, lam = max_slacks(three_dmu(), "B", "2020", CRS, 1.0)
    assert s_in == (0.0,) and s_out == (0.0,)


def test_inconsistent_theta_is_solver_invariant():
    with pytest.raises(SolverInvariantError):
        max_slacks(three_dmu(), "C", "2020", CRS, 0.1)


def test_errors():
    ds = three_dmu()
    with pytest.raises(LookupFailure):
        radial_efficiency(ds, "Z", "2020")
    with pytest.raises(LookupFailure):
        radial_efficiency(ds, "A", "1999")
    zero = panel({"t": {"A": (0, 1), "B": (1, 1)}})
    with pytest.raises(DomainError):
        radial_efficiency(zero, "A", "t")
    with pytest.raises(DomainError):
        efficiency_table(zero, "t")
    with pytest.raises(ValueError):
        radial_efficiency(ds, "A", "2020", "increasing")


def test_zero_output_is_allowed():
    ds = panel({"t": {"A": (2, 0, 4), "B": (2, 3, 4), "C": (4, 1, 1)}}, n_inputs=1)
    res = radial_efficiency(ds, "A", "t", CRS)
    assert res.theta == pytest.approx(1.0)
    assert res.output_slacks[0] == pytest.approx(3.0)


def test_classify_scale_thresholds():
    assert classify_scale(0.5, 0.5, 0.5)[1] is RtsClass.CRS
    assert classify_scale(0.5, 1.0, 1.0)[1] is RtsClass.DRS
    assert classify_scale(0.5, 1.0, 0.5)[1] is RtsClass.IRS
    assert classify_scale(1 - 1e-7, 1.0, 0.2)[1] is RtsClass.CRS


def test_single_assumption_results_are_not_classified():
    assert radial_efficiency(three_dmu(), "A", "2020").rts_class is RtsClass.NOT_CLASSIFIED


# -- oracle properties --------------------------------------------------------

single = st.lists(st.tuples(st.floats(0.5, 50), st.floats(0.5, 50)), min_size=2, max_size=8)


@settings(max_examples=100, deadline=None)
@given(single)
def test_crs_matches_ratio_oracle(points):
    x = np.array([p[0] for p in points])
    y = np.array([p[1] for p in points])
    ds = from_arrays(x[:, None], y[:, None])
    assert efficiency_table(ds, "t", CRS).scores == pytest.approx(crs_ratio_oracle(x, y), abs=1e-6)


@settings(max_examples=100, deadline=None)
@given(single)
def test_vrs_matches_hull_oracle(points):
    x = np.array([p[0] for p in points])
    y = np.array([p[1] for p in points])
    ds = from_arrays(x[:, None], y[:, None])
    expected = [vrs_hull_oracle(x[j], y[j], x, y) for j in range(len(x))]
    assert efficiency_table(ds, "t", VRS).scores == pytest.approx(expected, abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(dea_data(max_dmus=6, max_inputs=2, max_outputs=2))
def test_crs_matches_vertex_enumeration(data):
    X, Y = data
    for j in range(X.shape[0]):
        ev = evaluate_point(X[j], Y[j], X, Y, CRS, slacks=False)
        assert ev.theta == pytest.approx(envelopment_oracle(X[j], Y[j], X, Y), abs=1e-6)


# -- invariants -----------------------------------------------------------------

def _thetas(X, Y, assumption):
    return np.array([evaluate_point(X[j], Y[j], X, Y, assumption, slacks=False).theta
                     for j in range(X.shape[0])])


@settings(max_examples=60, deadline=None)
@given(dea_data())
def test_nesting_and_scale_identity(data):
    X, Y = data
    ds = from_arrays(X, Y)
    for s in scale_table(ds, "t"):
        assert 0 < s.theta_crs <= s.theta_nirs + 1e-9
        assert s.theta_nirs <= s.theta_vrs + 1e-9
        assert s.theta_vrs <= 1 + 1e-7
        assert s.scale_efficiency * s.theta_vrs == pytest.approx(s.theta_crs, abs=1e-9)
        assert (s.rts_class is RtsClass.CRS) == (s.scale_efficiency >= 1 - EFFICIENT_TOL)


@settings(max_examples=40, deadline=None)
@given(dea_data(), st.sampled_from([0.01, 7.0, 1000.0]), st.data())
def test_units_invariance(data, c, draw):
    X, Y = data
    col = draw.draw(st.integers(0, X.shape[1] + Y.shape[1] - 1))
    X2, Y2 = X.copy(), Y.copy()
    if col < X.shape[1]:
        X2[:, col] *= c
    else:
        Y2[:, col - X.shape[1]] *= c
    for a in RtsAssumption:
        assert _thetas(X2, Y2, a) == pytest.approx(_thetas(X, Y, a), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(dea_data(max_dmus=7), st.data())
def test_dominated_dmu_changes_nothing(data, draw):
    X, Y = data
    k = draw.draw(st.integers(0, X.shape[0] - 1))
    bump = draw.draw(st.floats(0.0, 5.0))
    cut = draw.draw(st.floats(0.0, 0.9))
    x_new = X[k] + bump
    y_new = Y[k] * (1 - cut)
    if bump == 0 and cut == 0:
        x_new = x_new + 1.0
    X2 = np.vstack([X, x_new])
    Y2 = np.vstack([Y, y_new])
    n = X.shape[0]
    for a in RtsAssumption:
        before = _thetas(X, Y, a)
        after = np.array([evaluate_point(X[j], Y[j], X2, Y2, a, slacks=False).theta
                          for j in range(n)])
        assert after == pytest.approx(before, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(dea_data())
def test_result_invariants(data):
    X, Y = data
    ds = from_arrays(X, Y)
    for a in RtsAssumption:
        for res in efficiency_table(ds, "t", a):
            assert 0 < res.theta <= 1 + 1e-7
            assert all(w >= 0 for w in res.lambdas.values())
            assert min(res.input_slacks + res.output_slacks) >= -1e-7
            total = sum(res.lambdas.values())
            if a is VRS:
                assert total == pytest.approx(1.0, abs=1e-6)
            elif a is NIRS:
                assert total <= 1 + 1e-6
            if res.is_efficient and max(res.input_slacks + res.output_slacks) <= 1e-9:
                assert res.lambdas == {res.dmu_id: 1.0}


def test_table_order_and_determinism():
    ds = from_arrays(np.array([[3.0, 1], [2, 2], [1, 5], [4, 4]]), np.array([[1.0], [1], [1], [1]]))
    first = efficiency_table(ds, "t", VRS)
    assert [r.dmu_id for r in first] == ds.dmu_ids("t")
    assert efficiency_table(ds, "t", VRS) == first
