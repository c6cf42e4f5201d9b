import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from summab import DomainError
from summab.matrices import (
    cesaro_matrix,
    check_matrix_conditions,
    custom_matrix,
    delta_transform_direct,
    delta_transform_via_ahat,
    derive,
    identity_matrix,
    load_matrix_csv,
    row_transform,
    save_matrix_csv,
    weighted_mean_matrix,
)
from summab.seqcore import partial_sums, weight_partials


def loop_companions(table):
    """abar / ahat by explicit double loops over a dense table."""
    N = table.shape[0] - 1
    abar = np.zeros_like(table)
    for n in range(N + 1):
        for v in range(n + 1):
            abar[n, v] = sum(table[n, i] for i in range(v, n + 1))
    ahat = np.zeros_like(table)
    ahat[0, 0] = table[0, 0]
    for n in range(1, N + 1):
        for v in range(n + 1):
            ahat[n, v] = abar[n, v] - (abar[n - 1, v] if v <= n - 1 else 0.0)
    return abar, ahat


def random_normal(rng, N):
    t = np.tril(rng.uniform(0, 1, (N + 1, N + 1)), -1)
    t[np.diag_indices(N + 1)] = rng.uniform(0.1, 1, N + 1)
    return t


WEIGHTS = {
    "unit": lambda N: np.ones(N + 1),
    "linear": lambda N: np.arange(1, N + 2.0),
    "geometric": lambda N: 1.5 ** np.arange(N + 1.0),
    "log_slow": lambda N: 1.0 / np.arange(1, N + 2.0),
}


def test_weighted_mean_unit_weights():
    A = weighted_mean_matrix(weight_partials(np.ones(6)))
    for n in range(6):
        np.testing.assert_allclose(A.row(n), np.full(n + 1, 1.0 / (n + 1)), rtol=1e-15)
    assert A.entry(2, 4) == 0.0


@pytest.mark.parametrize("name", sorted(WEIGHTS))
def test_weighted_mean_diagonal_and_row_sums(name):
    w = weight_partials(WEIGHTS[name](30))
    A = weighted_mean_matrix(w)
    np.testing.assert_allclose(A.diagonal(), w.p.values / w.P.values, rtol=1e-15)
    np.testing.assert_allclose(A.to_dense().sum(axis=1), 1.0, rtol=1e-13)


def test_cesaro_matrix_order_one_is_arithmetic_mean():
    A = cesaro_matrix(1.0, 10)
    for n in range(11):
        np.testing.assert_allclose(A.row(n), 1.0 / (n + 1), rtol=1e-15)


def test_cesaro_matrix_order_zero_is_identity():
    np.testing.assert_array_equal(cesaro_matrix(0.0, 8).to_dense(), np.eye(9))


def test_cesaro_matrix_diagonal_is_reciprocal_coefficient():
    # A_n^{1/2} by the product formula, computed here independently
    alpha, N = 0.5, 12
    coeff = [1.0]
    for i in range(1, N + 1):
        coeff.append(coeff[-1] * (alpha + i) / i)
    np.testing.assert_allclose(cesaro_matrix(alpha, N).diagonal(), 1.0 / np.array(coeff), rtol=1e-14)


def test_cesaro_matrix_rejects_order():
    with pytest.raises(DomainError):
        cesaro_matrix(-1.0, 5)


def test_cesaro_one_equals_unit_weighted_mean_exactly():
    N = 50
    C = cesaro_matrix(1.0, N).to_dense()
    W = weighted_mean_matrix(weight_partials(np.ones(N + 1))).to_dense()
    np.testing.assert_array_equal(C, W)


def test_derive_weighted_mean_spot_values():
    D = derive(weighted_mean_matrix(weight_partials(np.ones(5))))
    assert D.abar(3, 2) == pytest.approx(0.5, rel=1e-15)
    assert D.ahat(3, 2) == pytest.approx(1 / 6, rel=1e-15)


def test_derive_identity():
    D = derive(identity_matrix(6))
    for n in range(7):
        np.testing.assert_array_equal(D.abar_row(n), np.ones(n + 1))
        expect = np.zeros(n + 1)
        expect[n] = 1
        np.testing.assert_array_equal(D.ahat_row(n), expect)


@pytest.mark.parametrize("make", [
    lambda: weighted_mean_matrix(weight_partials(np.arange(1, 13.0))),
    lambda: cesaro_matrix(0.5, 11),
    lambda: cesaro_matrix(2.0, 11),
    lambda: identity_matrix(11),
    lambda: custom_matrix(random_normal(np.random.default_rng(3), 11)),
])
@pytest.mark.parametrize("generic", [False, True])
def test_companions_match_loop_oracle(make, generic):
    A = make()
    abar, ahat = loop_companions(A.to_dense())
    D = A.derive(generic=generic)
    for n in range(A.horizon + 1):
        np.testing.assert_allclose(D.abar_row(n), abar[n, : n + 1], rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(D.ahat_row(n), ahat[n, : n + 1], rtol=1e-10, atol=1e-14)
        assert D.ahat_row(n)[n] == pytest.approx(A.row(n)[n], rel=1e-14)


@pytest.mark.parametrize("name", sorted(WEIGHTS))
def test_weighted_mean_closed_form_vs_generic(name):
    N = 200
    w = weight_partials(WEIGHTS[name](N))
    A = weighted_mean_matrix(w)
    closed, generic = A.derive(), A.derive(generic=True)
    for n in range(N + 1):
        c, g = closed.ahat_row(n), generic.ahat_row(n)
        assert np.max(np.abs(c - g)) <= 1e-12 * np.max(np.abs(c))
        cb, gb = closed.abar_row(n), generic.abar_row(n)
        np.testing.assert_allclose(cb, gb, rtol=1e-12)


def test_ahat_first_column_vanishes_under_unit_row_sums():
    for A in (weighted_mean_matrix(weight_partials(np.arange(1, 40.0))), cesaro_matrix(1.5, 38)):
        D = A.derive(generic=True)
        for n in range(1, A.horizon + 1):
            assert abs(D.ahat_row(n)[0]) < 1e-15


def test_row_transform_examples():
    s = np.array([1.0, 0.0, 1.0])
    assert row_transform(identity_matrix(2), s, 1) == 0.0
    A = weighted_mean_matrix(weight_partials(np.ones(3)))
    assert row_transform(A, s, 2) == pytest.approx(2 / 3, rel=1e-15)
    assert row_transform(A, np.zeros(3), 2) == 0.0
    with pytest.raises(DomainError):
        row_transform(A, s, 3)


def test_delta_transform_examples():
    A = weighted_mean_matrix(weight_partials(np.ones(2)))
    assert delta_transform_direct(A, [1.0, 0.0], 1) == pytest.approx(-0.5)
    assert delta_transform_direct(A, [4.0, 0.0], 0) == 4.0
    s = np.array([2.0, 3.0, 7.0, 1.0])
    for n in range(1, 4):
        assert delta_transform_direct(identity_matrix(3), s, n) == s[n] - s[n - 1]
    C = cesaro_matrix(2.0, 9)
    for n in range(1, 10):
        assert abs(delta_transform_direct(C, np.full(10, 3.0), n)) < 1e-14


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 40))
def test_two_route_identities(seed, N):
    rng = np.random.default_rng(seed)
    A = custom_matrix(random_normal(rng, N))
    a = rng.uniform(-1, 1, N + 1)
    s = partial_sums(a).values
    D = A.derive()
    for n in range(N + 1):
        via_abar = np.dot(D.abar_row(n), a[: n + 1])
        assert row_transform(A, s, n) == pytest.approx(via_abar, rel=1e-10, abs=1e-10)
        direct = delta_transform_direct(A, s, n)
        assert abs(direct - delta_transform_via_ahat(D, a, n)) <= 1e-10 * (1 + abs(direct))


def test_via_ahat_identity_and_zero():
    D = derive(identity_matrix(5))
    a = np.array([3.0, -1.0, 2.0, 5.0, 0.5, 7.0])
    for n in range(6):
        assert delta_transform_via_ahat(D, a, n) == a[n]
        assert delta_transform_via_ahat(D, np.zeros(6), n) == 0.0


@pytest.mark.parametrize("kind", ["weighted_mean", "cesaro", "custom"])
def test_apply_matches_rowwise(kind):
    rng = np.random.default_rng(11)
    N = 25
    A = {
        "weighted_mean": weighted_mean_matrix(weight_partials(rng.uniform(0.5, 2, N + 1))),
        "cesaro": cesaro_matrix(0.7, N),
        "custom": custom_matrix(random_normal(rng, N)),
    }[kind]
    s = rng.uniform(-1, 1, N + 1)
    np.testing.assert_allclose(A.apply(s), [row_transform(A, s, n) for n in range(N + 1)], rtol=1e-12)


def test_custom_matrix_validation():
    with pytest.raises(DomainError, match="lower triangular"):
        custom_matrix(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(DomainError, match="not normal"):
        custom_matrix([[1.0], [0.5, 0.0]])
    with pytest.raises(DomainError, match="row 1"):
        custom_matrix([[1.0], [0.5]])


def test_matrix_csv_roundtrip(tmp_path):
    A = custom_matrix(random_normal(np.random.default_rng(5), 6))
    path = tmp_path / "m.csv"
    save_matrix_csv(A, path)
    lines = path.read_text().splitlines()
    assert [len(line.split(",")) for line in lines] == list(range(1, 8))
    np.testing.assert_array_equal(load_matrix_csv(path).to_dense(), A.to_dense())


@pytest.mark.parametrize("name", sorted(WEIGHTS))
def test_weighted_mean_matrix_conditions(name):
    w = weight_partials(WEIGHTS[name](300))
    rep = check_matrix_conditions(weighted_mean_matrix(w), w)
    assert rep["M22"].verdict == "pass"
    assert rep["M23"].verdict == "pass"
    assert rep["M24"].witness.ratio_sup == 1.0
    assert rep["M24"].verdict == "bounded"
    # mathematically 1 - p_0/P_{n-1}; for fast-growing weights that rounds to 1
    assert rep["M25"].witness.ratio_sup <= 1.0 + 1e-12


def test_identity_with_unit_weights():
    # every row sums to 1, so M22 holds; the diagonal outgrows p_n/P_n instead
    w = weight_partials(np.ones(400))
    rep = check_matrix_conditions(identity_matrix(399), w)
    assert rep["M22"].verdict == "pass"
    assert rep["M23"].verdict == "pass"
    assert rep["M24"].verdict == "unbounded_trend"
    assert rep["M24"].witness.tail_slope == pytest.approx(1.0, abs=0.01)


def test_row_sum_violation_first_index():
    table = np.eye(8)
    table[3, 0] = 0.5
    table[5, 1] = 0.25
    rep = check_matrix_conditions(custom_matrix(table), weight_partials(np.ones(8)))
    assert rep["M22"].verdict == "fail"
    assert rep["M22"].first_violation == 3


def test_planted_column_violation_is_located():
    N = 12
    table = weighted_mean_matrix(weight_partials(np.ones(N + 1))).to_dense()
    table[5, 2] = table[4, 2] * 1.5
    rep = check_matrix_conditions(custom_matrix(table), weight_partials(np.ones(N + 1)))
    assert rep["M23"].verdict == "fail"
    assert rep["M23"].first_violation == (5, 2)


def test_matrix_conditions_reject_negative_entries():
    table = np.array([[1.0, 0, 0], [-0.1, 1.1, 0], [0.2, 0.3, 0.5]])
    with pytest.raises(DomainError, match=r"a\(1,0\)"):
        check_matrix_conditions(custom_matrix(table), weight_partials(np.ones(3)))
