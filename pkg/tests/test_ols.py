import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gasforecast import ols
from gasforecast.design import DesignMatrix, RegressorSpec, build_matrix
from gasforecast.errors import ConditioningWarning, DimensionMismatch, LabelMismatch, RankDeficient


def test_constant_column_gives_mean():
    a = ols.fit(np.ones((3, 1)), [4.5, 4.5, 4.5])
    assert a.values[0] == pytest.approx(4.5, rel=1e-15)


def test_exact_line():
    t = np.arange(10.0)
    F = DesignMatrix(np.column_stack([np.ones(10), t]), ("const", "t"))
    a = ols.fit(F, 2 + 3 * t)
    np.testing.assert_allclose(a.values, [2, 3], rtol=1e-12)
    assert a["t"] == pytest.approx(3)


def test_monte_carlo_recovery_within_4_standard_errors():
    # oracle: textbook standard errors from an explicit inverse of F'F
    sigma, failures = 0.5, 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        F = rng.standard_normal((500, 10))
        truth = rng.uniform(-5, 5, 10)
        S = F @ truth + sigma * rng.standard_normal(500)
        a = ols.fit(F, S)
        se = sigma * np.sqrt(np.diag(np.linalg.inv(F.T @ F)))
        failures += not (np.abs(a.values - truth) <= 4 * se).all()
    assert failures <= 1


def test_standard_errors_match_textbook_formula():
    rng = np.random.default_rng(3)
    F = rng.standard_normal((200, 6)) * [1, 10, 100, 1, 1, 0.01]
    S = F @ np.ones(6) + rng.standard_normal(200)
    a = ols.fit(F, S)
    r = S - F @ a.values
    s2 = r @ r / (200 - 6)
    np.testing.assert_allclose(a.standard_errors, np.sqrt(s2 * np.diag(np.linalg.inv(F.T @ F))), rtol=1e-8)


def test_predict_constant():
    a = ols.Coefficients([5.0], ("const",))
    F = DesignMatrix(np.ones((3, 1)), ("const",))
    assert ols.predict(F, a).tolist() == [5.0, 5.0, 5.0]


def test_in_sample_residuals_orthogonal():
    spec = RegressorSpec(include_temperature=True)
    rng = np.random.default_rng(0)
    n = 3 * 364
    F = build_matrix(spec, n, temperature=rng.normal(10, 8, n))
    S = rng.normal(100, 10, n)
    a = ols.fit(F, S)
    r = S - ols.predict(F, a)
    assert np.abs(F.columns.T @ r).max() <= 1e-8 * np.abs(F.columns.T @ S).max()


def test_label_mismatch():
    a = ols.Coefficients([1.0, 2.0, 3.0], ("a", "b", "c"))
    with pytest.raises(LabelMismatch):
        ols.predict(np.ones((4, 2)), a)
    with pytest.raises(LabelMismatch):
        ols.predict(DesignMatrix(np.ones((4, 3)), ("a", "b", "d")), a)


def test_duplicate_column_is_rank_deficient():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((50, 3))
    F = DesignMatrix(np.column_stack([X, X[:, 1]]), ("a", "b", "c", "b_again"))
    with pytest.raises(RankDeficient) as err:
        ols.fit(F, rng.standard_normal(50))
    assert err.value.label == "b_again"


def test_zero_column_is_rank_deficient():
    F = DesignMatrix(np.column_stack([np.ones(5), np.zeros(5)]), ("const", "Td"))
    with pytest.raises(RankDeficient) as err:
        ols.fit(F, np.arange(5.0))
    assert err.value.label == "Td"


def test_ill_conditioning_warns():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(100)
    F = np.column_stack([x, x + 1e-12 * rng.standard_normal(100)])
    with pytest.warns(ConditioningWarning):
        a = ols.fit(F, x)
    assert a.condition_estimate > ols.WARN_CONDITION


def test_dimension_errors():
    with pytest.raises(DimensionMismatch):
        ols.fit(np.ones((3, 1)), [1.0, 2.0])
    with pytest.raises(DimensionMismatch):
        ols.fit(np.ones((2, 3)), [1.0, 2.0])


def test_long_raw_t_modulation_is_well_conditioned():
    # 16 years of daily rows with raw-t modulation columns
    spec = RegressorSpec(include_temperature=True)
    n = 16 * 365
    rng = np.random.default_rng(5)
    F = build_matrix(spec, n, temperature=rng.normal(12, 8, n))
    with warnings.catch_warnings():
        warnings.simplefilter("error", ConditioningWarning)
        a = ols.fit(F, rng.normal(100, 5, n))
    assert a.condition_estimate < 1e3


@given(st.integers(0, 10_000), st.floats(-1e3, 1e3).filter(lambda c: abs(c) > 1e-3))
@settings(max_examples=30)
def test_scale_equivariance(seed, c):
    rng = np.random.default_rng(seed)
    F = rng.standard_normal((40, 4))
    S = rng.standard_normal(40)
    np.testing.assert_allclose(ols.fit(F, c * S).values, c * ols.fit(F, S).values, rtol=1e-9, atol=1e-12 * abs(c))


@given(st.integers(0, 10_000))
@settings(max_examples=30)
def test_local_optimality(seed):
    rng = np.random.default_rng(seed)
    F = rng.standard_normal((60, 5))
    S = rng.standard_normal(60)
    a = ols.fit(F, S).values
    best = np.sum((F @ a - S) ** 2)
    for _ in range(20):
        assert np.sum((F @ (a + 1e-3 * rng.standard_normal(5)) - S) ** 2) >= best


def test_coefficient_csv_round_trip():
    a = ols.Coefficients([0.1, -2.5e-7, 1 / 3], ("const", "t", "t*sinA1"))
    b, comments = ols.parse_coefficients(ols.format_coefficients(a, ["kind=fset"]))
    assert b.labels == a.labels and np.array_equal(b.values, a.values)
    assert comments == ["kind=fset"]
