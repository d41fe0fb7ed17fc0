"""Criterion values, the tie rule, and the selection front end."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from icx import (
    DegenerateSeriesError,
    ErrorSpec,
    InitSpec,
    ModelSpec,
    PenaltySpec,
    choose_order,
    generate_path,
    information_criterion,
    select,
)


def test_information_criterion_worked_example():
    value = information_criterion(0.5, 1, 2.0, 100)
    assert_allclose(value, -0.6731471805599453, rtol=0, atol=1e-15)
    assert information_criterion(0.5, 0, 2.0, 100) == math.log(0.5)


def test_information_criterion_validation():
    with pytest.raises(DegenerateSeriesError):
        information_criterion(0.0, 0, 2.0, 100)
    with pytest.raises(DegenerateSeriesError):
        information_criterion(-1.0, 0, 2.0, 100)
    with pytest.raises(ValueError):
        information_criterion(0.5, 2, 2.0, 100)
    with pytest.raises(ValueError):
        information_criterion(0.5, 1, 0.0, 100)
    with pytest.raises(ValueError):
        information_criterion(0.5, 1, 2.0, 0)


def test_tie_keeps_the_unit_root():
    assert choose_order(1.5, 1.5) == 0
    assert choose_order(1.5, 1.4) == 1
    assert choose_order(1.4, 1.5) == 0


def test_select_worked_example():
    result = select([0.0, 1.0, 2.0], estimator="ols", penalty="aic")
    assert result.fit.rho_hat == 2.0
    assert result.ic0 == 0.0
    assert_allclose(result.ic1, 0.3068528194400547, rtol=0, atol=1e-15)
    assert result.k_hat == 0
    assert result.penalty == "aic"
    assert result.estimator == "ols"


def test_select_flat_step_is_a_tie():
    # rho_hat = 1 makes both variances equal; the penalty breaks the tie
    # toward the unit root.
    result = select([0.0, 1.0, 1.0], estimator="ols", penalty="aic")
    assert result.fit.rho_hat == 1.0
    assert result.ic1 > result.ic0
    assert result.k_hat == 0


def test_select_accepts_penalty_objects(table):
    x = generate_path(ModelSpec("ur"), ErrorSpec(), InitSpec(), 50, seed=1)
    result = select(x, estimator="ols", penalty=PenaltySpec("pow", gamma=0.5))
    assert result.penalty == "pow:gamma=0.5"
    corrected = select(x, estimator="iie", penalty="bic", table=table)
    assert corrected.fit.estimator == "iie"
    assert corrected.k_hat in (0, 1)


def test_select_scale_invariance_fuzz(table):
    rng = np.random.default_rng(0x1C5CA1E)
    for estimator in ("ols", "iie"):
        for _ in range(10):
            n = int(rng.integers(20, 80))
            u = rng.standard_normal(n)
            x = np.concatenate([[0.0], np.cumsum(u)])
            s = float(10.0 ** rng.uniform(-2, 2))
            base = select(x, estimator=estimator, penalty="aic", table=table)
            scaled = select(s * x, estimator=estimator, penalty="aic", table=table)
            assert scaled.k_hat == base.k_hat
            assert_allclose(
                scaled.ic1 - scaled.ic0, base.ic1 - base.ic0, rtol=1e-9, atol=1e-12
            )


def test_select_validation():
    with pytest.raises(ValueError):
        select([0.0, 1.0, 2.0], estimator="mle")
    with pytest.raises(ValueError):
        select([0.0, 1.0, 2.0], penalty="gic")
    with pytest.raises(DegenerateSeriesError):
        select(np.zeros(8))


def test_select_separates_regimes_on_long_samples(table):
    flat = generate_path(ModelSpec("ur"), ErrorSpec(), InitSpec(), 500, seed=42)
    grown = generate_path(ModelSpec("ex", rho=1.05), ErrorSpec(), InitSpec(), 500, seed=42)
    for estimator in ("ols", "iie"):
        assert select(flat, estimator=estimator, penalty="bic", table=table).k_hat == 0
        assert select(grown, estimator=estimator, penalty="bic", table=table).k_hat == 1
