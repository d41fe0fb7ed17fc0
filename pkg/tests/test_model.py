"""Specification types: parsing, coefficient formulas, penalty weights."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from icx import (
    ErrorSpec,
    InitSpec,
    ModelSpec,
    PenaltySpec,
    parse_error,
    parse_init,
    parse_model,
    parse_penalty,
)


def test_coefficient_formulas():
    assert ModelSpec("ur").rho_n(100) == 1.0
    assert ModelSpec("ltue", c=1.0).rho_n(100) == 1.01
    assert ModelSpec("ltue", c=2.5).rho_n(50) == 1.05
    assert_allclose(ModelSpec("me", alpha=0.5).rho_n(100), 1.1, rtol=1e-15)
    assert_allclose(ModelSpec("me", alpha=0.3).rho_n(1000), 1.0 + 1000.0 ** (-0.7), rtol=1e-15)
    assert ModelSpec("ex", rho=1.05).rho_n(100) == 1.05
    assert ModelSpec("ex", rho=1.05).rho_n(7) == 1.05


def test_local_drift_matches_fixed_coefficient_at_one_size():
    # c/n = 1/100 makes these the same process at n = 100 only.
    assert ModelSpec("ltue", c=1.0).rho_n(100) == ModelSpec("ex", rho=1.01).rho_n(100)
    assert ModelSpec("ltue", c=1.0).rho_n(200) != ModelSpec("ex", rho=1.01).rho_n(200)


def test_explosive_flag():
    assert not ModelSpec("ur").explosive
    assert ModelSpec("ltue", c=1.0).explosive
    assert ModelSpec("me", alpha=0.3).explosive
    assert ModelSpec("ex", rho=1.05).explosive


def test_mildly_explosive_gap_shrinks_with_n():
    model = ModelSpec("me", alpha=0.3)
    gaps = [model.rho_n(n) - 1.0 for n in (10, 100, 1000, 10000)]
    assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))
    assert all(gap > 0 for gap in gaps)


def test_model_parse_round_trip():
    for text in ("ur", "ltue:c=1", "me:alpha=0.3", "ex:rho=1.05"):
        model = parse_model(text)
        assert model.label() == text
        assert parse_model(model.label()) == model


def test_model_labels_are_canonical():
    assert ModelSpec("ex", rho=1.050).label() == "ex:rho=1.05"
    assert ModelSpec("ltue", c=1.0).label() == "ltue:c=1"
    assert parse_model("ex:rho=1.0500").label() == "ex:rho=1.05"


def test_model_validation():
    with pytest.raises(ValueError):
        ModelSpec("ltue")
    with pytest.raises(ValueError):
        ModelSpec("ur", c=1.0)
    with pytest.raises(ValueError):
        ModelSpec("ltue", c=0.0)
    with pytest.raises(ValueError):
        ModelSpec("me", alpha=0.0)
    with pytest.raises(ValueError):
        ModelSpec("me", alpha=1.0)
    with pytest.raises(ValueError):
        ModelSpec("ex", rho=1.0)
    with pytest.raises(ValueError):
        ModelSpec("garch")
    with pytest.raises(ValueError):
        ModelSpec("ur").rho_n(0)


def test_model_parse_errors():
    for text in (
        "",
        "ltue:",
        "ltue:c=abc",
        "me:beta=1",
        "me:alpha=0.3,alpha=0.4",
        "wavelet:c=1",
        "ltue:c",
        "ex:rho=1.05,extra=2",
    ):
        with pytest.raises(ValueError):
            parse_model(text)


def test_error_spec_defaults_and_weight():
    error = ErrorSpec()
    assert error.kind == "iid"
    assert error.sigma2 == 1.0
    assert error.coeffs == (1.0,)
    assert error.long_run_weight == 1.0
    ma = ErrorSpec(kind="ma", coeffs=(1.0, 0.5))
    assert ma.long_run_weight == 2.25
    assert ErrorSpec(kind="ma", coeffs=(1.0, 0.5, 0.25)).long_run_weight == 1.75**2


def test_error_spec_validation():
    with pytest.raises(ValueError):
        ErrorSpec(kind="ma", coeffs=(1.0,))
    with pytest.raises(ValueError):
        ErrorSpec(kind="ma", coeffs=(0.5, 0.5))
    with pytest.raises(ValueError):
        ErrorSpec(kind="ma", coeffs=(1.0, -1.0))
    with pytest.raises(ValueError):
        ErrorSpec(sigma2=-1.0)
    with pytest.raises(ValueError):
        ErrorSpec(kind="iid", coeffs=(1.0, 0.5))
    with pytest.raises(ValueError):
        ErrorSpec(kind="white")
    # Zero variance is a legal testing hook at this layer.
    assert ErrorSpec(sigma2=0.0).sigma2 == 0.0


def test_error_parse_round_trip():
    error = parse_error("ma:coeffs=1;0.5")
    assert error.kind == "ma"
    assert error.coeffs == (1.0, 0.5)
    assert error.sigma2 == 1.0
    scaled = parse_error("ma:coeffs=1;0.5,sigma2=2")
    assert scaled.sigma2 == 2.0
    for spec in (ErrorSpec(), ErrorSpec(sigma2=2.0), ErrorSpec(kind="ma", coeffs=(1.0, 0.5))):
        assert parse_error(spec.label()) == spec
    with pytest.raises(ValueError):
        parse_error("ma")
    with pytest.raises(ValueError):
        parse_error("iid:coeffs=1;0.5")


def test_presample_depths():
    assert InitSpec().presample_depth(100) == 0
    recent = InitSpec(kind="recent", theta=0.5)
    assert recent.presample_depth(25) == 5
    assert recent.presample_depth(99) == 9
    assert recent.presample_depth(100) == 10
    distant = InitSpec(kind="distant", tau=0.5)
    assert distant.presample_depth(100) == 50
    assert InitSpec(kind="distant", tau=1.0).presample_depth(100) == 100
    infinite = InitSpec(kind="infinite")
    assert infinite.growth == 1.5
    assert infinite.presample_depth(100) == 1000
    assert parse_init("infinite").growth == 1.5


def test_presample_depth_trends():
    # Scaled depth separates the three random classes on any n grid.
    sizes = np.array([10, 100, 1000, 10000])
    recent = np.array([InitSpec(kind="recent", theta=0.5).presample_depth(n) for n in sizes])
    distant = np.array([InitSpec(kind="distant", tau=0.5).presample_depth(n) for n in sizes])
    infinite = np.array([InitSpec(kind="infinite").presample_depth(n) for n in sizes])
    recent_ratio = recent / sizes
    assert np.all(np.diff(recent_ratio) < 0)
    assert np.all(np.abs(distant / sizes - 0.5) <= 1.0 / sizes)
    infinite_ratio = infinite / sizes
    assert np.all(np.diff(infinite_ratio) > 0)
    assert np.all(recent >= 0) and np.all(distant >= 0) and np.all(infinite >= 0)


def test_init_validation():
    with pytest.raises(ValueError):
        InitSpec(kind="recent")
    with pytest.raises(ValueError):
        InitSpec(kind="recent", theta=1.0)
    with pytest.raises(ValueError):
        InitSpec(kind="distant", tau=0.0)
    with pytest.raises(ValueError):
        InitSpec(kind="infinite", growth=1.0)
    with pytest.raises(ValueError):
        InitSpec(kind="zero", theta=0.5)
    with pytest.raises(ValueError):
        InitSpec(kind="warm")
    with pytest.raises(ValueError):
        InitSpec().presample_depth(0)


def test_init_parse_round_trip():
    for text in ("zero", "recent:theta=0.5", "distant:tau=0.5", "infinite:growth=1.5"):
        init = parse_init(text)
        assert init.label() == text
        assert parse_init(init.label()) == init


def test_penalty_values():
    assert PenaltySpec("aic").value(10) == 2.0
    assert PenaltySpec("aic").value(10**6) == 2.0
    assert_allclose(PenaltySpec("bic").value(100), 4.605170185988092, rtol=1e-15)
    assert_allclose(PenaltySpec("hqic").value(100), 3.0543592516158022, rtol=1e-15)
    assert PenaltySpec("pow", gamma=0.5).value(100) == 10.0


def test_penalty_positive_on_admissible_sizes():
    specs = [
        PenaltySpec("aic"),
        PenaltySpec("bic"),
        PenaltySpec("hqic"),
        PenaltySpec("pow", gamma=0.1),
        PenaltySpec("pow", gamma=0.9),
    ]
    for spec in specs:
        for n in (3, 4, 10, 100, 10000):
            assert spec.value(n) > 0


def test_penalty_validation():
    with pytest.raises(ValueError):
        PenaltySpec("bic").value(1)
    with pytest.raises(ValueError):
        PenaltySpec("hqic").value(2)
    with pytest.raises(ValueError):
        PenaltySpec("pow")
    with pytest.raises(ValueError):
        PenaltySpec("pow", gamma=1.0)
    with pytest.raises(ValueError):
        PenaltySpec("aic", gamma=0.5)
    with pytest.raises(ValueError):
        PenaltySpec("mdl")
    with pytest.raises(ValueError):
        PenaltySpec("aic").value(0)


def test_penalty_parse_round_trip():
    for text in ("aic", "bic", "hqic", "pow:gamma=0.5"):
        penalty = parse_penalty(text)
        assert penalty.label() == text
        assert parse_penalty(penalty.label()) == penalty
    with pytest.raises(ValueError):
        parse_penalty("bic:gamma=0.5")


def test_hqic_needs_log_log_to_be_positive():
    # log log 3 > 0 > log log 2, so 3 is the smallest admissible size.
    assert PenaltySpec("hqic").value(3) == 2.0 * math.log(math.log(3.0))
    assert PenaltySpec("hqic").value(3) > 0
