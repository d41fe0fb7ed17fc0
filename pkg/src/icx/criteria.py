"""Order selection between the unit-root and fitted-coefficient models.

The criterion for order ``k`` is ``log sigma2_k + k p_n / n`` with the
restricted model at ``k = 0`` and the one-parameter fit at ``k = 1``.
Ties prefer the unit root, so the parameter is added only when it pays
for itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .estimate import BindingTable, FitResult, default_binding_table, indirect_fit, ols_fit
from .exceptions import DegenerateSeriesError
from .model import PenaltySpec, parse_penalty

ESTIMATORS = ("ols", "iie")


def information_criterion(sigma2: float, k: int, penalty_value: float, n: int) -> float:
    """Criterion value ``log sigma2 + k penalty_value / n``.

    Raises
    ------
    DegenerateSeriesError
        If ``sigma2`` is not strictly positive; the log is undefined
        and the series carries no usable signal.
    """
    if k not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {k}")
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    if not penalty_value > 0:
        raise ValueError(f"penalty value must be positive, got {penalty_value}")
    if not sigma2 > 0:
        raise DegenerateSeriesError(f"residual variance must be positive, got {sigma2}")
    return math.log(sigma2) + k * penalty_value / n


def choose_order(ic0: float, ic1: float) -> int:
    """Order with the smaller criterion; a tie keeps the unit root."""
    return 0 if ic0 <= ic1 else 1


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of one criterion comparison."""

    k_hat: int
    ic0: float
    ic1: float
    penalty: str
    estimator: str
    fit: FitResult


def select(
    series,
    estimator: str = "ols",
    penalty: PenaltySpec | str = "aic",
    table: BindingTable | None = None,
) -> SelectionResult:
    """Fit a series and pick the order under one penalty.

    Parameters
    ----------
    series : SeriesSample or array-like
        Path ``X_0, ..., X_n``.
    estimator : str
        ``ols`` or ``iie``; the latter applies the binding correction
        to the coefficient before computing the fitted variance.
    penalty : PenaltySpec or str
        Penalty specification or its string form.
    table : BindingTable, optional
        Binding table for ``iie``; the shared default is built on first
        use when omitted.
    """
    if estimator not in ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}, expected one of {ESTIMATORS}")
    if isinstance(penalty, str):
        penalty = parse_penalty(penalty)
    if estimator == "ols":
        fit = ols_fit(series)
    else:
        fit = indirect_fit(series, table if table is not None else default_binding_table())
    p_n = penalty.value(fit.n)
    ic0 = information_criterion(fit.sigma2_restricted, 0, p_n, fit.n)
    ic1 = information_criterion(fit.sigma2_fitted, 1, p_n, fit.n)
    return SelectionResult(
        k_hat=choose_order(ic0, ic1),
        ic0=ic0,
        ic1=ic1,
        penalty=penalty.label(),
        estimator=estimator,
        fit=fit,
    )
