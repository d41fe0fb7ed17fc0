"""Specification types for the data-generating processes under study.

Four ingredients fully describe an experiment cell: the autoregressive
model class (unit root or one of three explosive parameterizations),
the error process, the initialization scheme, and the information
criterion penalty.  Each is a small frozen dataclass with a canonical
string form used in configs, reports, and seed derivation.

The string mini-grammar is ``kind`` or ``kind:key=value,key=value``,
for example ``ur``, ``ltue:c=1``, ``me:alpha=0.3``, ``ex:rho=1.05``,
``pow:gamma=0.5``, ``ma:coeffs=1;0.5``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

MODEL_KINDS = ("ur", "ltue", "me", "ex")
ERROR_KINDS = ("iid", "ma")
INIT_KINDS = ("zero", "recent", "distant", "infinite")
PENALTY_KINDS = ("aic", "bic", "hqic", "pow")


def _fmt(value: float) -> str:
    """Compact canonical rendering of a parameter value."""
    return format(float(value), ".12g")


def _parse_spec_string(text: str, what: str) -> tuple[str, dict[str, str]]:
    """Split ``kind:key=val,key=val`` into a kind and raw parameter map."""
    text = text.strip()
    if not text:
        raise ValueError(f"empty {what} specification")
    kind, sep, rest = text.partition(":")
    kind = kind.strip().lower()
    params: dict[str, str] = {}
    if sep and not rest.strip():
        raise ValueError(f"{what} specification {text!r} has a trailing colon")
    if rest:
        for part in rest.split(","):
            key, eq, value = part.partition("=")
            key = key.strip().lower()
            if not eq or not key or not value.strip():
                raise ValueError(
                    f"malformed parameter {part!r} in {what} specification {text!r}"
                )
            if key in params:
                raise ValueError(
                    f"duplicate parameter {key!r} in {what} specification {text!r}"
                )
            params[key] = value.strip()
    return kind, params


def _as_float(raw: str, key: str, context: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"parameter {key}={raw!r} in {context!r} is not a number") from None


def _reject_extras(params: dict[str, str], allowed: tuple[str, ...], context: str) -> None:
    extras = sorted(set(params) - set(allowed))
    if extras:
        raise ValueError(f"unknown parameter(s) {extras} for {context!r}")


@dataclass(frozen=True)
class ModelSpec:
    """Autoregressive coefficient family indexed by the sample size.

    Parameters
    ----------
    kind : str
        One of ``ur`` (coefficient one), ``ltue`` (one plus ``c / n``),
        ``me`` (one plus ``n**(alpha - 1)``), ``ex`` (fixed ``rho``).
    c : float, optional
        Drift constant for ``ltue``, must be positive.
    alpha : float, optional
        Rate exponent for ``me``, must lie strictly in (0, 1).
    rho : float, optional
        Fixed coefficient for ``ex``, must exceed one.
    """

    kind: str
    c: float | None = None
    alpha: float | None = None
    rho: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}, expected one of {MODEL_KINDS}")
        needed = {"ur": (), "ltue": ("c",), "me": ("alpha",), "ex": ("rho",)}[self.kind]
        for name in ("c", "alpha", "rho"):
            value = getattr(self, name)
            if name in needed and value is None:
                raise ValueError(f"model kind {self.kind!r} requires parameter {name!r}")
            if name not in needed and value is not None:
                raise ValueError(f"model kind {self.kind!r} does not take parameter {name!r}")
        if self.kind == "ltue" and not self.c > 0:
            raise ValueError(f"ltue drift must be positive, got c={self.c}")
        if self.kind == "me" and not 0 < self.alpha < 1:
            raise ValueError(f"me exponent must lie in (0, 1), got alpha={self.alpha}")
        if self.kind == "ex" and not self.rho > 1:
            raise ValueError(f"ex coefficient must exceed one, got rho={self.rho}")

    def rho_n(self, n: int) -> float:
        """Autoregressive coefficient at sample size ``n`` (n >= 1)."""
        if n < 1:
            raise ValueError(f"sample size must be positive, got {n}")
        if self.kind == "ur":
            return 1.0
        if self.kind == "ltue":
            return 1.0 + self.c / n
        if self.kind == "me":
            return 1.0 + float(n) ** (self.alpha - 1.0)
        return float(self.rho)

    @property
    def explosive(self) -> bool:
        """True for every kind except the unit root."""
        return self.kind != "ur"

    def label(self) -> str:
        """Canonical string form, parseable by :func:`parse_model`."""
        if self.kind == "ur":
            return "ur"
        if self.kind == "ltue":
            return f"ltue:c={_fmt(self.c)}"
        if self.kind == "me":
            return f"me:alpha={_fmt(self.alpha)}"
        return f"ex:rho={_fmt(self.rho)}"


def parse_model(text: str) -> ModelSpec:
    """Parse a model specification string such as ``me:alpha=0.3``."""
    kind, params = _parse_spec_string(text, "model")
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r} in {text!r}, expected one of {MODEL_KINDS}")
    allowed = {"ur": (), "ltue": ("c",), "me": ("alpha",), "ex": ("rho",)}[kind]
    _reject_extras(params, allowed, text)
    values = {key: _as_float(raw, key, text) for key, raw in params.items()}
    return ModelSpec(kind=kind, **values)


@dataclass(frozen=True)
class ErrorSpec:
    """Innovation process: iid Gaussian or a finite moving average of one.

    ``coeffs`` are the moving-average weights applied to iid Gaussian
    innovations with variance ``sigma2``.  The leading weight is pinned
    to one so the weight scale is identified separately from ``sigma2``.
    Zero variance is permitted as a closed-form testing hook only; the
    configuration layer rejects it for real experiments.
    """

    kind: str = "iid"
    sigma2: float = 1.0
    coeffs: tuple[float, ...] = (1.0,)

    def __post_init__(self) -> None:
        if self.kind not in ERROR_KINDS:
            raise ValueError(f"unknown error kind {self.kind!r}, expected one of {ERROR_KINDS}")
        if not self.sigma2 >= 0:
            raise ValueError(f"innovation variance must be nonnegative, got {self.sigma2}")
        coeffs = tuple(float(v) for v in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if self.kind == "iid" and coeffs != (1.0,):
            raise ValueError("iid errors take no moving-average coefficients")
        if self.kind == "ma":
            if len(coeffs) < 2:
                raise ValueError("ma errors need at least two coefficients")
            if coeffs[0] != 1.0:
                raise ValueError(f"leading moving-average weight must be one, got {coeffs[0]}")
            if sum(coeffs) == 0.0:
                raise ValueError("moving-average weights must not sum to zero")

    @property
    def long_run_weight(self) -> float:
        """Squared sum of the moving-average weights."""
        return sum(self.coeffs) ** 2

    def label(self) -> str:
        parts = []
        if self.kind == "ma":
            parts.append("coeffs=" + ";".join(_fmt(v) for v in self.coeffs))
        if self.sigma2 != 1.0:
            parts.append(f"sigma2={_fmt(self.sigma2)}")
        return self.kind + (":" + ",".join(parts) if parts else "")


def parse_error(text: str) -> ErrorSpec:
    """Parse an error specification string such as ``ma:coeffs=1;0.5``."""
    kind, params = _parse_spec_string(text, "error")
    if kind not in ERROR_KINDS:
        raise ValueError(f"unknown error kind {kind!r} in {text!r}, expected one of {ERROR_KINDS}")
    _reject_extras(params, ("sigma2", "coeffs") if kind == "ma" else ("sigma2",), text)
    sigma2 = _as_float(params["sigma2"], "sigma2", text) if "sigma2" in params else 1.0
    if kind == "iid":
        return ErrorSpec(kind="iid", sigma2=sigma2)
    if "coeffs" not in params:
        raise ValueError(f"ma error specification {text!r} requires coeffs")
    coeffs = tuple(
        _as_float(piece, "coeffs", text) for piece in params["coeffs"].split(";") if piece.strip()
    )
    return ErrorSpec(kind="ma", sigma2=sigma2, coeffs=coeffs)


@dataclass(frozen=True)
class InitSpec:
    """Initial-condition class, expressed as a pre-sample accumulation depth.

    The starting value is the sum of ``presample_depth(n) + 1`` errors
    drawn before time zero; depth zero with the ``zero`` kind means a
    fixed start at the origin.  ``recent`` accumulates ``floor(n**theta)``
    terms, ``distant`` accumulates ``floor(tau * n)`` terms, and
    ``infinite`` accumulates ``floor(n**growth)`` terms with
    ``growth > 1`` so the depth dominates the sample size.
    """

    kind: str = "zero"
    theta: float | None = None
    tau: float | None = None
    growth: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in INIT_KINDS:
            raise ValueError(f"unknown init kind {self.kind!r}, expected one of {INIT_KINDS}")
        if self.kind == "infinite" and self.growth is None:
            object.__setattr__(self, "growth", 1.5)
        needed = {"zero": (), "recent": ("theta",), "distant": ("tau",), "infinite": ("growth",)}[
            self.kind
        ]
        for name in ("theta", "tau", "growth"):
            value = getattr(self, name)
            if name in needed and value is None:
                raise ValueError(f"init kind {self.kind!r} requires parameter {name!r}")
            if name not in needed and value is not None:
                raise ValueError(f"init kind {self.kind!r} does not take parameter {name!r}")
        if self.kind == "recent" and not 0 < self.theta < 1:
            raise ValueError(f"recent exponent must lie in (0, 1), got theta={self.theta}")
        if self.kind == "distant" and not self.tau > 0:
            raise ValueError(f"distant scale must be positive, got tau={self.tau}")
        if self.kind == "infinite" and not self.growth > 1:
            raise ValueError(f"infinite exponent must exceed one, got growth={self.growth}")

    def presample_depth(self, n: int) -> int:
        """Number of pre-sample error terms beyond the first (n >= 1)."""
        if n < 1:
            raise ValueError(f"sample size must be positive, got {n}")
        if self.kind == "zero":
            return 0
        if self.kind == "recent":
            return math.floor(float(n) ** self.theta)
        if self.kind == "distant":
            return math.floor(self.tau * n)
        return math.floor(float(n) ** self.growth)

    def label(self) -> str:
        if self.kind == "zero":
            return "zero"
        if self.kind == "recent":
            return f"recent:theta={_fmt(self.theta)}"
        if self.kind == "distant":
            return f"distant:tau={_fmt(self.tau)}"
        return f"infinite:growth={_fmt(self.growth)}"


def parse_init(text: str) -> InitSpec:
    """Parse an init specification string such as ``recent:theta=0.5``."""
    kind, params = _parse_spec_string(text, "init")
    if kind not in INIT_KINDS:
        raise ValueError(f"unknown init kind {kind!r} in {text!r}, expected one of {INIT_KINDS}")
    allowed = {"zero": (), "recent": ("theta",), "distant": ("tau",), "infinite": ("growth",)}[kind]
    _reject_extras(params, allowed, text)
    values = {key: _as_float(raw, key, text) for key, raw in params.items()}
    return InitSpec(kind=kind, **values)


@dataclass(frozen=True)
class PenaltySpec:
    """Information-criterion penalty weight as a function of sample size.

    ``aic`` uses 2, ``bic`` uses ``log n``, ``hqic`` uses
    ``2 log log n``, and ``pow`` uses ``n**gamma`` for a fixed
    ``gamma`` in (0, 1).  Natural logarithms throughout.
    """

    kind: str = "aic"
    gamma: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in PENALTY_KINDS:
            raise ValueError(
                f"unknown penalty kind {self.kind!r}, expected one of {PENALTY_KINDS}"
            )
        if self.kind == "pow":
            if self.gamma is None:
                raise ValueError("pow penalty requires parameter 'gamma'")
            if not 0 < self.gamma < 1:
                raise ValueError(f"pow exponent must lie in (0, 1), got gamma={self.gamma}")
        elif self.gamma is not None:
            raise ValueError(f"penalty kind {self.kind!r} does not take parameter 'gamma'")

    def value(self, n: int) -> float:
        """Penalty weight at sample size ``n``; must be strictly positive."""
        if n < 1:
            raise ValueError(f"sample size must be positive, got {n}")
        if self.kind == "aic":
            return 2.0
        if self.kind == "bic":
            if n < 2:
                raise ValueError(f"bic penalty needs n >= 2, got {n}")
            return math.log(n)
        if self.kind == "hqic":
            # log log n must be positive, so n must exceed e.
            if n < 3:
                raise ValueError(f"hqic penalty needs n >= 3, got {n}")
            return 2.0 * math.log(math.log(n))
        return float(n) ** self.gamma

    def label(self) -> str:
        if self.kind == "pow":
            return f"pow:gamma={_fmt(self.gamma)}"
        return self.kind


def parse_penalty(text: str) -> PenaltySpec:
    """Parse a penalty specification string such as ``pow:gamma=0.5``."""
    kind, params = _parse_spec_string(text, "penalty")
    if kind not in PENALTY_KINDS:
        raise ValueError(
            f"unknown penalty kind {kind!r} in {text!r}, expected one of {PENALTY_KINDS}"
        )
    _reject_extras(params, ("gamma",) if kind == "pow" else (), text)
    values = {key: _as_float(raw, key, text) for key, raw in params.items()}
    return PenaltySpec(kind=kind, **values)
