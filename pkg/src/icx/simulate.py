"""Path simulation for the autoregressive model families.

A path of length ``n`` is ``X_0, X_1, ..., X_n`` with
``X_t = rho_n * X_{t-1} + u_t`` driven by the configured error process.
The starting value accumulates pre-sample errors according to the
initialization class; the accumulation uses a stream independent of the
in-sample errors so deep starts do not perturb the sample itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .exceptions import PathOverflowError
from .model import ErrorSpec, InitSpec, ModelSpec
from .seeding import STREAM_PRESAMPLE, STREAM_SAMPLE, generator

# Replication block size for batch generation, bounds peak memory.
CHUNK_REPS = 2048


@dataclass(frozen=True)
class SeriesSample:
    """One simulated path together with its generating configuration."""

    values: np.ndarray
    model: ModelSpec
    error: ErrorSpec
    init: InitSpec
    seed: int

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("a series needs at least a start value and one observation")

    @property
    def n(self) -> int:
        """Number of observations after the starting value."""
        return self.values.size - 1

    @property
    def x0(self) -> float:
        return float(self.values[0])


def draw_errors(error: ErrorSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` consecutive error terms from their stationary law.

    Moving-average errors burn ``len(coeffs) - 1`` extra leading
    innovations so the first returned term already carries full history.
    """
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    scale = math.sqrt(error.sigma2)
    depth = len(error.coeffs) - 1
    eps = rng.standard_normal(count + depth) * scale
    if depth == 0:
        return eps
    u = lfilter(list(error.coeffs), [1.0], eps)
    return u[depth:]


def initial_value(
    error: ErrorSpec, init: InitSpec, n: int, rng: np.random.Generator
) -> float:
    """Starting value: the sum of ``presample_depth(n) + 1`` pre-sample errors.

    The ``zero`` class returns 0.0 without consuming any randomness.
    """
    if init.kind == "zero":
        return 0.0
    depth = init.presample_depth(n)
    return float(draw_errors(error, depth + 1, rng).sum())


def _recurse(rho: float, u: np.ndarray, x0: np.ndarray | float) -> np.ndarray:
    """Accumulate X_t = rho X_{t-1} + u_t along the last axis, X_0 given."""
    v = np.array(u, dtype=float, copy=True)
    v[..., 0] += rho * np.asarray(x0, dtype=float)
    return lfilter([1.0], [1.0, -rho], v, axis=-1)


def generate_path(
    model: ModelSpec,
    error: ErrorSpec,
    init: InitSpec,
    n: int,
    seed: int,
    x0_override: float | None = None,
) -> SeriesSample:
    """Simulate one path of length ``n`` (n >= 3).

    Parameters
    ----------
    model, error, init : specification dataclasses
        The data-generating configuration.
    n : int
        Number of observations after the start; at least 3.
    seed : int
        Path-level seed; pre-sample and in-sample streams are derived
        from it with distinct tags.
    x0_override : float, optional
        Fixed starting value replacing the drawn one, a testing hook.

    Raises
    ------
    PathOverflowError
        If the recursion leaves the float range.
    """
    if n < 3:
        raise ValueError(f"path length must be at least 3, got {n}")
    rho = model.rho_n(n)
    if x0_override is not None:
        x0 = float(x0_override)
    else:
        x0 = initial_value(error, init, n, generator(seed, STREAM_PRESAMPLE))
    u = draw_errors(error, n, generator(seed, STREAM_SAMPLE))
    path = _recurse(rho, u, x0)
    values = np.concatenate([[x0], path])
    if not np.all(np.isfinite(values)):
        first = int(np.argmax(~np.isfinite(values)))
        raise PathOverflowError(
            f"path left the float range at t={first} (rho={rho}, n={n}, seed={seed})"
        )
    return SeriesSample(values=values, model=model, error=error, init=init, seed=seed)


def path_batch(
    model: ModelSpec,
    error: ErrorSpec,
    init: InitSpec,
    n: int,
    keys: np.ndarray,
) -> np.ndarray:
    """Simulate one path per key, shape ``(len(keys), n + 1)``.

    Unlike :func:`generate_path` this does not raise on overflow; rows
    may contain non-finite values and the caller decides how to treat
    them (experiment cells count such rows as degenerate).
    """
    return path_batch_rho(model.rho_n(n), error, init, n, keys)


def path_batch_rho(
    rho: float,
    error: ErrorSpec,
    init: InitSpec,
    n: int,
    keys: np.ndarray,
) -> np.ndarray:
    """Like :func:`path_batch` but with the coefficient given directly."""
    if n < 3:
        raise ValueError(f"path length must be at least 3, got {n}")
    keys = np.asarray(keys, dtype=np.uint64)
    reps = keys.size
    out = np.empty((reps, n + 1))
    for start in range(0, reps, CHUNK_REPS):
        block = keys[start : start + CHUNK_REPS]
        m = block.size
        u = np.empty((m, n))
        x0 = np.empty(m)
        for i, key in enumerate(block):
            u[i] = draw_errors(error, n, generator(int(key), STREAM_SAMPLE))
            x0[i] = initial_value(error, init, n, generator(int(key), STREAM_PRESAMPLE))
        with np.errstate(over="ignore", invalid="ignore"):
            out[start : start + m, 0] = x0
            out[start : start + m, 1:] = _recurse(rho, u, x0)
    return out


def aligned_trajectories(
    models: list[ModelSpec],
    n: int,
    seed: int,
    error: ErrorSpec | None = None,
) -> tuple[list[str], np.ndarray]:
    """Paths for several models driven by one shared error stream.

    All models start at zero and consume identical errors, so the
    trajectories differ only through their coefficients.  Returns the
    model labels and an array of shape ``(n + 1, len(models))``.
    """
    if n < 3:
        raise ValueError(f"path length must be at least 3, got {n}")
    if error is None:
        error = ErrorSpec()
    u = draw_errors(error, n, generator(seed, STREAM_SAMPLE))
    columns = np.empty((n + 1, len(models)))
    for j, model in enumerate(models):
        columns[1:, j] = _recurse(model.rho_n(n), u, 0.0)
    columns[0, :] = 0.0
    if not np.all(np.isfinite(columns)):
        raise PathOverflowError(f"trajectory overflow at n={n}")
    return [model.label() for model in models], columns
