"""Monte Carlo experiment grid: cells, runner, config, and reports.

Cells sharing a data-generating process (model, sample size, error,
initialization) are evaluated on the same simulated paths, mirroring
how comparison tables hold the draws fixed across criteria and
estimators.  Replication seeds are derived from the base seed, a hash
of the group's canonical label, and the replication index alone, so
every frequency is invariant to chunking, the worker count, and the
assignment of groups to workers.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import time
import warnings
from dataclasses import dataclass, replace

import numpy as np
import tomli

from .estimate import BindingTable, _ols_batch, default_binding_table, invert_binding
from .exceptions import ConfigError, ExcessDegeneracyError, SaturationWarning
from .fileio import atomic_write_text
from .limits import penalty_ratio
from .model import (
    ErrorSpec,
    InitSpec,
    ModelSpec,
    PenaltySpec,
    parse_error,
    parse_init,
    parse_model,
    parse_penalty,
)
from .seeding import replication_keys, string_key
from .simulate import CHUNK_REPS, path_batch

ESTIMATORS = ("ols", "iie")

REPORT_HEADER = "model,n,estimator,criterion,penalty_ratio,freq,reps,excluded,seed"

# A cell excluding more than this share of replications fails the run.
MAX_EXCLUDED_SHARE = 0.01


@dataclass(frozen=True)
class Cell:
    """One experiment cell: model family, sample size, estimator, penalty."""

    model: ModelSpec
    n: int
    estimator: str
    penalty: PenaltySpec

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError(f"cell sample size must be at least 3, got {self.n}")
        if self.estimator not in ESTIMATORS:
            raise ValueError(
                f"unknown estimator {self.estimator!r}, expected one of {ESTIMATORS}"
            )

    def label(self) -> str:
        return f"{self.model.label()}/n={self.n}/{self.estimator}/{self.penalty.label()}"


@dataclass(frozen=True)
class ExperimentConfig:
    """Full experiment description.

    The error and initialization are shared by all cells.  Zero
    innovation variance is rejected here: it is a closed-form testing
    hook, not a runnable experiment.
    """

    cells: tuple[Cell, ...]
    reps: int = 10000
    error: ErrorSpec = ErrorSpec()
    init: InitSpec = InitSpec()
    base_seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "cells", tuple(self.cells))
        if not self.cells:
            raise ValueError("an experiment needs at least one cell")
        if self.reps < 1:
            raise ValueError(f"replication count must be positive, got {self.reps}")
        if self.workers < 1:
            raise ValueError(f"worker count must be positive, got {self.workers}")
        if not self.error.sigma2 > 0:
            raise ValueError("experiments require a positive innovation variance")


@dataclass(frozen=True)
class CellResult:
    """Correct-selection frequency and diagnostics for one cell.

    ``freq * reps`` is the integer success count; excluded
    replications (overflowed paths, zero residual variances) never
    count as successes and stay in the denominator.
    """

    cell: Cell
    freq: float
    reps: int
    excluded: int
    seed: int
    penalty_ratio: float | None


@dataclass(frozen=True)
class ExperimentReport:
    """Cell results in configuration order plus run metadata."""

    results: tuple[CellResult, ...]
    reps: int
    base_seed: int
    config_hash: str
    wall_time: float


def _group_label(model: ModelSpec, n: int, error: ErrorSpec, init: InitSpec) -> str:
    return f"{model.label()}|n={n}|{error.label()}|{init.label()}"


def _indirect_rho_batch(rho_hat: np.ndarray, n: int, table: BindingTable) -> np.ndarray:
    """Vectorized corrected coefficient, NaN rows passed through."""
    out = np.full_like(rho_hat, np.nan)
    good = np.isfinite(rho_hat)
    if not np.any(good):
        return out
    scaled = n * (rho_hat[good] - 1.0)
    corrected = np.empty_like(scaled)
    above = scaled >= table.h_values[-1]
    # The correction is the identity above the table; return rho_hat
    # itself so scalar and batch paths agree bit for bit.
    corrected[above] = rho_hat[good][above]
    if np.any(~above):
        corrected[~above] = 1.0 + invert_binding(scaled[~above], table) / n
    out[good] = corrected
    return out


def _evaluate_group(
    model: ModelSpec,
    n: int,
    entries: list[tuple[int, str, PenaltySpec]],
    reps: int,
    error: ErrorSpec,
    init: InitSpec,
    base_seed: int,
    table: BindingTable | None,
) -> dict[int, tuple[int, int]]:
    """Successes and exclusions per entry over shared paths.

    ``entries`` carries ``(cell_index, estimator, penalty)`` rows; the
    returned map is keyed by cell index.
    """
    keys = replication_keys(base_seed, string_key(_group_label(model, n, error, init)), reps)
    need_iie = any(estimator == "iie" for _, estimator, _ in entries)
    if need_iie and table is None:
        table = default_binding_table()
    truth = 1 if model.explosive else 0
    successes = {index: 0 for index, _, _ in entries}
    excluded = {index: 0 for index, _, _ in entries}
    for start in range(0, reps, CHUNK_REPS):
        block = keys[start : start + CHUNK_REPS]
        paths = path_batch(model, error, init, n, block)
        rho_hat, s2_restricted, s2_ols, bad = _ols_batch(paths)
        stats = {"ols": (s2_ols, bad | (s2_restricted <= 0) | (s2_ols <= 0))}
        if need_iie:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", SaturationWarning)
                rho_breve = _indirect_rho_batch(rho_hat, n, table)
            lag, cur = paths[:, :-1], paths[:, 1:]
            with np.errstate(invalid="ignore", over="ignore"):
                resid = cur - rho_breve[:, None] * lag
                s2_iie = np.einsum("ij,ij->i", resid, resid) / n
            bad_iie = bad | ~np.isfinite(s2_iie) | (s2_restricted <= 0) | (s2_iie <= 0)
            stats["iie"] = (s2_iie, bad_iie)
        for index, estimator, penalty in entries:
            s2_fitted, bad_est = stats[estimator]
            kept = ~bad_est
            ic0 = np.log(s2_restricted[kept])
            ic1 = np.log(s2_fitted[kept]) + penalty.value(n) / n
            if truth == 0:
                correct = ic0 <= ic1
            else:
                correct = ic1 < ic0
            successes[index] += int(np.count_nonzero(correct))
            excluded[index] += int(np.count_nonzero(bad_est))
    return {index: (successes[index], excluded[index]) for index, _, _ in entries}


def _evaluate_group_task(args):
    return args[0], _evaluate_group(*args[1:])


def run_cell(
    cell: Cell,
    reps: int,
    error: ErrorSpec | None = None,
    init: InitSpec | None = None,
    base_seed: int = 0,
    table: BindingTable | None = None,
) -> CellResult:
    """Evaluate a single cell; identical to its value inside a grid run."""
    if reps < 1:
        raise ValueError(f"replication count must be positive, got {reps}")
    error = error if error is not None else ErrorSpec()
    init = init if init is not None else InitSpec()
    counts = _evaluate_group(
        cell.model,
        cell.n,
        [(0, cell.estimator, cell.penalty)],
        reps,
        error,
        init,
        base_seed,
        table,
    )
    successes, excluded = counts[0]
    ratio = None
    if cell.model.kind != "ur":
        ratio = penalty_ratio(cell.model, cell.penalty, cell.n)
    return CellResult(
        cell=cell,
        freq=successes / reps,
        reps=reps,
        excluded=excluded,
        seed=base_seed,
        penalty_ratio=ratio,
    )


def _config_hash(config: ExperimentConfig) -> str:
    parts = [
        f"reps={config.reps}",
        f"base_seed={config.base_seed}",
        f"error={config.error.label()}",
        f"init={config.init.label()}",
    ]
    parts.extend(cell.label() for cell in config.cells)
    return hashlib.sha256("\n".join(parts).encode("utf-8")).hexdigest()[:12]


def run_experiment(
    config: ExperimentConfig, table: BindingTable | None = None
) -> ExperimentReport:
    """Run every cell, sharing paths within each data-generating group.

    Groups are dispatched to a process pool when ``workers`` exceeds
    one; frequencies do not depend on that choice.

    Raises
    ------
    ExcessDegeneracyError
        If any cell excludes more than one percent of its replications.
    """
    started = time.monotonic()
    if table is None and any(cell.estimator == "iie" for cell in config.cells):
        table = default_binding_table()
    groups: dict[tuple[str, int], list[tuple[int, str, PenaltySpec]]] = {}
    models: dict[tuple[str, int], ModelSpec] = {}
    for index, cell in enumerate(config.cells):
        key = (cell.model.label(), cell.n)
        groups.setdefault(key, []).append((index, cell.estimator, cell.penalty))
        models[key] = cell.model
    tasks = [
        (
            key,
            models[key],
            key[1],
            entries,
            config.reps,
            config.error,
            config.init,
            config.base_seed,
            table,
        )
        for key, entries in groups.items()
    ]
    counts: dict[int, tuple[int, int]] = {}
    if config.workers == 1 or len(tasks) == 1:
        for task in tasks:
            counts.update(_evaluate_group(*task[1:]))
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=config.workers) as pool:
            for _, group_counts in pool.map(_evaluate_group_task, tasks):
                counts.update(group_counts)
    results = []
    offenders = []
    for index, cell in enumerate(config.cells):
        successes, excluded = counts[index]
        ratio = None
        if cell.model.kind != "ur":
            ratio = penalty_ratio(cell.model, cell.penalty, cell.n)
        result = CellResult(
            cell=cell,
            freq=successes / config.reps,
            reps=config.reps,
            excluded=excluded,
            seed=config.base_seed,
            penalty_ratio=ratio,
        )
        results.append(result)
        if excluded > MAX_EXCLUDED_SHARE * config.reps:
            offenders.append(f"{cell.label()} excluded {excluded}/{config.reps}")
    if offenders:
        raise ExcessDegeneracyError(
            "degenerate replications above the 1% limit: " + "; ".join(offenders)
        )
    return ExperimentReport(
        results=tuple(results),
        reps=config.reps,
        base_seed=config.base_seed,
        config_hash=_config_hash(config),
        wall_time=time.monotonic() - started,
    )


def _result_row(result: CellResult) -> list[str]:
    cell = result.cell
    ratio = "" if result.penalty_ratio is None else format(result.penalty_ratio, ".10g")
    return [
        cell.model.label(),
        str(cell.n),
        cell.estimator,
        cell.penalty.label(),
        ratio,
        format(result.freq, ".10g"),
        str(result.reps),
        str(result.excluded),
        str(result.seed),
    ]


def emit_report(report: ExperimentReport, path, fmt: str = "csv") -> None:
    """Write the report atomically as CSV or JSON."""
    if fmt == "csv":
        lines = [REPORT_HEADER]
        lines.extend(",".join(_result_row(result)) for result in report.results)
        atomic_write_text(path, "\n".join(lines) + "\n")
    elif fmt == "json":
        payload = {
            "reps": report.reps,
            "base_seed": report.base_seed,
            "config_hash": report.config_hash,
            "wall_time": report.wall_time,
            "cells": [
                {
                    "model": r.cell.model.label(),
                    "n": r.cell.n,
                    "estimator": r.cell.estimator,
                    "criterion": r.cell.penalty.label(),
                    "penalty_ratio": r.penalty_ratio,
                    "freq": r.freq,
                    "reps": r.reps,
                    "excluded": r.excluded,
                    "seed": r.seed,
                }
                for r in report.results
            ],
        }
        atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        raise ValueError(f"unknown report format {fmt!r}, expected csv or json")


_TOP_KEYS = {"reps", "base_seed", "workers", "error", "init", "grid", "cells"}
_GRID_KEYS = {"models", "n", "estimators", "penalties"}


def _config_int(data: dict, key: str, default: int) -> int:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return value


def _parse_with_context(parser, text, what: str):
    if not isinstance(text, str):
        raise ConfigError(f"{what} must be a string, got {text!r}")
    try:
        return parser(text)
    except ValueError as exc:
        raise ConfigError(f"bad {what} {text!r}: {exc}") from exc


def parse_config(path) -> ExperimentConfig:
    """Read an experiment configuration from a TOML file.

    The ``[grid]`` table crosses models, sample sizes, estimators, and
    penalties into cells; explicit ``[[cells]]`` rows are appended
    after the grid.  ``reps``, ``base_seed``, ``workers``, ``error``,
    and ``init`` apply to every cell.
    """
    try:
        with open(path, "rb") as handle:
            data = tomli.load(handle)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    unknown = sorted(set(data) - _TOP_KEYS)
    if unknown:
        raise ConfigError(f"unknown configuration key(s) {unknown}")
    reps = _config_int(data, "reps", 10000)
    base_seed = _config_int(data, "base_seed", 0)
    workers = _config_int(data, "workers", 1)
    error = _parse_with_context(parse_error, data.get("error", "iid"), "error")
    init = _parse_with_context(parse_init, data.get("init", "zero"), "init")
    cells: list[Cell] = []
    if "grid" in data:
        grid = data["grid"]
        if not isinstance(grid, dict):
            raise ConfigError("grid must be a table")
        missing = sorted(_GRID_KEYS - set(grid))
        extra = sorted(set(grid) - _GRID_KEYS)
        if missing or extra:
            raise ConfigError(f"grid needs keys {sorted(_GRID_KEYS)}; missing {missing}, unknown {extra}")
        models = [_parse_with_context(parse_model, text, "model") for text in grid["models"]]
        penalties = [
            _parse_with_context(parse_penalty, text, "penalty") for text in grid["penalties"]
        ]
        sizes = grid["n"]
        if not isinstance(sizes, list) or not sizes:
            raise ConfigError("grid.n must be a nonempty list of integers")
        estimators = grid["estimators"]
        for model in models:
            for n in sizes:
                if isinstance(n, bool) or not isinstance(n, int):
                    raise ConfigError(f"grid.n entries must be integers, got {n!r}")
                for estimator in estimators:
                    for penalty in penalties:
                        try:
                            cells.append(
                                Cell(model=model, n=n, estimator=estimator, penalty=penalty)
                            )
                        except ValueError as exc:
                            raise ConfigError(str(exc)) from exc
    for row in data.get("cells", []):
        if not isinstance(row, dict):
            raise ConfigError(f"cell rows must be tables, got {row!r}")
        extra = sorted(set(row) - {"model", "n", "estimator", "penalty"})
        if extra:
            raise ConfigError(f"unknown cell key(s) {extra}")
        try:
            cells.append(
                Cell(
                    model=_parse_with_context(parse_model, row.get("model"), "model"),
                    n=row.get("n", 0),
                    estimator=row.get("estimator", ""),
                    penalty=_parse_with_context(parse_penalty, row.get("penalty"), "penalty"),
                )
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    try:
        return ExperimentConfig(
            cells=tuple(cells),
            reps=reps,
            error=error,
            init=init,
            base_seed=base_seed,
            workers=workers,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def override_config(
    config: ExperimentConfig,
    reps: int | None = None,
    workers: int | None = None,
    base_seed: int | None = None,
) -> ExperimentConfig:
    """Copy a configuration with command-line overrides applied."""
    updates = {}
    if reps is not None:
        updates["reps"] = reps
    if workers is not None:
        updates["workers"] = workers
    if base_seed is not None:
        updates["base_seed"] = base_seed
    return replace(config, **updates) if updates else config
