"""Command-line front end.

Subcommands cover path simulation, estimation, order selection,
binding-table management, limit probabilities, experiment grids, and
figure data.  Human-readable summaries go to standard output; machine
payloads go to files, written atomically.  Exit codes: 0 success,
1 domain error, 2 I/O error.  The environment variable ``ICX_SEED``
provides the default ``--seed`` value.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .criteria import select
from .estimate import BindingTable, default_binding_table, indirect_fit, ols_fit
from .exceptions import IcxError
from .experiment import emit_report, override_config, parse_config, run_experiment
from .fileio import atomic_write_text
from .limits import LimitCase, is_closed_form, limit_probability
from .model import parse_error, parse_init, parse_model
from .seeding import mix
from .simulate import aligned_trajectories, generate_path

FIGURE_MODELS = ("ur", "ltue:c=1", "me:alpha=0.1", "me:alpha=0.5")

BINDING_CHECK_TOL = 1e-6


def _env_seed() -> int | None:
    raw = os.environ.get("ICX_SEED")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"ICX_SEED must be an integer, got {raw!r}") from None


def _float_or_inf(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _read_series(path) -> np.ndarray:
    """Read a ``t,x`` CSV written by the simulate subcommand."""
    values = []
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            left, _, right = line.partition(",")
            if not right:
                raise ValueError(f"{path}:{line_no}: expected two columns 't,x'")
            if left.strip().lower() == "t":
                continue
            try:
                values.append(float(right))
            except ValueError:
                raise ValueError(f"{path}:{line_no}: bad value {right!r}") from None
    if len(values) < 4:
        raise ValueError(f"{path}: need at least 4 rows, got {len(values)}")
    return np.asarray(values)


def _series_csv(values) -> str:
    lines = ["t,x"]
    lines.extend(f"{t},{x!r}" for t, x in enumerate(np.asarray(values).tolist()))
    return "\n".join(lines) + "\n"


def _load_table(path) -> BindingTable | None:
    return BindingTable.load(path) if path else None


def cmd_simulate(args) -> int:
    model = parse_model(args.model)
    error = parse_error(args.error)
    init = parse_init(args.init)
    sample = generate_path(model, error, init, args.n, args.seed)
    atomic_write_text(args.out, _series_csv(sample.values))
    print(f"wrote {sample.n + 1} rows to {args.out}")
    return 0


def cmd_fit(args) -> int:
    values = _read_series(args.path)
    estimators = ("ols", "iie") if args.estimator == "both" else (args.estimator,)
    table = _load_table(args.table)
    for name in estimators:
        if name == "ols":
            fit = ols_fit(values)
        else:
            fit = indirect_fit(values, table if table is not None else default_binding_table())
        print(
            f"{name}: rho_hat={fit.rho_hat:.6f} "
            f"sigma2_restricted={fit.sigma2_restricted:.6f} "
            f"sigma2_fitted={fit.sigma2_fitted:.6f} n={fit.n}"
        )
    return 0


def cmd_select(args) -> int:
    values = _read_series(args.path)
    table = _load_table(args.table)
    criteria = ("aic", "bic", "hqic") if args.criterion == "all" else (args.criterion,)
    for criterion in criteria:
        result = select(values, estimator=args.estimator, penalty=criterion, table=table)
        print(
            f"{result.penalty}: ic0={result.ic0:.6f} ic1={result.ic1:.6f} "
            f"k_hat={result.k_hat}"
        )
    return 0


def cmd_binding(args) -> int:
    if args.rebuild:
        table = BindingTable.build(c_min=args.c_min, c_max=args.c_max, step=args.step)
        table.save(args.table)
        print(
            f"built binding table: {table.c_grid.size} points on "
            f"[{table.c_grid[0]:g}, {table.c_grid[-1]:g}], saved to {args.table}"
        )
        return 0
    table = BindingTable.load(args.table)
    worst = table.check(points=args.points, seed=args.seed)
    ok = worst < BINDING_CHECK_TOL
    status = "ok" if ok else "FAILED"
    print(
        f"checked {min(args.points, table.c_grid.size)} grid points against fresh "
        f"quadrature: worst deviation {worst:.3e} ({status})"
    )
    return 0 if ok else 1


def cmd_limits(args) -> int:
    case = LimitCase(
        case=args.case, pi=args.pi, omega2=args.omega2, rho=args.rho, c=args.c, tau=args.tau
    )
    probability = limit_probability(
        case,
        draws=args.draws,
        steps=args.steps,
        seed=args.seed,
        table=_load_table(args.table),
    )
    closed = is_closed_form(case)
    branch = "closed_form" if closed else "monte_carlo"
    draws = 0 if closed else args.draws
    se = 0.0 if closed else math.sqrt(probability * (1.0 - probability) / args.draws)
    rows = [
        "case,branch,pi,omega2,probability,draws,se",
        f"{case.case},{branch},{case.pi:g},"
        f"{'' if case.omega2 is None else format(case.omega2, 'g')},"
        f"{probability:.6f},{draws},{se:.6g}",
    ]
    text = "\n".join(rows) + "\n"
    print(text, end="")
    if args.out:
        atomic_write_text(args.out, text)
        print(f"wrote {args.out}")
    return 0


def cmd_experiment(args) -> int:
    config = parse_config(args.config)
    config = override_config(
        config, reps=args.reps, workers=args.workers, base_seed=args.seed
    )
    table = _load_table(args.table)
    report = run_experiment(config, table=table)
    emit_report(report, args.out, fmt=args.format)
    print(
        f"{len(report.results)} cells at reps={report.reps}, "
        f"wrote {args.out} in {report.wall_time:.1f}s"
    )
    return 0


def cmd_figures(args) -> int:
    sizes = [int(piece) for piece in args.n_list.split(",") if piece.strip()]
    if not sizes:
        raise ValueError("empty n list")
    models = [parse_model(text) for text in FIGURE_MODELS]
    os.makedirs(args.out, exist_ok=True)
    for n in sizes:
        labels, columns = aligned_trajectories(models, n, seed=mix(args.seed, n))
        lines = ["t," + ",".join(labels)]
        for t in range(columns.shape[0]):
            lines.append(str(t) + "," + ",".join(format(v, ".10g") for v in columns[t]))
        atomic_write_text(os.path.join(args.out, f"trajectories_n{n}.csv"), "\n".join(lines) + "\n")
    print(f"wrote {len(sizes)} trajectory file(s) to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icx",
        description=(
            "Information-criterion selection between unit-root and explosive "
            "autoregressions. Model strings: ur, ltue:c=1, me:alpha=0.3, "
            "ex:rho=1.05; penalties: aic, bic, hqic, pow:gamma=0.5."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate one path to a t,x CSV")
    sim.add_argument("model", help="model string, e.g. ur or ex:rho=1.05")
    sim.add_argument("-n", type=int, required=True, help="observations after the start")
    sim.add_argument("--error", default="iid", help="error string, e.g. ma:coeffs=1;0.5")
    sim.add_argument("--init", default="zero", help="init string, e.g. recent:theta=0.5")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("-o", "--out", required=True, help="output CSV path")
    sim.set_defaults(func=cmd_simulate)

    fit = sub.add_parser("fit", help="estimate the coefficient from a t,x CSV")
    fit.add_argument("path")
    fit.add_argument("--estimator", choices=("ols", "iie", "both"), default="ols")
    fit.add_argument("--table", default=None, help="binding table CSV for iie")
    fit.set_defaults(func=cmd_fit)

    sel = sub.add_parser("select", help="pick the order under one or all criteria")
    sel.add_argument("path")
    sel.add_argument("--estimator", choices=("ols", "iie"), default="ols")
    sel.add_argument("--criterion", default="aic", help="aic|bic|hqic|pow:gamma=...|all")
    sel.add_argument("--table", default=None)
    sel.set_defaults(func=cmd_select)

    bind = sub.add_parser("binding", help="build or verify the binding table")
    group = bind.add_mutually_exclusive_group(required=True)
    group.add_argument("--rebuild", action="store_true", help="tabulate by quadrature")
    group.add_argument("--check", action="store_true", help="verify against fresh quadrature")
    bind.add_argument("--table", default="binding.csv", help="table CSV path")
    bind.add_argument("--c-min", type=float, default=-60.0)
    bind.add_argument("--c-max", type=float, default=60.0)
    bind.add_argument("--step", type=float, default=0.25)
    bind.add_argument("--points", type=int, default=20, help="grid points to check")
    bind.add_argument("--seed", type=int, default=None)
    bind.set_defaults(func=cmd_binding)

    lim = sub.add_parser("limits", help="limit probability of correct selection")
    lim.add_argument("--case", required=True, help="t1|t2a|t2b|t2c|t3|t4a|t4b|t4c|p5")
    lim.add_argument("--pi", type=_float_or_inf, required=True, help="penalty ratio limit")
    lim.add_argument("--omega2", type=float, default=None)
    lim.add_argument("--rho", type=float, default=None)
    lim.add_argument("--c", type=float, default=None)
    lim.add_argument("--tau", type=_float_or_inf, default=0.0)
    lim.add_argument("--draws", type=int, default=20000)
    lim.add_argument("--steps", type=int, default=8192)
    lim.add_argument("--seed", type=int, default=None)
    lim.add_argument("--table", default=None)
    lim.add_argument("-o", "--out", default=None, help="also write the rows to a file")
    lim.set_defaults(func=cmd_limits)

    exp = sub.add_parser("experiment", help="run a cell grid from a TOML config")
    exp.add_argument("config")
    exp.add_argument("-o", "--out", required=True)
    exp.add_argument("--reps", type=int, default=None)
    exp.add_argument("--workers", type=int, default=None)
    exp.add_argument("--seed", type=int, default=None, help="override the config base seed")
    exp.add_argument("--format", choices=("csv", "json"), default="csv")
    exp.add_argument("--table", default=None)
    exp.set_defaults(func=cmd_experiment)

    fig = sub.add_parser("figures", help="aligned trajectories for the display models")
    fig.add_argument("--n-list", default="100,200,500,1000")
    fig.add_argument("--seed", type=int, default=None)
    fig.add_argument("-o", "--out", required=True, help="output directory")
    fig.set_defaults(func=cmd_figures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", "absent") is None:
            env = _env_seed()
            if args.command == "experiment":
                # None keeps the seed from the config file.
                args.seed = env
            else:
                args.seed = env if env is not None else 0
        return args.func(args)
    except (ValueError, IcxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
