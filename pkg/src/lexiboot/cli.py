"""Command-line front end: single games, alpha sweeps, 1/N extrapolation,
and the unused-word occupancy tables.

Conventions shared by all subcommands:

* exit codes: 0 success, 1 usage or configuration error, 2 a single game
  that hit its episode cap without freezing;
* every output file gets a sibling ``<file>.manifest.json`` recording the
  argument vector, seeds, worker count, and backend; replaying the stored
  ``argv`` reproduces the data bytes (timestamps are informational only);
* CSV floats are written with repr(), the shortest decimal that round-trips,
  so byte comparison of two runs is meaningful;
* ``--config FILE`` reads ``key = value`` lines (keys are long flag names
  without the leading dashes); flags given on the command line override the
  file.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace
from datetime import datetime, timezone

from . import __version__
from .backend import default_backend
from .errors import ConfigError, FitError, NotFrozenError
from .experiment import (
    FitResult,
    extrapolate_to_infinite_N,
    mean_and_se,
    run_ensemble,
    sweep_alpha,
    words_for_alpha,
)
from .game import DEFAULT_MAX_EPISODES, GameConfig, run_game
from .measures import accuracy_report
from .occupancy import (
    EXACT_LIMIT,
    PoissonLimit,
    asymptotic_error,
    exact_expected_error,
    exact_unused_distribution,
    poisson_lambda,
    random_assignment_sample,
)
from .rng import GameRng, derive_seed

SWEEP_HEADER = ("alpha,N,H,C,M,mode,samples,mean_eps,se_eps,"
                "freeze_rate,consensus_rate,eps_random,eps_optimal")
EXTRAP_HEADER = SWEEP_HEADER + ",eps_exact_random"
FIT_HEADER = "intercept,intercept_err,slope,slope_err"


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; the contract here reserves 2 for
    non-freezing runs, so usage errors are remapped to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------- formatting

def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_line(*cells) -> str:
    return ",".join(_fmt(c) for c in cells)


def _print_kv(key: str, value) -> None:
    print(f"{key} = {_fmt(value)}")


# ------------------------------------------------------------ config file

def _config_file_tokens(path: str) -> list[str]:
    """Translate a key=value file into a flag token list."""
    tokens: list[str] = []
    with open(path) as handle:
        for raw in handle:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, value = line.split("=", 1)
            else:
                parts = line.split(None, 1)
                key = parts[0]
                value = parts[1] if len(parts) > 1 else ""
            key = key.strip().replace("_", "-")
            value = value.strip()
            if not key:
                raise ConfigError(f"malformed config line: {raw.strip()!r}")
            flag = f"--{key}"
            lowered = value.lower()
            if lowered in ("true", "yes", "on") or value == "":
                tokens.append(flag)
            elif lowered in ("false", "no", "off"):
                continue
            else:
                tokens.extend([flag, value])
    return tokens


def _expand_config(argv: list[str]) -> list[str]:
    """Splice config-file flags in right after the subcommand so that
    explicit command-line flags, parsed later, win."""
    path = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
    if path is None or not argv or argv[0].startswith("-"):
        return argv
    return [argv[0], *_config_file_tokens(path), *argv[1:]]


# --------------------------------------------------------------- manifest

def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _write_manifest(out_path: str, argv: list[str], command: str,
                    extra: dict, started: str) -> None:
    manifest = {
        "tool_version": __version__,
        "command": command,
        "argv": list(argv),
        "backend": default_backend(),
        "started": started,
        "finished": _utc_now(),
    }
    manifest.update(extra)
    with open(out_path + ".manifest.json", "w") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


# ------------------------------------------------------------ CLI plumbing

def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma list of ints: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _float_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"not a comma list of floats: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _default_workers() -> int:
    env = os.environ.get("LEXIBOOT_WORKERS")
    if env is not None:
        try:
            workers = int(env)
        except ValueError:
            raise ConfigError(f"LEXIBOOT_WORKERS is not an integer: {env!r}")
        if workers < 1:
            raise ConfigError(f"LEXIBOOT_WORKERS must be >= 1, got {workers}")
        return workers
    return os.cpu_count() or 1


def _add_common_flags(parser) -> None:
    parser.add_argument("--context", type=int, default=2,
                        help="objects shown per episode (default 2)")
    parser.add_argument("--resolution", type=int, default=100,
                        help="count resolution M per matrix row (default 100)")
    parser.add_argument("--max-episodes", type=int,
                        default=DEFAULT_MAX_EPISODES,
                        help="episode cap before giving up")
    parser.add_argument("--seed", type=int, default=0,
                        help="master seed (default 0)")
    parser.add_argument("--config", default=None, metavar="FILE",
                        help="key=value file of defaults; flags override it")


def _add_ensemble_flags(parser) -> None:
    parser.add_argument("--samples", type=int, default=100,
                        help="games per cell (default 100)")
    parser.add_argument("--workers", type=int, default=None,
                        help="parallel worker processes "
                             "(default: LEXIBOOT_WORKERS, else CPU count)")
    parser.add_argument("--gnuplot", action="store_true",
                        help="also emit a gnuplot script next to the CSV")


def build_parser() -> _Parser:
    parser = _Parser(prog="lexiboot",
                     description="Two-agent naming-game simulator and "
                                 "analysis toolkit.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="COMMAND")

    p_game = sub.add_parser("game", help="run one game to lexicon freezing",
                            description="Run a single two-agent game and "
                                        "report its outcome.")
    p_game.add_argument("--objects", type=int, required=True,
                        help="number of objects N")
    p_game.add_argument("--words", type=int, default=None,
                        help="lexicon size H (alternative to --alpha)")
    p_game.add_argument("--alpha", type=float, default=None,
                        help="lexicon ratio H/N; H is rounded from it")
    p_game.add_argument("--mode", default="unsupervised",
                        choices=("unsupervised", "supervised"),
                        help="episode rule (default unsupervised)")
    _add_common_flags(p_game)
    p_game.set_defaults(func=cmd_game)

    p_sweep = sub.add_parser("sweep", help="error vs alpha ensemble sweep",
                             description="Ensembles over a grid of alpha "
                                         "values, written as CSV.")
    p_sweep.add_argument("--alphas", type=_float_list, required=True,
                         help="comma list of H/N ratios")
    p_sweep.add_argument("--objects", type=_int_list, required=True,
                         help="comma list of object-set sizes N")
    p_sweep.add_argument("--mode", default="unsupervised",
                         choices=("unsupervised", "supervised", "both"),
                         help="episode rule, or both (default unsupervised)")
    p_sweep.add_argument("--out", required=True, help="CSV output path")
    _add_ensemble_flags(p_sweep)
    _add_common_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_ext = sub.add_parser("extrapolate",
                           help="error vs 1/N fit toward infinite N",
                           description="Run ensembles over several N at a "
                                       "fixed alpha and fit error against "
                                       "1/N, or fit precomputed rows from "
                                       "--fit-csv.")
    p_ext.add_argument("--alpha", type=float, default=None,
                       help="lexicon ratio H/N (H rounded per N)")
    p_ext.add_argument("--objects", type=_int_list, default=None,
                       help="comma list of object-set sizes N")
    p_ext.add_argument("--mode", default="unsupervised",
                       choices=("unsupervised", "supervised"),
                       help="episode rule (default unsupervised)")
    p_ext.add_argument("--out", default=None, help="CSV output path")
    p_ext.add_argument("--fit-csv", default=None, metavar="FILE",
                       help="fit existing rows (needs N, mean_eps, se_eps "
                            "columns) instead of simulating")
    _add_ensemble_flags(p_ext)
    _add_common_flags(p_ext)
    p_ext.set_defaults(func=cmd_extrapolate)

    p_occ = sub.add_parser("occupancy",
                           help="unused-word distribution tables",
                           description="Exact and limiting distributions of "
                                       "the number of unused words under "
                                       "random word assignment.")
    p_occ.add_argument("--objects", type=int, required=True)
    p_occ.add_argument("--words", type=int, required=True)
    p_occ.add_argument("--poisson", action="store_true",
                       help="allow sizes past the exact-mode limit, "
                            "reporting the Poisson limit only")
    p_occ.add_argument("--mc-samples", type=int, default=0,
                       help="also estimate the error by Monte Carlo")
    p_occ.add_argument("--seed", type=int, default=0)
    p_occ.add_argument("--config", default=None, metavar="FILE",
                       help="key=value file of defaults; flags override it")
    p_occ.set_defaults(func=cmd_occupancy)

    return parser


# ------------------------------------------------------------ subcommands

def cmd_game(args, argv) -> int:
    if args.words is not None and args.alpha is not None:
        raise ConfigError("give --words or --alpha, not both")
    if args.words is not None:
        n_words = args.words
    elif args.alpha is not None:
        n_words = words_for_alpha(args.alpha, args.objects)
    else:
        raise ConfigError("one of --words or --alpha is required")
    config = GameConfig(
        n_objects=args.objects, n_words=n_words,
        context_size=args.context, resolution=args.resolution,
        mode=args.mode, max_episodes=args.max_episodes, seed=args.seed)
    result = run_game(config)
    _print_kv("episodes", result.episodes)
    _print_kv("frozen", "yes" if result.frozen else "no")
    if not result.frozen:
        return 2
    report_i = accuracy_report(result.matrix_i)
    report_j = accuracy_report(result.matrix_j)
    _print_kv("eps[I]", report_i.error_float)
    _print_kv("eps[J]", report_j.error_float)
    _print_kv("used_words[I]", int(report_i.used_words))
    _print_kv("used_words[J]", int(report_j.used_words))
    _print_kv("consensus", "yes" if result.consensus else "no")
    return 0


def _base_config(args, n_objects: int, mode: str) -> GameConfig:
    # n_words is a placeholder; callers swap it per alpha.
    return GameConfig(
        n_objects=n_objects, n_words=1, context_size=args.context,
        resolution=args.resolution, mode=mode,
        max_episodes=args.max_episodes, seed=args.seed)


def cmd_sweep(args, argv) -> int:
    started = _utc_now()
    workers = args.workers if args.workers is not None else _default_workers()
    if args.samples < 1:
        raise ConfigError(f"need --samples >= 1, got {args.samples}")
    modes = (["unsupervised", "supervised"] if args.mode == "both"
             else [args.mode])

    lines = [SWEEP_HEADER]
    combo = 0
    for n_objects in args.objects:
        for mode in modes:
            base = _base_config(args, n_objects, mode)
            rows = sweep_alpha(base, args.alphas, args.samples,
                               derive_seed(args.seed, combo), workers=workers)
            combo += 1
            for row in rows:
                st = row.stats
                cfg = st.config
                lines.append(_csv_line(
                    row.alpha, cfg.n_objects, cfg.n_words, cfg.context_size,
                    cfg.resolution, cfg.mode, st.n_samples,
                    st.mean_error, st.std_error, st.freeze_rate,
                    st.consensus_rate, row.eps_random, row.eps_optimal))

    with open(args.out, "w") as handle:
        handle.write("\n".join(lines) + "\n")
    _write_manifest(args.out, argv, "sweep", {
        "alphas": args.alphas, "objects": args.objects, "modes": modes,
        "n_samples": args.samples, "master_seed": args.seed,
        "workers": workers,
        "config": {"context_size": args.context,
                   "resolution": args.resolution,
                   "max_episodes": args.max_episodes},
    }, started)
    if args.gnuplot:
        _write_sweep_gnuplot(args.out)
    print(f"wrote {args.out} ({len(lines) - 1} rows)")
    return 0


def _write_sweep_gnuplot(out_path: str) -> None:
    script = f"""\
# render with: gnuplot -persist {out_path}.gp
set datafile separator ','
set xlabel 'alpha = H / N'
set ylabel 'communication error'
set yrange [0:1]
eps_random(a) = 1 - a + a*exp(-1/a)
eps_optimal(a) = a < 1 ? 1 - a : 0
plot '{out_path}' skip 1 using 1:8:9 with yerrorbars pointtype 7 \\
         title 'simulation', \\
     eps_random(x) with lines title 'random assignment', \\
     eps_optimal(x) with lines dashtype 2 title 'optimal'
"""
    with open(out_path + ".gp", "w") as handle:
        handle.write(script)


def _read_fit_rows(path: str) -> list[tuple[int, float, float]]:
    """Pull (N, mean_eps, se_eps) rows out of a CSV; tolerant of extra
    columns and of a trailing summary block."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError(f"{path}: empty CSV")
        try:
            idx = {name: header.index(name)
                   for name in ("N", "mean_eps", "se_eps")}
        except ValueError:
            raise ConfigError(
                f"{path}: header must contain N, mean_eps, se_eps")
        rows = []
        for cells in reader:
            if len(cells) <= max(idx.values()):
                break
            try:
                rows.append((int(cells[idx["N"]]),
                             float(cells[idx["mean_eps"]]),
                             float(cells[idx["se_eps"]])))
            except ValueError:
                break
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    return rows


def _print_fit(fit: FitResult) -> None:
    print("fit: eps(N) = intercept + slope / N")
    _print_kv("intercept", fit.intercept)
    _print_kv("intercept_err", fit.intercept_err)
    _print_kv("slope", fit.slope)
    _print_kv("slope_err", fit.slope_err)


def _write_extrap_gnuplot(out_path: str, data_path: str, fit: FitResult,
                          alpha: float | None) -> None:
    reference = ""
    if alpha is not None:
        reference = (f", \\\n     {asymptotic_error(alpha)!r} "
                     "with lines dashtype 2 title 'random assignment, "
                     "infinite N'")
    script = f"""\
# render with: gnuplot -persist {out_path}.gp
set datafile separator ','
set xlabel '1 / N'
set ylabel 'communication error'
plot '{data_path}' skip 1 using (1.0/column(2)):8:9 with yerrorbars \\
         pointtype 7 title 'simulation', \\
     {fit.intercept!r} + {fit.slope!r}*x with lines title 'linear fit'\
{reference}
"""
    with open(out_path + ".gp", "w") as handle:
        handle.write(script)


def cmd_extrapolate(args, argv) -> int:
    started = _utc_now()

    if args.fit_csv is not None:
        points = _read_fit_rows(args.fit_csv)
        fit = extrapolate_to_infinite_N(points)
        if args.alpha is not None:
            _print_kv("eps_random(infinite N)", asymptotic_error(args.alpha))
        _print_fit(fit)
        if args.out is not None:
            with open(args.out, "w") as handle:
                handle.write(FIT_HEADER + "\n")
                handle.write(_csv_line(fit.intercept, fit.intercept_err,
                                       fit.slope, fit.slope_err) + "\n")
            _write_manifest(args.out, argv, "extrapolate", {
                "fit_csv": args.fit_csv, "n_points": len(points),
            }, started)
            if args.gnuplot:
                _write_extrap_gnuplot(args.out, args.fit_csv, fit, args.alpha)
        return 0

    if args.alpha is None:
        raise ConfigError("--alpha is required unless --fit-csv is given")
    if args.objects is None:
        raise ConfigError("--objects is required unless --fit-csv is given")
    if args.out is None:
        raise ConfigError("--out is required unless --fit-csv is given")
    if args.samples < 1:
        raise ConfigError(f"need --samples >= 1, got {args.samples}")
    workers = args.workers if args.workers is not None else _default_workers()

    lines = [EXTRAP_HEADER]
    points = []
    references = []
    for index, n_objects in enumerate(args.objects):
        n_words = words_for_alpha(args.alpha, n_objects)
        config = replace(_base_config(args, n_objects, args.mode),
                         n_words=n_words)
        stats = run_ensemble(config, args.samples,
                             derive_seed(args.seed, index), workers=workers)
        if stats.freeze_rate == 0.0:
            raise ConfigError(
                f"no game froze at N={n_objects}; raise --max-episodes")
        exact = exact_expected_error(n_objects, n_words)
        references.append((n_objects, n_words, exact))
        points.append((n_objects, stats.mean_error, stats.std_error))
        lines.append(_csv_line(
            args.alpha, n_objects, n_words, config.context_size,
            config.resolution, config.mode, stats.n_samples,
            stats.mean_error, stats.std_error, stats.freeze_rate,
            stats.consensus_rate, asymptotic_error(args.alpha),
            max(0.0, 1.0 - args.alpha), exact))

    fit = extrapolate_to_infinite_N(points)
    lines.append("")
    lines.append(FIT_HEADER)
    lines.append(_csv_line(fit.intercept, fit.intercept_err,
                           fit.slope, fit.slope_err))
    with open(args.out, "w") as handle:
        handle.write("\n".join(lines) + "\n")
    _write_manifest(args.out, argv, "extrapolate", {
        "alpha": args.alpha, "objects": args.objects,
        "n_samples": args.samples, "master_seed": args.seed,
        "workers": workers,
        "config": {"context_size": args.context,
                   "resolution": args.resolution,
                   "mode": args.mode,
                   "max_episodes": args.max_episodes},
    }, started)
    if args.gnuplot:
        _write_extrap_gnuplot(args.out, args.out, fit, args.alpha)

    _print_kv("eps_random(infinite N)", asymptotic_error(args.alpha))
    for n_objects, n_words, exact in references:
        _print_kv(f"eps_exact_random(N={n_objects}, H={n_words})", exact)
    _print_fit(fit)
    print(f"wrote {args.out} ({len(points)} rows)")
    return 0


def cmd_occupancy(args, argv) -> int:
    n_objects, n_words = args.objects, args.words
    if n_objects < 1 or n_words < 1:
        raise ConfigError("need --objects >= 1 and --words >= 1")
    exact_ok = n_objects <= EXACT_LIMIT and n_words <= EXACT_LIMIT
    if not exact_ok and not args.poisson:
        raise ConfigError(
            f"sizes past {EXACT_LIMIT} need --poisson (exact enumeration "
            "is limited; the Poisson limit is accurate there)")

    alpha = n_words / n_objects
    lam = poisson_lambda(n_objects, n_words)
    limit = PoissonLimit(lam)
    print(f"objects N = {n_objects}, words H = {n_words}, "
          f"alpha = {alpha!r}")
    print(f"{'m':>6}  {'P[m unused]':>20}  {'Poisson limit':>20}")
    if exact_ok:
        dist = exact_unused_distribution(n_objects, n_words)
        largest_gap = 0.0
        for m, p_exact in enumerate(dist.probabilities):
            p_limit = limit.pmf(m)
            largest_gap = max(largest_gap, abs(p_exact - p_limit))
            if p_exact > 1e-12 or p_limit > 1e-12:
                print(f"{m:6d}  {p_exact:20.12e}  {p_limit:20.12e}")
        _print_kv("sup|exact - poisson|", largest_gap)
        _print_kv("E[unused] exact", float(dist.exact_mean()))
    else:
        spread = max(10.0, 40.0 * lam ** 0.5)
        low = max(0, int(lam - spread))
        high = min(n_words, int(lam + spread) + 1)
        for m in range(low, high + 1):
            p_limit = limit.pmf(m)
            if p_limit > 1e-12:
                print(f"{m:6d}  {'':>20}  {p_limit:20.12e}")
    _print_kv("E[unused] poisson", lam)
    _print_kv("expected_error exact", exact_expected_error(n_objects, n_words))
    _print_kv("expected_error asymptotic", asymptotic_error(alpha))

    if args.mc_samples > 0:
        errors = []
        for i in range(args.mc_samples):
            rng = GameRng(derive_seed(args.seed, i))
            errors.append(random_assignment_sample(n_objects, n_words, rng))
        mean, se = mean_and_se(errors)
        _print_kv(f"mc_error ({args.mc_samples} samples)", mean)
        _print_kv("mc_error_se", se)
    return 0


# ------------------------------------------------------------------ entry

def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)
    try:
        expanded = _expand_config(argv)
    except (OSError, ConfigError) as exc:
        print(f"lexiboot: error: {exc}", file=sys.stderr)
        return 1
    parser = build_parser()
    try:
        args = parser.parse_args(expanded)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args, argv)
    except (ConfigError, FitError, NotFrozenError, OSError) as exc:
        print(f"lexiboot: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
