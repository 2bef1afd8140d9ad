# ricci_mcmc/cli.py

"""
Command-line front end.

    python -m ricci_mcmc [--verbose LEVEL] <command> [flags]

Commands: build-q, simulate, curvature, rate, xi, experiment.

Exit status: 0 on success, 1 on domain errors, 2 on usage errors
(bad flags, unparsable input files, invalid configuration).
Results go to stdout or the requested file; diagnostics go to stderr.
"""

from __future__ import annotations
import argparse
import sys
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from .config import (
    GENERATOR_KINDS,
    OBSERVER_NAMES,
    ExperimentConfig,
    IntegratorConfig,
    Settings,
    build_config,
    default_record_every,
)
from .curvature import (
    check_local_optimality,
    curvature_report,
    kappa_formula_thm2,
    kappa_sqrt_bound,
)
from .divergence import PhiFunction, parse_phi
from .dynamics import exact_trajectory_optimal, make_observers, simulate, write_trajectory_csv
from .errors import ConfigError, DomainError, IoError, ParseError, RicciMCMCError, UsageError
from .experiments import run_experiment, write_convergence_plot, write_result_csv
from .generator import (
    build_generator,
    build_optimal_weights,
    optimal_c,
    weights_from_generator,
    write_matrix_csv,
)
from .simplex import Distribution, RandomSource, validate_distribution
from .util import format_float, logger, set_verbose
from .validator import is_valid_generator
from .xi import xi_phi

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


# --- input parsing -------------------------------------------------------------

def _parse_numbers(cells: Sequence[str], line: Optional[int] = None) -> List[float]:
    out = []
    for cell in cells:
        cell = cell.strip()
        if not cell:
            continue
        try:
            out.append(float(cell))
        except ValueError as e:
            raise ParseError(f"not a number: {cell!r}", line=line) from e
    return out


def load_distribution_file(path: Union[str, Path]) -> Distribution:
    """
    Read a distribution from a text file.

    Accepts one value per line or comma-separated values on one or more
    lines; blank lines and surrounding whitespace are ignored.

    Raises:
        ParseError: with the offending line number
        DistributionError: forwarded from validate_distribution
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    values: List[float] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        values.extend(_parse_numbers(line.split(","), line=lineno))
    return validate_distribution(values)


def parse_distribution_arg(text: str) -> Distribution:
    """A --pi style argument: an existing file path, else an inline comma list."""
    if Path(text).is_file():
        return load_distribution_file(text)
    return validate_distribution(_parse_numbers(text.split(",")))


def _phi_arg(text: str) -> PhiFunction:
    try:
        return parse_phi(text)
    except ValueError as e:
        raise ConfigError(f"--phi: {e}") from e


def _list_arg(text: str) -> List[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if not path.parent.exists():
        raise IoError(path, f"directory {path.parent} does not exist")
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise IoError(path, str(e)) from e


# --- commands ------------------------------------------------------------------

def cmd_build_q(args: argparse.Namespace, settings: Settings) -> int:
    pi = parse_distribution_arg(args.pi)
    g = build_generator(args.kind, pi)
    ok, msg = is_valid_generator(g)
    if not ok:
        raise DomainError(msg)
    if args.out:
        write_matrix_csv(g.q, args.out, {"kind": args.kind, "n": pi.n})
    else:
        for row in g.q:
            print(",".join(format_float(v) for v in row))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, settings: Settings) -> int:
    pi = parse_distribution_arg(args.pi)
    p0 = parse_distribution_arg(args.p0)
    names = _list_arg(args.observers)
    try:
        observers = make_observers(names, pi)
    except ValueError as e:
        raise ConfigError(f"--observers: {e}") from e
    dt = settings.dt if args.dt is None else args.dt
    t_end = settings.t_end if args.t_end is None else args.t_end
    cfg = build_config(
        IntegratorConfig,
        dt=dt,
        t_end=t_end,
        record_every=default_record_every(pi.n) if args.record_every is None else args.record_every,
    )

    if args.exact:
        if args.kind != "optimal":
            raise ConfigError("--exact is only available with --kind optimal")
        steps = np.arange(0, cfg.n_steps + 1, cfg.record_every)
        if steps[-1] != cfg.n_steps:
            steps = np.append(steps, cfg.n_steps)
        times = steps * cfg.dt
        traj = exact_trajectory_optimal(pi, p0, times, observers, keep_states=False)
    else:
        traj = simulate(build_generator(args.kind, pi), p0, cfg, observers, keep_states=False)

    metadata = {"kind": args.kind, "n": pi.n, "dt": cfg.dt, "T": cfg.t_end, "exact": args.exact}
    if args.out:
        write_trajectory_csv(traj, args.out, metadata)
    else:
        print(",".join(["t"] + names))
        for i, t in enumerate(traj.times):
            print(",".join([format_float(t)] + [format_float(traj.observations[n][i]) for n in names]))
    return EXIT_OK


def cmd_curvature(args: argparse.Namespace, settings: Settings) -> int:
    pi = parse_distribution_arg(args.pi)
    phi = _phi_arg(args.phi)
    p = parse_distribution_arg(args.p) if args.p else None
    if args.kind == "optimal":
        w = build_optimal_weights(pi)
    else:
        w = weights_from_generator(build_generator(args.kind, pi))

    text = curvature_report(w, phi, p).to_text()
    if args.perturbation_check:
        seed = settings.seed if args.seed is None else args.seed
        text += check_local_optimality(pi, trials=args.trials, rng=RandomSource(seed)).to_text()
    _emit(text, args.report)
    return EXIT_OK


def cmd_rate(args: argparse.Namespace, settings: Settings) -> int:
    pi = parse_distribution_arg(args.pi)
    phi = _phi_arg(args.phi)
    print(f"kappa_thm2={kappa_formula_thm2(pi, phi):.12g}")
    print(f"kappa_sqrt_bound={kappa_sqrt_bound(pi):.12g}")
    print(f"optimal_c={optimal_c(pi):.12g}")
    return EXIT_OK


def cmd_xi(args: argparse.Namespace, settings: Settings) -> int:
    phi = _phi_arg(args.phi)
    print(f"{xi_phi(phi, args.s, args.t):.12g}")
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace, settings: Settings) -> int:
    cfg = build_config(
        ExperimentConfig,
        n=args.n,
        K=args.k,
        dt=settings.dt if args.dt is None else args.dt,
        T=settings.t_end if args.t_end is None else args.t_end,
        seed=settings.seed if args.seed is None else args.seed,
        generators=tuple(_list_arg(args.generators)),
        observers=tuple(_list_arg(args.observers)),
        fixed_pi=args.fixed_pi,
        with_exact=args.with_exact,
        workers=settings.workers if args.workers is None else args.workers,
        record_every=args.record_every,
        log_y=args.log_y,
    )
    res = run_experiment(cfg)
    if args.out_csv:
        write_result_csv(res, args.out_csv)
    if args.out_plot:
        write_convergence_plot(res, args.out_plot)
    if not args.out_csv and not args.out_plot:
        logger.warning("experiment ran without --out-csv or --out-plot; nothing written")
    return EXIT_OK


# --- parser ----------------------------------------------------------------------

def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ricci_mcmc",
        description="Optimal-curvature generators for finite-state MCMC.",
    )
    parser.add_argument("--verbose", default=None, metavar="LEVEL",
                        help="ERROR | WARNING | INFO | DEBUG | TRACE")
    sub = parser.add_subparsers(dest="command", metavar="<command>")
    sub.required = True

    pi_help = "target distribution: a file path or an inline list like 0.5,0.3,0.2"
    phi_help = "alpha:<a> | kl | chi2 | rkl"

    p = sub.add_parser("build-q", help="print or write a generator matrix")
    p.add_argument("--pi", required=True, help=pi_help)
    p.add_argument("--kind", choices=GENERATOR_KINDS, default="optimal")
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_build_q)

    p = sub.add_parser("simulate", help="integrate the master equation")
    p.add_argument("--pi", required=True, help=pi_help)
    p.add_argument("--p0", required=True, help="initial distribution, same grammar as --pi")
    p.add_argument("--kind", choices=GENERATOR_KINDS, default="optimal")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--record-every", type=int, default=None)
    p.add_argument("--observers", default="l1", help=f"comma list from {', '.join(OBSERVER_NAMES)}")
    p.add_argument("--exact", action="store_true", help="closed-form trajectory (optimal kind only)")
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("curvature", help="curvature bounds at (omega, phi, p)")
    p.add_argument("--pi", required=True, help=pi_help)
    p.add_argument("--phi", required=True, help=phi_help)
    p.add_argument("--p", default=None, help="evaluation point (defaults to pi)")
    p.add_argument("--kind", choices=GENERATOR_KINDS, default="optimal",
                   help="weights of this generator")
    p.add_argument("--perturbation-check", action="store_true")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=_nonneg_int, default=None)
    p.add_argument("--report", default=None, help="output path (stdout if omitted)")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("rate", help="closed-form rates of the optimal generator")
    p.add_argument("--pi", required=True, help=pi_help)
    p.add_argument("--phi", required=True, help=phi_help)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("xi", help="evaluate xi_phi(s, t)")
    p.add_argument("--phi", required=True, help=phi_help)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(func=cmd_xi)

    p = sub.add_parser("experiment", help="averaged L1 convergence benchmark")
    p.add_argument("--n", type=int, default=250)
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--seed", type=_nonneg_int, default=None)
    p.add_argument("--generators", default=",".join(GENERATOR_KINDS))
    p.add_argument("--observers", default="l1")
    p.add_argument("--fixed-pi", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--record-every", type=int, default=None)
    p.add_argument("--log-y", action="store_true")
    p.add_argument("--with-exact", action="store_true")
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-plot", default=None)
    p.set_defaults(func=cmd_experiment)

    return parser


Command = Callable[[argparse.Namespace, Settings], int]


def parse_and_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv, run one command and return the exit status.

    Never raises for library errors; they are reported on stderr.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        # argparse has already printed usage to stderr
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        settings = Settings.from_env()
        set_verbose(args.verbose or settings.log_level)
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    func: Command = args.func
    try:
        return func(args, settings)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RicciMCMCError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))
