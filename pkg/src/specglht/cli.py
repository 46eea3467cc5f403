"""Command-line interface.

Subcommands
-----------
test            one standardized shrinkage test on CSV matrices
select          data-driven shrinkage selection for a prior weighting
composite       max-statistic test over a panel of priors with bootstrap p-value
simulate-size   empirical null rejection rates
simulate-power  (size-adjusted) power along a signal grid

Matrices are dense, headerless CSV: observations Y is p x N, design X is
k x N, constraints C is k x q. Exit codes: 0 success, 2 invalid input or
configuration, 3 numerical failure during computation. All randomness is
seeded (--seed, default 20260825); --threads (or SPECGLHT_THREADS) only
changes scheduling, never results.
"""

from __future__ import annotations

import argparse
import os
import sys
from configparser import ConfigParser
from pathlib import Path

import numpy as np

from . import __version__
from .backend import backend_name
from .composite import DEFAULT_SEED, CompositeConfig, composite_from_fit
from .errors import (
    ConfigError,
    InvalidPrior,
    IoError,
    RankDeficientConstraints,
    RankDeficientDesign,
    SpecGlhtError,
)
from .glht import GlhtProblem, fit, m_matrix, raw_statistics, test_from_fit
from .selection import RidgeBounds, default_ridge_bounds, select_higher_order, select_ridge
from .shrinkage import ClassicalInverse, Identity, Ridge, RidgeMixture
from .simlab import (
    AlternativeModel,
    CovModel,
    SimConfig,
    TestSpec,
    empirical_size,
    persist,
    power_curve,
)
from .spectrum import CANONICAL_PANEL, PriorWeights, as_prior

_VALIDATION_ERRORS = (
    ConfigError,
    IoError,
    InvalidPrior,
    RankDeficientDesign,
    RankDeficientConstraints,
    ValueError,
    OSError,
)


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("SPECGLHT_THREADS", "1")))
    except ValueError:
        return 1


def _load_matrix(path: str, name: str) -> np.ndarray:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"missing {name} file: {path}")
    try:
        return np.loadtxt(p, delimiter=",", ndmin=2, dtype=float)
    except Exception as exc:
        raise ConfigError(f"cannot parse {name} matrix from {path}: {exc}") from exc


def _parse_weights(text: str) -> PriorWeights:
    parts = text.split(",")
    if len(parts) != 3:
        raise InvalidPrior(f"prior must be three comma-separated numbers, got {text!r}")
    try:
        return as_prior(tuple(float(x) for x in parts))
    except ValueError as exc:
        raise InvalidPrior(f"cannot parse prior {text!r}: {exc}") from exc


def _parse_panel(text: str) -> tuple:
    if text.strip().lower() == "canonical":
        return CANONICAL_PANEL
    chunks = [c for c in text.replace("|", ";").split(";") if c.strip()]
    if not chunks:
        raise InvalidPrior(f"empty prior panel: {text!r}")
    return tuple(_parse_weights(c.strip()) for c in chunks)


def _parse_test_spec(text: str) -> TestSpec:
    """Descriptor ``id:criterion:shrinkage[:prior]``; prior is ``t0,t1,t2``
    (or ``canonical`` / a ;-joined panel for the composite mode)."""
    parts = text.split(":")
    if len(parts) < 3 or len(parts) > 4:
        raise ConfigError(
            f"test descriptor must be id:criterion:shrinkage[:prior], got {text!r}"
        )
    test_id, criterion, shrinkage = parts[0], parts[1], parts[2]
    prior_text = parts[3] if len(parts) == 4 else None
    if shrinkage == "composite":
        panel = _parse_panel(prior_text) if prior_text else CANONICAL_PANEL
        return TestSpec(test_id=test_id, criterion=criterion, shrinkage=shrinkage, panel=panel)
    prior = _parse_weights(prior_text) if prior_text else None
    return TestSpec(test_id=test_id, criterion=criterion, shrinkage=shrinkage, prior=prior)


def _write_record(path: str | None, section: str, fields: dict) -> None:
    if path is None:
        return
    out = Path(path)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        record = ConfigParser()
        record[section] = {k: str(v) for k, v in fields.items()}
        with out.open("w", encoding="utf-8") as fh:
            record.write(fh)
    except OSError as exc:
        raise IoError(f"cannot write record to {path}: {exc}") from exc


def _problem_from_args(args, need_c: bool = True) -> GlhtProblem:
    y = _load_matrix(args.y, "Y")
    x = _load_matrix(args.x, "X")
    if need_c:
        c = _load_matrix(args.c, "C")
    else:
        # The spectrum only needs the design; a single full-rank contrast
        # keeps the problem object well-formed.
        c = np.zeros((x.shape[0], 1))
        c[0, 0] = 1.0
        if x.shape[0] > 1:
            c[1, 0] = -1.0
    return GlhtProblem(y, x, c)


def _bounds_from_args(args, spectrum) -> RidgeBounds:
    bounds = default_ridge_bounds(spectrum)
    if getattr(args, "grid", None):
        bounds = RidgeBounds(bounds.lo, bounds.hi, args.grid)
    return bounds


# ---------------------------------------------------------------------------
# subcommands


def cmd_test(args) -> int:
    problem = _problem_from_args(args)
    artifacts = fit(problem)
    record: dict = {
        "subcommand": "test",
        "criterion": args.criterion,
        "shrinkage": args.shrinkage,
    }

    if args.shrinkage == "classical":
        m = m_matrix(artifacts, ClassicalInverse())
        lr, lh, bnp = raw_statistics(np.linalg.eigvalsh(m))
        print(f"shrinkage=classical raw_lr={lr!r} raw_lh={lh!r} raw_bnp={bnp!r}")
        print("note: no asymptotic standardization exists for the classical inverse")
        record.update(raw_lr=repr(lr), raw_lh=repr(lh), raw_bnp=repr(bnp))
        _write_record(args.out, "result", record)
        return 0

    if args.shrinkage == "identity":
        f = Identity()
    elif args.shrinkage == "higher":
        sel = select_higher_order(
            artifacts.spectrum, args.prior, _bounds_from_args(args, artifacts.spectrum)
        )
        f = sel.f_star
        record["xi_star"] = repr(sel.xi_star)
        print(f"selected={_describe_f(f)} xi_star={sel.xi_star!r}")
    elif args.ell is not None:
        if args.ell >= 0:
            raise ConfigError(f"--ell must be negative, got {args.ell}")
        f = Ridge(args.ell)
    else:
        sel = select_ridge(
            artifacts.spectrum, args.prior, _bounds_from_args(args, artifacts.spectrum)
        )
        f = sel.f_star
        record["xi_star"] = repr(sel.xi_star)
        print(f"ell_star={f.ell!r} xi_star={sel.xi_star!r}")

    outcome = test_from_fit(artifacts, f, args.criterion)
    print(
        f"criterion={outcome.criterion} shrinkage={_describe_f(f)} "
        f"standardized={outcome.standardized!r} p_value={outcome.p_value!r}"
    )
    record.update(
        f=_describe_f(f),
        raw_stat=repr(outcome.raw_stat),
        omega_hat=repr(outcome.omega_hat),
        delta_hat=repr(outcome.delta_hat),
        standardized=repr(outcome.standardized),
        p_value=repr(outcome.p_value),
        alpha=repr(args.alpha),
        reject=str(outcome.p_value < args.alpha),
    )
    _write_record(args.out, "result", record)
    return 0


def _describe_f(f) -> str:
    if isinstance(f, Ridge):
        return f"ridge({f.ell!r})"
    if isinstance(f, RidgeMixture):
        terms = ";".join(f"{r!r}*{w!r}" for r, w in f.terms)
        return f"mixture({terms})"
    if isinstance(f, Identity):
        return "identity"
    if isinstance(f, ClassicalInverse):
        return "classical"
    return repr(f)


def cmd_select(args) -> int:
    problem = _problem_from_args(args, need_c=False)
    artifacts = fit(problem)
    bounds = _bounds_from_args(args, artifacts.spectrum)
    if args.order == "higher":
        sel = select_higher_order(artifacts.spectrum, args.prior, bounds, args.roots)
    else:
        sel = select_ridge(artifacts.spectrum, args.prior, bounds)
    print(f"selected={_describe_f(sel.f_star)} xi_star={sel.xi_star!r} "
          f"evaluations={len(sel.trace)}")
    _write_record(
        args.out,
        "selection",
        {
            "order": args.order,
            "f_star": _describe_f(sel.f_star),
            "xi_star": repr(sel.xi_star),
            "evaluations": len(sel.trace),
        },
    )
    return 0


def cmd_composite(args) -> int:
    problem = _problem_from_args(args)
    cfg = CompositeConfig(
        panel=_parse_panel(args.panel),
        criterion=args.criterion,
        bootstrap_G=args.bootstrap_g,
        seed=args.seed,
    )
    outcome = composite_from_fit(fit(problem), cfg)
    record: dict = {
        "subcommand": "composite",
        "criterion": args.criterion,
        "bootstrap_G": args.bootstrap_g,
        "seed": args.seed,
    }
    for i, (prior, ell, stat) in enumerate(outcome.per_prior):
        print(f"prior[{i}]=({prior.t0!r},{prior.t1!r},{prior.t2!r}) "
              f"ell_star={ell!r} standardized={stat!r}")
        record[f"prior_{i}"] = f"{prior.t0!r},{prior.t1!r},{prior.t2!r}"
        record[f"ell_star_{i}"] = repr(ell)
        record[f"standardized_{i}"] = repr(stat)
    print(f"t_max={outcome.t_max!r} p_value={outcome.p_value!r}")
    record.update(t_max=repr(outcome.t_max), p_value=repr(outcome.p_value))
    _write_record(args.out, "result", record)
    return 0


def _sim_config_from_args(args, alt: AlternativeModel) -> SimConfig:
    groups_text = args.groups.strip().lower()
    if groups_text == "balanced":
        if args.N % args.k:
            raise ConfigError(f"N={args.N} is not divisible into {args.k} balanced groups")
        group_sizes = (args.N // args.k,) * args.k
    else:
        group_sizes = tuple(int(g) for g in args.groups.split(","))
    if not args.test:
        raise ConfigError("at least one --test descriptor is required")
    tests = tuple(_parse_test_spec(t) for t in args.test)
    return SimConfig(
        p=args.p,
        N=args.N,
        k=args.k,
        group_sizes=group_sizes,
        cov=CovModel(variant=args.cov, rho=args.rho),
        alt=alt,
        tests=tests,
        replicates=args.replicates,
        alpha=args.alpha,
        seed=args.seed,
        size_adjusted=getattr(args, "size_adjusted", True),
    )


def _print_rows(result) -> None:
    for row in result.rows:
        print(
            f"{row.test_id}: criterion={row.criterion} shrinkage={row.shrinkage} "
            f"c={row.c!r} signal={row.signal!r} rate={row.rate!r} se={row.se!r}"
        )
    print(f"wall_clock={result.wall_clock:.2f}s")


def cmd_simulate_size(args) -> int:
    cfg = _sim_config_from_args(args, AlternativeModel(variant="null"))
    result = empirical_size(cfg, threads=args.threads)
    persist(result, args.out)
    _print_rows(result)
    print(f"written: {args.out}")
    return 0


def cmd_simulate_power(args) -> int:
    alt = AlternativeModel(
        variant=args.alt, c=0.0, density=args.density, magnitude=args.magnitude
    )
    cfg = _sim_config_from_args(args, alt)
    c_grid = tuple(float(c) for c in args.c_grid.split(","))
    result = power_curve(cfg, c_grid, threads=args.threads)
    persist(result, args.out)
    _print_rows(result)
    print(f"written: {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specglht",
        description="Shrinkage-regularized high-dimensional linear hypothesis tests.",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__} (kernel backend: {backend_name()})",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_matrix_args(sp, need_c: bool = True) -> None:
        sp.add_argument("--y", required=True, help="observations CSV, p x N")
        sp.add_argument("--x", required=True, help="design CSV, k x N")
        if need_c:
            sp.add_argument("--c", required=True, help="constraints CSV, k x q")

    def add_common(sp) -> None:
        sp.add_argument("--criterion", choices=("LR", "LH", "BNP"), default="LR")
        sp.add_argument("--alpha", type=float, default=0.05)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"RNG seed (default {DEFAULT_SEED})")
        sp.add_argument("--out", default=None, help="machine-readable output path")

    sp = sub.add_parser("test", help="run one shrinkage test")
    add_matrix_args(sp)
    add_common(sp)
    sp.add_argument("--shrinkage", choices=("ridge", "identity", "classical", "higher"),
                    default="ridge")
    sp.add_argument("--ell", type=float, default=None,
                    help="fixed ridge parameter (negative); skips selection")
    sp.add_argument("--prior", type=_parse_weights, default=as_prior((1.0, 0.0, 0.0)),
                    help="prior weights t0,t1,t2 for selection (default 1,0,0)")
    sp.add_argument("--grid", type=int, default=None, help="selection grid size")
    sp.set_defaults(func=cmd_test)

    sp = sub.add_parser("select", help="select a shrinkage for a prior weighting")
    add_matrix_args(sp, need_c=False)
    add_common(sp)
    sp.add_argument("--prior", type=_parse_weights, default=as_prior((1.0, 0.0, 0.0)))
    sp.add_argument("--order", choices=("ridge", "higher"), default="ridge")
    sp.add_argument("--grid", type=int, default=None)
    sp.add_argument("--roots", type=int, default=12, help="root grid size (higher order)")
    sp.set_defaults(func=cmd_select)

    sp = sub.add_parser("composite", help="max-statistic test over a prior panel")
    add_matrix_args(sp)
    add_common(sp)
    sp.add_argument("--panel", default="canonical",
                    help="'canonical' or ;-separated prior triples")
    sp.add_argument("--bootstrap-g", type=int, default=10000)
    sp.set_defaults(func=cmd_composite)

    def add_sim_args(sp) -> None:
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--N", type=int, required=True)
        sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--groups", required=True,
                        help="comma-separated group sizes, or 'balanced'")
        sp.add_argument("--cov", choices=("identity", "dense", "toeplitz", "discrete"),
                        default="identity")
        sp.add_argument("--rho", type=float, default=0.5, help="toeplitz decay")
        sp.add_argument("--replicates", type=int, default=2000)
        sp.add_argument("--alpha", type=float, default=0.05)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--threads", type=int, default=_default_threads(),
                        help="worker threads (results are thread-count independent)")
        sp.add_argument("--test", action="append", default=[],
                        help="test descriptor id:criterion:shrinkage[:prior]; repeatable")
        sp.add_argument("--out", required=True, help="results CSV path")

    sp = sub.add_parser("simulate-size", help="empirical null rejection rates")
    add_sim_args(sp)
    sp.set_defaults(func=cmd_simulate_size)

    sp = sub.add_parser("simulate-power", help="power along a signal grid")
    add_sim_args(sp)
    sp.add_argument("--alt", choices=("dense", "sparse"), default="dense")
    sp.add_argument("--density", type=float, default=0.1)
    sp.add_argument("--magnitude", type=float, default=float(np.sqrt(10.0)))
    sp.add_argument("--c-grid", default="0,0.05,0.1,0.15,0.2",
                    help="comma-separated ascending signal scales starting at 0")
    size_group = sp.add_mutually_exclusive_group()
    size_group.add_argument("--size-adjusted", dest="size_adjusted", action="store_true",
                            default=True)
    size_group.add_argument("--no-size-adjusted", dest="size_adjusted", action="store_false")
    sp.set_defaults(func=cmd_simulate_power)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage already; normalize other codes
        return int(exc.code) if exc.code else 0
    except _VALIDATION_ERRORS as exc:
        # raised by custom --prior/... converters that argparse does not wrap
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SpecGlhtError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
