"""Command line front end.

Five subcommands cover the library's checkable claims:

    invariant    solve for the strongly invariant base measure
    fixpoint     run the monotone iteration for the fixed density
    verify       measure every identity defect for a configured system
    sample       draw trajectory records and validate them empirically
    ergodicity   compute the invariant-function dimension, decompose

Exit codes: 0 all checks passed, 1 an identity failed its tolerance,
2 config or precondition problem, 3 the invariant vector is not unique,
4 the fixed density is degenerate, 5 sampling hit a zero-mass state or
the iteration mass collapsed, 6 the fixed point is not extremal at the
requested depth.

Every JSON report embeds the tool version and a sha256 of the
canonical config so downstream diffs can tell configs apart.  All
output is byte-stable for a fixed config, seed and tolerance,
regardless of worker count.
"""

import argparse
import os
import sys
import warnings

import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    DegenerateH,
    MassCollapse,
    NotFixedPoint,
    ShiftPathError,
    ZeroMassConditioning,
)
from .extremality import decompose, relative_ergodicity_dimension
from .invariant import strongly_invariant_measure, verify_strong_invariance
from .io import (
    build_base_measure_from_config,
    build_filter_from_config,
    build_overrides_from_config,
    build_subshift_from_config,
    build_weight_from_config,
    config_sha256,
    load_config,
    write_csv,
    write_function_csv,
    write_measure_csv,
    write_report,
)
from .measures import fixed_density_measure, masses_along_orbit
from .pathspace import (
    build_path_measure,
    check_consistency,
    check_isometry,
    check_quasi_invariance,
    empirical_check,
    sample_paths,
)
from .subshift import CylinderFunction, word_string
from .transfer import (
    check_weight_pushforward,
    iterate_fixed_function,
    left_fixed_functional,
)

EXIT_OK = 0
EXIT_IDENTITY = 1
EXIT_CONFIG = 2
EXIT_NON_UNIQUE = 3
EXIT_DEGENERATE = 4
EXIT_SAMPLING = 5
EXIT_NON_EXTREMAL = 6


def _base_report(args, cfg, command):
    return {
        "tool": "shiftpath",
        "version": __version__,
        "command": command,
        "config_sha256": config_sha256(cfg),
    }


def _outpath(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _solve_base(shift, cfg, rho, args):
    mu0 = build_base_measure_from_config(shift, cfg, rho=rho)
    if mu0 is None:
        v = build_weight_from_config(shift, cfg)
        mu0 = fixed_density_measure(shift, v, rho=rho, max_iter=args.max_iter)
    return mu0


def _invariant_quiet(shift):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return strongly_invariant_measure(shift)


def cmd_invariant(args):
    cfg = load_config(args.config)
    shift = build_subshift_from_config(cfg)
    rho = _invariant_quiet(shift)
    defects = {
        str(d): float(verify_strong_invariance(rho, d))
        for d in range(1, args.depth + 1)
    }
    write_measure_csv(
        _outpath(args, "invariant_measure.csv"),
        shift,
        args.depth,
        rho.masses_at(args.depth),
    )
    report = _base_report(args, cfg, "invariant")
    report.update(
        {
            "depth": args.depth,
            "symbol_masses": [float(x) for x in rho.q],
            "unique": not rho.non_unique,
            "defects": defects,
            "tolerance": args.tol,
        }
    )
    worst = max(defects.values())
    report["passed"] = worst <= args.tol and not rho.non_unique
    write_report(_outpath(args, "invariant_report.json"), report)
    if rho.non_unique:
        return EXIT_NON_UNIQUE
    if worst > args.tol:
        return EXIT_IDENTITY
    return EXIT_OK


def cmd_fixpoint(args):
    cfg = load_config(args.config)
    shift = build_subshift_from_config(cfg)
    v = build_weight_from_config(shift, cfg)
    result = iterate_fixed_function(shift, v, tol=args.tol, max_iter=args.max_iter)
    nu = left_fixed_functional(shift, v)
    h = result.h
    pairing = None
    if nu is not None and h.depth >= nu.depth:
        pairing = float(nu.integrate(h))
        if result.status == "converged" and pairing > 1e-12:
            h = h * (1.0 / pairing)
    write_function_csv(_outpath(args, "fixed_function.csv"), h)
    if nu is not None:
        write_measure_csv(
            _outpath(args, "fixed_functional.csv"), shift, nu.depth, nu.masses
        )
    report = _base_report(args, cfg, "fixpoint")
    report.update(
        {
            "status": result.status,
            "iterations": result.n_used,
            "residual": float(result.residual),
            "sup_h": float(h.values.max()),
            "min_h": float(h.values.min()),
            "pairing": pairing,
            "functional_found": nu is not None,
            "tolerance": args.tol,
        }
    )
    write_report(_outpath(args, "fixpoint_report.json"), report)
    if result.status == "degenerate":
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_verify(args):
    cfg = load_config(args.config)
    shift = build_subshift_from_config(cfg)
    v = build_weight_from_config(shift, cfg)
    rho = _invariant_quiet(shift)
    mu0 = _solve_base(shift, cfg, rho, args)
    overrides = build_overrides_from_config(shift, cfg)
    filt = build_filter_from_config(shift, cfg)
    # the verifier measures defects instead of refusing to construct
    pm = build_path_measure(
        shift, v, mu0, tol=float("inf"), marginal_overrides=overrides
    )

    residuals = {
        "base_fixed_point": float(pm.base_residual),
        "strong_invariance": max(
            float(verify_strong_invariance(rho, d)) for d in range(1, args.depth + 1)
        ),
        "marginal_consistency": max(
            float(check_consistency(pm, n, args.depth)) for n in range(args.steps)
        ),
        "quasi_invariance": float(check_quasi_invariance(pm, args.depth, args.steps)),
    }
    orbit = masses_along_orbit(shift, v, mu0, 10)
    residuals["mass_conservation"] = float(
        np.abs(orbit - mu0.total_mass()).max()
    )
    residuals["weight_pushforward"] = max(
        float(check_weight_pushforward(shift, v, CylinderFunction.indicator(shift, w), rho, n))
        for w in shift.words(args.depth)
        for n in range(1, 4)
    )
    if filt is not None:
        residuals["isometry"] = float(check_isometry(pm, filt, args.depth))

    worst = max(residuals.values())
    report = _base_report(args, cfg, "verify")
    report.update(
        {
            "depth": args.depth,
            "levels_checked": args.steps,
            "residuals": residuals,
            "worst_residual": worst,
            "tolerance": args.tol,
            "unique_invariant": not rho.non_unique,
            "passed": worst <= args.tol,
        }
    )
    write_report(_outpath(args, "verify_report.json"), report)
    return EXIT_OK if worst <= args.tol else EXIT_IDENTITY


def cmd_sample(args):
    cfg = load_config(args.config)
    shift = build_subshift_from_config(cfg)
    v = build_weight_from_config(shift, cfg)
    rho = _invariant_quiet(shift)
    mu0 = _solve_base(shift, cfg, rho, args)
    overrides = build_overrides_from_config(shift, cfg)
    pm = build_path_measure(
        shift, v, mu0, tol=args.tol, marginal_overrides=overrides
    )
    batch = sample_paths(
        pm, args.steps, args.samples, args.depth, args.seed, workers=args.workers
    )
    rows = (
        (
            str(i),
            word_string(batch.base_words[i]),
            word_string(batch.prepends[i]) if args.steps else "",
        )
        for i in range(len(batch))
    )
    write_csv(
        _outpath(args, "samples.csv"), ("sample_id", "base_word", "prepends"), rows
    )
    empirical = empirical_check(
        pm, args.steps, args.samples, args.depth, args.seed, workers=args.workers
    )
    report = _base_report(args, cfg, "sample")
    report.update(
        {
            "n_samples": args.samples,
            "n_steps": args.steps,
            "depth": args.depth,
            "seed": args.seed,
            "max_deviation": empirical.max_dev,
            "sigma_bound": empirical.sigma_bound,
            "worst_word": word_string(empirical.worst_word),
            "passed": empirical.passed,
        }
    )
    write_report(_outpath(args, "sample_report.json"), report)
    return EXIT_OK if empirical.passed else EXIT_IDENTITY


def cmd_ergodicity(args):
    cfg = load_config(args.config)
    shift = build_subshift_from_config(cfg)
    v = build_weight_from_config(shift, cfg)
    rho = _invariant_quiet(shift)
    mu0 = _solve_base(shift, cfg, rho, args)
    rep = relative_ergodicity_dimension(shift, mu0, v, args.depth, tol=args.tol)
    report = _base_report(args, cfg, "ergodicity")
    report.update(
        {
            "depth": args.depth,
            "solution_dim": rep.solution_dim,
            "extremal": rep.extremal_certificate,
            "base_residual": rep.base_residual,
            "singular_values": [float(s) for s in rep.singular_values],
            "tolerance": args.tol,
        }
    )
    if rep.extremal_certificate:
        report["decomposition"] = None
        write_report(_outpath(args, "ergodicity_report.json"), report)
        return EXIT_OK
    dec = decompose(shift, mu0, v, args.depth, tol=args.tol)
    if dec is None:
        report["decomposition"] = None
        report["note"] = "extra solutions vanish on the support of the base measure"
    else:
        report["decomposition"] = {
            "lambda": float(dec.lam),
            "component_masses": [
                float(dec.mu1.total_mass()),
                float(dec.mu2.total_mass()),
            ],
        }
        write_measure_csv(
            _outpath(args, "component_1.csv"),
            shift,
            args.depth,
            dec.mu1.masses_at(args.depth),
        )
        write_measure_csv(
            _outpath(args, "component_2.csv"),
            shift,
            args.depth,
            dec.mu2.masses_at(args.depth),
        )
    write_report(_outpath(args, "ergodicity_report.json"), report)
    return EXIT_NON_EXTREMAL


def _add_common(sp):
    sp.add_argument("--config", required=True, help="path to the JSON system config")
    sp.add_argument("--depth", type=int, default=3, help="cylinder depth (default 3)")
    sp.add_argument(
        "--tol", type=float, default=1e-10, help="identity tolerance (default 1e-10)"
    )
    sp.add_argument(
        "--max-iter",
        type=int,
        default=10000,
        help="iteration cap for solvers (default 10000)",
    )
    sp.add_argument(
        "--samples",
        type=int,
        default=100000,
        help="Monte Carlo sample count (default 100000)",
    )
    sp.add_argument("--seed", type=int, default=42, help="RNG seed (default 42)")
    sp.add_argument(
        "--steps",
        type=int,
        default=3,
        help="trajectory steps / levels to check (default 3)",
    )
    sp.add_argument(
        "--workers", type=int, default=1, help="sampler worker count (default 1)"
    )
    sp.add_argument(
        "--out", default=".", help="directory for reports and CSV files (default .)"
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="shiftpath",
        description="Weighted transfer fixed points and trajectory measures "
        "on subshifts of finite type.",
    )
    parser.add_argument(
        "--version", action="version", version=f"shiftpath {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, help_text in (
        ("invariant", cmd_invariant, "solve for the strongly invariant measure"),
        ("fixpoint", cmd_fixpoint, "iterate the weighted transfer fixed density"),
        ("verify", cmd_verify, "measure all identity defects for a config"),
        ("sample", cmd_sample, "draw trajectory records and check them"),
        ("ergodicity", cmd_ergodicity, "extremality dimension and decomposition"),
    ):
        sp = sub.add_parser(name, help=help_text)
        _add_common(sp)
        sp.set_defaults(func=fn)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"shiftpath: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ZeroMassConditioning, MassCollapse) as exc:
        print(f"shiftpath: sampling degenerated: {exc}", file=sys.stderr)
        return EXIT_SAMPLING
    except DegenerateH as exc:
        print(f"shiftpath: degenerate fixed density: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except NotFixedPoint as exc:
        print(f"shiftpath: not a fixed point: {exc}", file=sys.stderr)
        return EXIT_IDENTITY
    except ShiftPathError as exc:
        print(f"shiftpath: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"shiftpath: i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
