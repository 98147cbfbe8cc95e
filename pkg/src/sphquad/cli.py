"""Command line interface: ``sphquad <command> ...``.

Exit codes: 0 success, 2 usage or parameter error, 3 construction failure
(singular Gram matrix, recurrence breakdown, non-converged iteration),
4 input/output error.  Output files default to the directory named by
``SPHQUAD_OUTPUT_DIR`` (current directory when unset).
"""
import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import (ConstructionError, ConvergenceError, DataFormatError,
                     DomainError, InvalidParameterError, ResourceLimitError)

log = logging.getLogger("sphquad")

OUTPUT_ENV = "SPHQUAD_OUTPUT_DIR"
EXIT_OK, EXIT_USAGE, EXIT_CONSTRUCTION, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _out_path(arg, default_name):
    if arg:
        return Path(arg)
    base = Path(os.environ.get(OUTPUT_ENV, "."))
    base.mkdir(parents=True, exist_ok=True)
    return base / default_name


def _emit_json(obj, out):
    if out:
        io.write_json(out, obj)
        log.info("wrote %s", out)
    else:
        print(json.dumps(io._jsonable(obj), indent=2, sort_keys=True))


def _positive(name):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer") from None
        if v < 0:
            raise argparse.ArgumentTypeError(f"{name} must be >= 0")
        return v
    return conv


def _existing(path):
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {p}")
    return p


# ----------------------------------------------------------------------------
# commands


def cmd_pointgen(args):
    from .geometry import dyadic_triangulation, random_points, triangulated_measure

    if args.random:
        if args.count is None:
            raise UsageError("--random needs --count")
        C = random_points(args.seed, args.count, args.q)
    elif args.dyadic is not None:
        C = dyadic_triangulation(args.dyadic).point_set()
    else:
        src = io.read_points(_existing(args.triangulate))
        sel = triangulated_measure(src.points)
        log.info("level %d keeps %d of %d points", sel.level, len(sel.point_set), len(src))
        C = sel.point_set
    out = _out_path(args.out, "points.csv")
    io.write_points(out, C, with_measure=not args.no_measure)
    log.info("wrote %d points to %s", len(C), out)


def cmd_weights_lsq(args):
    from .quadrature import SolverOptions, lsq_weights

    C = io.read_points(_existing(args.points))
    mode = "explicit-gram" if args.method == "cholesky" else args.mode
    opts = SolverOptions(rel_tol=args.tol, max_iter=args.max_iter, mode=mode, method=args.method)
    rule = lsq_weights(C, args.degree, opts)
    out = _out_path(args.out, "rule.csv")
    io.write_rule(out, rule, {"points": str(args.points)})
    log.info("LSQ degree %d on %d nodes: %s", args.degree, len(C),
             {k: v for k, v in rule.info.items() if k != "b"})


def cmd_weights_rec(args):
    from .quadrature import rec_weights, reference_rule

    C = io.read_points(_existing(args.points))
    seed_degree = args.seed_degree if args.seed_degree is not None else args.degree
    rule, achieved = rec_weights(C, args.degree, reference_rule(seed_degree))
    out = _out_path(args.out, "rule.csv")
    io.write_rule(out, rule, {"points": str(args.points), "seed_degree": seed_degree})
    log.info("REC target %d: certified degree %d", args.degree, achieved)
    if achieved < args.degree:
        log.warning("certified degree %d is below the target %d", achieved, args.degree)


def cmd_verify(args):
    from .quadrature import gram_spectrum, verify_exactness

    rule = io.read_rule(_existing(args.rule))
    degree = args.degree if args.degree is not None else rule.exactness_degree
    rep = verify_exactness(rule, degree)
    if args.spectrum:
        if np.any(rule.weights <= 0):
            raise InvalidParameterError("--spectrum needs positive weights as a measure")
        rep.set_spectrum(*gram_spectrum(rule.as_point_set(), args.spectrum_degree or degree // 2)[:2])
    report = {"degree": degree, "nodes": len(rule), **rep.as_dict()}
    _emit_json(report, args.out)
    if args.tol is not None and rep.gcom_max_err > args.tol:
        log.error("gcom_max_err %.3e exceeds %.1e", rep.gcom_max_err, args.tol)
        return EXIT_CONSTRUCTION
    return EXIT_OK


def cmd_mz_check(args):
    from .quadrature import mz_check

    if args.rule:
        C = io.read_rule(_existing(args.rule))
    else:
        C = io.read_points(_existing(args.points))
    p = float("inf") if args.p == "inf" else float(args.p)
    st = mz_check(C, args.degree, p, args.trials, args.seed)
    _emit_json({"degree": args.degree, "p": args.p, "trials": args.trials,
                "ratio_min": st.ratio_min, "ratio_max": st.ratio_max,
                "inverse_max": st.inverse_max}, args.out)


def cmd_kernel_profile(args):
    from .kernel import KernelSpec, kernel_diagnostics, kernel_profile
    from .specfun import Filter

    spec = KernelSpec(args.q, args.degree, Filter(args.filter))
    theta, vals = kernel_profile(spec, args.count, args.theta_max)
    out = _out_path(args.out, "kernel_profile.csv")
    io.write_table(out, ["theta", "phi"], np.column_stack([theta, vals]).tolist())
    if args.diagnostics:
        d = kernel_diagnostics(spec)
        io.write_json(out.with_suffix(".json"), vars(d))
    log.info("wrote %d samples to %s", args.count, out)


def cmd_approx(args):
    from .experiments import BENCHMARKS, benchmark
    from .operators import OperatorSpec, sigma_eval
    from .specfun import Filter

    rule = io.read_rule(_existing(args.rule))
    X = io.read_points(_existing(args.test_points), renormalize=True).points
    spec = OperatorSpec(rule, Filter(args.filter), args.degree)
    path = {"coeff": "coefficient"}.get(args.path, args.path)
    if args.function in BENCHMARKS:
        f = benchmark(args.function)
        approx = sigma_eval(spec, f(rule.nodes), X, path)
        exact = f(X)
        err = np.abs(exact - approx)
        cols = ["x", "y", "z", "approx", "exact", "error"]
        table = np.column_stack([X, approx, exact, err])
        log.info("sup error %.6e over %d points", err.max(), len(X))
    else:
        Z = io.read_values(_existing(args.function))
        approx = sigma_eval(spec, Z, X, path)
        cols = ["x", "y", "z", "approx"]
        table = np.column_stack([X, approx])
    io.write_table(_out_path(args.out, "errors.csv"), cols, table.tolist())


def cmd_experiment(args):
    from .experiments import default_config, run_experiment

    overrides = io.read_json(_existing(args.config)) if args.config else {}
    if not isinstance(overrides, dict):
        raise DataFormatError(f"{args.config}: config must be a JSON object")
    # flags > config file > defaults
    outdir = args.out_dir or overrides.get("output") or os.environ.get(OUTPUT_ENV, ".")
    overrides["output"] = str(outdir)
    cfg = default_config(args.name, args.full).merged(overrides)
    res = run_experiment(args.name, cfg)
    log.info("%s finished in %.1f s; outputs in %s", args.name, res.seconds, outdir)


def cmd_ingest(args):
    C, values = io.ingest_lonlat(_existing(args.input))
    pts = _out_path(args.out_points, "points.csv")
    io.write_points(pts, C)
    data = _out_path(args.out_data, "data.csv")
    io.write_table(data, ["value"], values[:, None].tolist())
    log.info("ingested %d sites", len(C))


# ----------------------------------------------------------------------------
# parser


def build_parser():
    p = argparse.ArgumentParser(prog="sphquad", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None,
                   help="BLAS threads (default: library default, all cores)")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)
    deg = _positive("degree")

    s = sub.add_parser("pointgen", help="generate a point set")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--random", action="store_true", help="uniform random points")
    g.add_argument("--dyadic", type=_positive("level"), metavar="LEVEL",
                   help="centers of the dyadic triangulation with area measure")
    g.add_argument("--triangulate", metavar="FILE",
                   help="select points of FILE by dyadic triangles (area measure)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=_positive("count"))
    s.add_argument("--q", type=int, default=2)
    s.add_argument("--no-measure", action="store_true", help="omit the v column")
    s.add_argument("--out")
    s.set_defaults(func=cmd_pointgen)

    s = sub.add_parser("weights-lsq", help="least-squares quadrature weights")
    s.add_argument("--points", required=True)
    s.add_argument("--degree", type=deg, required=True)
    s.add_argument("--tol", type=float, default=1e-14)
    s.add_argument("--max-iter", type=int, default=None)
    s.add_argument("--mode", choices=["matrix-free", "explicit-gram"], default="matrix-free")
    s.add_argument("--method", choices=["cg", "cholesky"], default="cg")
    s.add_argument("--out")
    s.set_defaults(func=cmd_weights_lsq)

    s = sub.add_parser("weights-rec", help="quadrature weights by the orthonormal recurrence")
    s.add_argument("--points", required=True)
    s.add_argument("--degree", type=deg, required=True)
    s.add_argument("--seed-degree", type=deg, default=None)
    s.add_argument("--out")
    s.set_defaults(func=cmd_weights_rec)

    s = sub.add_parser("verify", help="exactness report of a rule")
    s.add_argument("--rule", required=True)
    s.add_argument("--degree", type=deg, default=None)
    s.add_argument("--tol", type=float, default=None,
                   help="exit with code 3 when gcom_max_err exceeds this")
    s.add_argument("--spectrum", action="store_true",
                   help="also report the Gram spectrum with the weights as measure")
    s.add_argument("--spectrum-degree", type=deg, default=None)
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("mz-check", help="Marcinkiewicz-Zygmund norm ratios")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--points")
    g.add_argument("--rule")
    s.add_argument("--degree", type=deg, required=True)
    s.add_argument("--p", choices=["1", "2", "inf"], default="2")
    s.add_argument("--trials", type=_positive("trials"), default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_mz_check)

    s = sub.add_parser("kernel-profile", help="sample Phi_n(h; cos theta)")
    s.add_argument("--degree", type=deg, required=True)
    s.add_argument("--filter", type=int, default=5)
    s.add_argument("--q", type=int, default=2)
    s.add_argument("--count", type=_positive("count"), default=512)
    s.add_argument("--theta-max", type=float, default=float(np.pi))
    s.add_argument("--diagnostics", action="store_true", help="write norms and decay slope")
    s.add_argument("--out")
    s.set_defaults(func=cmd_kernel_profile)

    s = sub.add_parser("approx", help="evaluate sigma_n at test points")
    s.add_argument("--rule", required=True)
    s.add_argument("--filter", type=int, default=5)
    s.add_argument("--degree", type=deg, required=True)
    s.add_argument("--function", required=True, help="g1..g5 or a CSV of node values")
    s.add_argument("--test-points", required=True)
    s.add_argument("--path", choices=["auto", "kernel", "coeff", "coefficient"], default="auto")
    s.add_argument("--out")
    s.set_defaults(func=cmd_approx)

    s = sub.add_parser("experiment", help="run a numerical experiment")
    s.add_argument("name", choices=["lsq-stats", "rec-stats", "localization",
                                    "error-percentiles", "noise"])
    s.add_argument("--config", help="JSON object overriding the defaults")
    s.add_argument("--full", action="store_true", help="published table sizes")
    s.add_argument("--out-dir")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("ingest", help="convert lon,lat,value CSV to points and data")
    s.add_argument("--input", required=True)
    s.add_argument("--out-points")
    s.add_argument("--out-data")
    s.set_defaults(func=cmd_ingest)
    return p


def run(argv=None):
    """Parse ``argv`` and run one command; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.threads is not None:
            from threadpoolctl import threadpool_limits
            with threadpool_limits(limits=args.threads):
                code = args.func(args)
        else:
            code = args.func(args)
        return EXIT_OK if code is None else code
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidParameterError, DomainError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConstructionError, ConvergenceError) as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except (DataFormatError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
