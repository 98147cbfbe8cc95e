"""Reproducible numerical experiments: benchmark functions, LSQ and REC
statistics, localization on a cap, error percentiles and noise stability.

Every experiment takes an :class:`ExperimentConfig` and returns an
:class:`ExperimentResult` whose CSV output depends only on the
configuration (wall times go to the JSON provenance record only).
"""
from dataclasses import asdict, dataclass, field, fields
import logging
import math
import platform
import time
from pathlib import Path

import numpy as np

from .errors import ConstructionError, ConvergenceError, InvalidParameterError
from .geometry import (SphericalCap, dyadic_triangulation, geodesic_dist,
                       random_points, spawn_seeds, uniform_sphere)
from .io import read_points, read_rule, write_json, write_rule, write_table
from .operators import fourier_coeffs, least_squares_coeffs, synthesize
from .quadrature import (SolverOptions, gram_spectrum, lsq_weights,
                         reference_rule, rec_weights, verify_exactness)
from .quadrature.design import HarmonicDesign
from .specfun import Filter

log = logging.getLogger(__name__)

# ----------------------------------------------------------------------------
# benchmark functions

G5_CENTER = np.array([-0.5, -0.5, 1.0 / np.sqrt(2.0)])
G5_RADIUS = 1.0 / 3.0
LOCALIZATION_CAP = SphericalCap(np.array([-1.0, 0.0, -1.0]) / np.sqrt(2.0), 0.4510)


def _pos(t):
    return np.maximum(t, 0.0)


def _g1(x):
    return _pos(x[..., 0] - 0.9) ** 0.75 + _pos(x[..., 2] - 0.9) ** 0.75


def _g2(x):
    r2 = x[..., 0] ** 2 + x[..., 1] ** 2 + (x[..., 2] - 1.0) ** 2
    return _pos(0.01 - r2) + np.exp(x[..., 0] + x[..., 1] + x[..., 2])


def _g3(x):
    return 1.0 / (101.0 - 100.0 * x[..., 2])


def _g4(x):
    return 1.0 / np.sum(np.abs(x), axis=-1)


def _g5(x):
    d = geodesic_dist(x, G5_CENTER)
    return np.where(d < G5_RADIUS, np.cos(1.5 * np.pi * d) ** 2, 0.0)


BENCHMARKS = {"g1": _g1, "g2": _g2, "g3": _g3, "g4": _g4, "g5": _g5}


def benchmark(fid):
    """The benchmark function ``fid`` in {g1, ..., g5} as a callable of
    (..., 3) arrays."""
    try:
        return BENCHMARKS[fid]
    except KeyError:
        raise InvalidParameterError(f"unknown benchmark {fid!r}; "
                                    f"choose from {sorted(BENCHMARKS)}") from None


def benchmark_eval(fid, x):
    x = np.asarray(x, dtype=float)
    out = benchmark(fid)(x)
    return float(out) if np.ndim(out) == 0 else out


# ----------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class NoiseModel:
    """i.i.d. noise: uniform on [-scale, scale] or normal with std ``scale``."""

    kind: str = "uniform"
    scale: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("uniform", "gaussian"):
            raise InvalidParameterError("noise kind must be 'uniform' or 'gaussian'")
        if not self.scale > 0:
            raise InvalidParameterError("noise scale must be positive")

    def sample(self, count, repetitions=1):
        """(count, repetitions) array; column r comes from its own stream so
        it does not depend on how many repetitions are drawn."""
        out = np.empty((count, repetitions))
        for r, child in enumerate(np.random.SeedSequence(self.seed).spawn(repetitions)):
            rng = np.random.Generator(np.random.PCG64(child))
            if self.kind == "uniform":
                out[:, r] = rng.uniform(-self.scale, self.scale, size=count)
            else:
                out[:, r] = rng.normal(0.0, self.scale, size=count)
        return out


@dataclass(frozen=True)
class PointSource:
    """Where the nodes come from: ``random`` (seed, count), ``dyadic``
    (level; centers with area measure) or ``file`` (path)."""

    kind: str = "random"
    seed: int = 0
    count: int = 16384
    level: int = 5
    path: str | None = None

    def build(self, seed=None):
        if self.kind == "random":
            return random_points(self.seed if seed is None else seed, self.count)
        if self.kind == "dyadic":
            return dyadic_triangulation(self.level).point_set()
        if self.kind == "file":
            if not self.path:
                raise InvalidParameterError("point source 'file' needs a path")
            return read_points(self.path)
        raise InvalidParameterError(f"unknown point source {self.kind!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings shared by all experiments; each uses the fields it needs.

    ``lsq_cases`` holds (M, degree) pairs for the LSQ statistics,
    ``degrees`` the operator degrees (localization) or target degrees
    (REC).  ``solver`` is ``'cg'`` (matrix-free) or ``'cholesky'``
    (explicit Gram).  ``rule_path`` reuses a stored rule instead of
    rebuilding it.
    """

    points: PointSource = field(default_factory=PointSource)
    quad_degree: int = 62
    n: int = 31
    filters: tuple = (1, 5)
    functions: tuple = ("g1", "g2", "g3", "g4", "g5")
    test_count: int = 20000
    cap_test_count: int = 1000
    test_seed: int = 12345
    repetitions: int = 1
    seed: int = 2024
    degrees: tuple = ()
    lsq_cases: tuple = ()
    epsilons: tuple = (0.01,)
    noise_kinds: tuple = ("uniform",)
    solver: str = "cg"
    rule_path: str | None = None
    output: str | None = None

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise InvalidParameterError(f"unknown config keys: {sorted(unknown)}")
        if "points" in d and isinstance(d["points"], dict):
            d["points"] = PointSource(**d["points"])
        for key in ("filters", "functions", "degrees", "epsilons", "noise_kinds"):
            if key in d:
                d[key] = tuple(d[key])
        if "lsq_cases" in d:
            d["lsq_cases"] = tuple(tuple(c) for c in d["lsq_cases"])
        return cls(**d)

    def to_dict(self):
        return asdict(self)

    def merged(self, overrides):
        """Copy with ``overrides`` (a dict, possibly nested for points)."""
        base = self.to_dict()
        for k, v in overrides.items():
            if k == "points" and isinstance(v, dict):
                base["points"] = {**base["points"], **v}
            else:
                base[k] = v
        return ExperimentConfig.from_dict(base)


def default_config(name, full=False):
    """Desk-scale defaults per experiment; ``full`` switches to the sizes
    of the published tables."""
    big = PointSource("random", seed=7, count=65536) if full else PointSource("random", seed=7, count=16384)
    quad, n = (126, 63) if full else (62, 31)
    solver = "cholesky" if full else "cg"
    configs = {
        "lsq-stats": ExperimentConfig(
            points=PointSource("random", seed=1),
            repetitions=30, seed=1,
            lsq_cases=(((8192, 14), (8192, 42), (16384, 42), (32768, 42)) if full
                       else ((8192, 14),))),
        "rec-stats": ExperimentConfig(
            points=PointSource("dyadic", level=5),
            degrees=(16, 22, 32, 42, 44) if full else (16, 22, 32)),
        "localization": ExperimentConfig(
            test_count=10000, cap_test_count=1000, test_seed=99, filters=(1, 5),
            degrees=(63, 127, 255) if full else (63, 127)),
        "error-percentiles": ExperimentConfig(
            points=big, quad_degree=quad, n=n, solver=solver, test_seed=31),
        "noise": ExperimentConfig(
            points=big, quad_degree=quad, n=n, solver=solver, test_seed=41,
            repetitions=50, seed=5, epsilons=(0.01, 0.1),
            noise_kinds=("uniform", "gaussian")),
    }
    if name not in configs:
        raise InvalidParameterError(f"unknown experiment {name!r}; choose from {sorted(configs)}")
    return configs[name]


# ----------------------------------------------------------------------------
# results


@dataclass
class ExperimentResult:
    name: str
    columns: list
    rows: list
    config: ExperimentConfig
    extra: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    seconds: float = 0.0

    def row(self, **match):
        """The first row whose entries equal ``match``."""
        for r in self.rows:
            if all(r.get(k) == v for k, v in match.items()):
                return r
        raise KeyError(match)

    def write(self, outdir):
        """``<name>.csv`` (plus any secondary tables) and
        ``<name>.provenance.json`` in ``outdir``."""
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        paths = [outdir / f"{self.name}.csv"]
        write_table(paths[0], self.columns, self.rows)
        for key, (cols, rows) in self.tables.items():
            p = outdir / f"{self.name}.{key}.csv"
            write_table(p, cols, rows)
            paths.append(p)
        prov = {
            "experiment": self.name,
            "config": self.config.to_dict(),
            "wall_seconds": self.seconds,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "outputs": [p.name for p in paths],
            **self.extra,
        }
        p = outdir / f"{self.name}.provenance.json"
        write_json(p, prov)
        return paths + [p]


def _timed(fn):
    def run(cfg=None, **kw):
        t0 = time.perf_counter()
        res = fn(cfg, **kw)
        res.seconds = time.perf_counter() - t0
        if res.config.output:
            res.write(res.config.output)
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    run.__wrapped__ = fn
    return run


THRESHOLDS = tuple(range(10, 1, -1))


def percentages(errors, exponents=THRESHOLDS):
    """Percentage of entries with |error| < 10^{-x} for each x."""
    errors = np.abs(np.asarray(errors))
    return {x: 100.0 * float(np.mean(errors < 10.0 ** (-x))) for x in exponents}


def _xcol(x):
    return f"x={x:g}"


# ----------------------------------------------------------------------------
# LSQ and REC statistics


@_timed
def exp_lsq_stats(cfg=None):
    """Averages of the verification report over random point sets.

    One row per (M, degree) in ``cfg.lsq_cases``; failed constructions are
    counted in ``failures`` and excluded from the means.  ``all_positive``
    counts repetitions in which every weight is positive; ``near_singular``
    counts those with condition number above 1e8.
    """
    cfg = cfg or default_config("lsq-stats")
    if not cfg.lsq_cases:
        raise InvalidParameterError("lsq-stats needs lsq_cases")
    seeds = spawn_seeds(cfg.seed, cfg.repetitions)
    cols = ["M", "degree", "error", "abs_sum", "min_w", "max_w", "pos",
            "kappa", "lambda_min", "lambda_max", "all_positive", "near_singular",
            "failures", "repetitions"]
    run_cols = ["M", "degree", "rep", "seed", "status", "error", "abs_sum", "min_w",
                "max_w", "pos", "kappa", "lambda_min", "lambda_max", "iterations"]
    rows, runs = [], []
    opts = SolverOptions(**_solver_kw(cfg.solver))
    for M, deg in cfg.lsq_cases:
        recs = []
        for rep, s in enumerate(seeds):
            C = random_points(s, int(M))
            design = HarmonicDesign(C.points, deg)
            run = {"M": M, "degree": deg, "rep": rep, "seed": s}
            try:
                rule = lsq_weights(C, deg, opts, design=design)
                rep_ = verify_exactness(rule, deg)
                rep_.set_spectrum(*gram_spectrum(C, deg, design=design)[:2])
                run.update(status="ok", iterations=rule.info.get("iterations", 0),
                           error=rep_.gcom_max_err, abs_sum=rep_.weight_abs_sum,
                           min_w=rep_.min_w, max_w=rep_.max_w, pos=rep_.positive_count,
                           kappa=rep_.condition, lambda_min=rep_.lambda_min,
                           lambda_max=rep_.lambda_max)
                recs.append(run)
            except (ConstructionError, ConvergenceError) as exc:
                log.warning("M=%d degree=%d rep=%d failed: %s", M, deg, rep, exc)
                run.update({k: math.nan for k in run_cols if k not in run})
                run.update(status="failed", iterations=0, pos=0)
            runs.append(run)
        row = {"M": M, "degree": deg, "repetitions": len(seeds),
               "failures": len(seeds) - len(recs),
               "all_positive": sum(r["pos"] == M for r in recs),
               "near_singular": sum(r["kappa"] > 1e8 for r in recs)}
        for k in ("error", "abs_sum", "min_w", "max_w", "pos", "kappa",
                  "lambda_min", "lambda_max"):
            row[k] = float(np.mean([r[k] for r in recs])) if recs else math.nan
        rows.append(row)
    return ExperimentResult("lsq-stats", cols, rows, cfg, tables={"runs": (run_cols, runs)},
                            extra={"seeds": seeds})


@_timed
def exp_rec_stats(cfg=None):
    """REC rules on the configured nodes for each target degree.

    ``error`` is the G^COM error at the target degree; ``certified`` the
    largest degree passing at 1e-8.  Failures are recorded per row.
    """
    cfg = cfg or default_config("rec-stats")
    C = cfg.points.build()
    cols = ["degree", "error", "min_w", "max_w", "sum_w", "certified", "status"]
    rows = []
    timings = {}
    for deg in cfg.degrees:
        t0 = time.perf_counter()
        try:
            rule, achieved = rec_weights(C, deg)
            rep = verify_exactness(rule, deg)
            rows.append({"degree": deg, "error": rep.gcom_max_err, "min_w": rep.min_w,
                         "max_w": rep.max_w, "sum_w": rep.weight_sum,
                         "certified": achieved, "status": "ok"})
        except ConstructionError as exc:
            log.warning("REC degree %d failed: %s", deg, exc)
            rows.append({"degree": deg, "error": math.nan, "min_w": math.nan,
                         "max_w": math.nan, "sum_w": math.nan, "certified": -1,
                         "status": "failed"})
        timings[str(deg)] = time.perf_counter() - t0
    return ExperimentResult("rec-stats", cols, rows, cfg,
                            extra={"nodes": len(C), "seconds_per_degree": timings})


# ----------------------------------------------------------------------------
# approximation experiments


def _solver_kw(name):
    if name == "cg":
        return {"mode": "matrix-free", "method": "cg"}
    if name == "cholesky":
        return {"mode": "explicit-gram", "method": "cholesky"}
    raise InvalidParameterError("solver must be 'cg' or 'cholesky'")


def build_rule(cfg):
    """Point set and the LSQ rule of degree ``cfg.quad_degree`` on it (or
    the stored rule at ``cfg.rule_path``)."""
    C = cfg.points.build()
    if cfg.rule_path and Path(cfg.rule_path).exists():
        rule = read_rule(cfg.rule_path)
        if rule.exactness_degree < cfg.quad_degree or len(rule) != len(C) \
                or not np.array_equal(rule.nodes, C.points):
            raise InvalidParameterError(f"{cfg.rule_path} does not match the configured nodes/degree")
        return C, rule
    rule = lsq_weights(C, cfg.quad_degree, SolverOptions(**_solver_kw(cfg.solver)))
    if cfg.rule_path:
        write_rule(cfg.rule_path, rule)
    return C, rule


def sample_test_points(count, seed):
    """``count`` uniform random points from a stream separate from the nodes."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return uniform_sphere(rng, count)


@_timed
def exp_localization(cfg=None):
    """Sup errors of sigma_n(g1) on the sphere and on the cap K.

    The rule for each n is the reference product rule of degree 2n.  Sphere
    errors are maxima over ``test_count`` random points, cap errors over
    ``cap_test_count`` random points in K.
    """
    cfg = cfg or default_config("localization")
    rng = np.random.Generator(np.random.PCG64(cfg.test_seed))
    X = uniform_sphere(rng, cfg.test_count)
    K = LOCALIZATION_CAP.sample(cfg.cap_test_count, rng)
    f = benchmark("g1")
    P = np.vstack([X, K])
    exact = f(P)
    cols = ["n"]
    for m in cfg.filters:
        cols.append(f"S2errh{m}")
    for m in cfg.filters:
        cols.append(f"Kerrh{m}")
    rows = []
    for n in cfg.degrees:
        rule = reference_rule(2 * n)
        coeffs = fourier_coeffs(rule, f(rule.nodes), n)
        row = {"n": n}
        for m in cfg.filters:
            err = np.abs(exact - synthesize(coeffs, P, Filter(m), n))
            row[f"S2errh{m}"] = float(err[: len(X)].max())
            row[f"Kerrh{m}"] = float(err[len(X):].max())
        rows.append(row)
        log.info("localization n=%d: %s", n, row)
    return ExperimentResult("localization", cols, rows, cfg,
                            extra={"cap_center": LOCALIZATION_CAP.center,
                                   "cap_radius": LOCALIZATION_CAP.radius})


def _method_values(rule, C, Z, n, filters, X):
    """Values at X of S<m> = sigma_n with filter h_m, and of LS, the
    unfiltered least-squares fit from degree <= n with the node measure."""
    design = HarmonicDesign(rule.nodes, n)
    coeffs = fourier_coeffs(rule, Z, n, design=design)
    out = {f"S{m}": synthesize(coeffs, X, Filter(m), n) for m in filters}
    ls = least_squares_coeffs(C, Z, n, SolverOptions(mode="explicit-gram", method="cholesky"),
                              design=design)
    out["LS"] = synthesize(ls, X)
    return out


@_timed
def exp_error_percentiles(cfg=None):
    """Percentage of random test points where |f - approximation| < 10^{-x},
    x = 10..2, for each benchmark and each method (S1, LS, S5)."""
    cfg = cfg or default_config("error-percentiles")
    C, rule = build_rule(cfg)
    X = sample_test_points(cfg.test_count, cfg.test_seed)
    Z = np.column_stack([benchmark(g)(C.points) for g in cfg.functions])
    exact = np.column_stack([benchmark(g)(X) for g in cfg.functions])
    vals = _method_values(rule, C, Z, cfg.n, cfg.filters, X)
    methods = _method_order(cfg.filters)
    cols = ["function", "method"] + [_xcol(x) for x in THRESHOLDS]
    rows = []
    for j, g in enumerate(cfg.functions):
        for meth in methods:
            pct = percentages(exact[:, j] - vals[meth][:, j])
            rows.append({"function": g, "method": meth,
                         **{_xcol(x): p for x, p in pct.items()}})
    return ExperimentResult("error-percentiles", cols, rows, cfg,
                            extra=_rule_summary(rule))


def _method_order(filters):
    s = [f"S{m}" for m in filters]
    return s[:1] + ["LS"] + s[1:]


def _rule_summary(rule):
    w = rule.weights
    return {"rule": {"nodes": len(rule), "exactness_degree": rule.exactness_degree,
                     "min_w": float(w.min()), "max_w": float(w.max()),
                     "solver": {k: v for k, v in rule.info.items() if not isinstance(v, np.ndarray)}}}


NOISE_THRESHOLDS = {"uniform": (5.0, 4.0, 3.0, 2.0), "gaussian": (3.0, 2.75, 2.5, 2.25)}


@_timed
def exp_noise(cfg=None):
    """Response of S1, LS and S5 to pure noise data (target f = 0).

    For each noise kind and scale, ``repetitions`` independent noise vectors
    are drawn; the error at a test point is the mean over repetitions of
    the absolute output.  Rows give the percentage of test points with
    error below 10^{-x}.  The ``scaling`` table divides the mean error by
    the noise scale; by linearity these ratios agree across scales.
    """
    cfg = cfg or default_config("noise")
    C, rule = build_rule(cfg)
    X = sample_test_points(cfg.test_count, cfg.test_seed)
    streams = spawn_seeds(cfg.seed, len(cfg.noise_kinds) * len(cfg.epsilons))
    cases, blocks = [], []
    for i, kind in enumerate(cfg.noise_kinds):
        for j, eps in enumerate(cfg.epsilons):
            model = NoiseModel(kind, float(eps), streams[i * len(cfg.epsilons) + j])
            cases.append(model)
            blocks.append(model.sample(len(C), cfg.repetitions))
    Z = np.hstack(blocks)
    vals = _method_values(rule, C, Z, cfg.n, cfg.filters, X)
    methods = _method_order(cfg.filters)
    xs = sorted({x for k in cfg.noise_kinds for x in NOISE_THRESHOLDS[k]}, reverse=True)
    cols = ["kind", "epsilon", "method"] + [_xcol(x) for x in xs]
    rows, scaling = [], []
    R = cfg.repetitions
    for c, model in enumerate(cases):
        for meth in methods:
            err = np.mean(np.abs(vals[meth][:, c * R:(c + 1) * R]), axis=1)
            pct = percentages(err, NOISE_THRESHOLDS[model.kind])
            rows.append({"kind": model.kind, "epsilon": model.scale, "method": meth,
                         **{_xcol(x): pct.get(x, "") for x in xs}})
            scaling.append({"kind": model.kind, "epsilon": model.scale, "method": meth,
                            "mean_err_over_eps": float(err.mean() / model.scale),
                            "max_err_over_eps": float(err.max() / model.scale)})
    return ExperimentResult(
        "noise", cols, rows, cfg,
        tables={"scaling": (["kind", "epsilon", "method", "mean_err_over_eps",
                             "max_err_over_eps"], scaling)},
        extra={**_rule_summary(rule), "noise_seeds": [m.seed for m in cases]})


EXPERIMENTS = {
    "lsq-stats": exp_lsq_stats,
    "rec-stats": exp_rec_stats,
    "localization": exp_localization,
    "error-percentiles": exp_error_percentiles,
    "noise": exp_noise,
}


def run_experiment(name, cfg=None, full=False, overrides=None):
    """Run experiment ``name`` with defaults, optionally overridden."""
    if name not in EXPERIMENTS:
        raise InvalidParameterError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    base = cfg or default_config(name, full)
    if overrides:
        base = base.merged(overrides)
    return EXPERIMENTS[name](base)
