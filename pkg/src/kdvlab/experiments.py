"""Configuration-driven experiment pipelines with reproducible reports.

Configs are flat ``key = value`` text files (see SCHEMA for the full key set
and types).  Every pipeline returns an :class:`ExperimentReport` carrying a
per-point series, a summary of fitted quantities, and provenance (config
hash, seed, package versions); reports depend only on (config, seed), never
on thread count or scheduling.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .fitting import bootstrap_weighted_mean, weighted_linear_fit
from .flow import SolverConfig, evolve, evolve_projected
from .kdve_io import write_ensemble
from .measures import (
    GaussianSpec,
    GibbsSpec,
    WeightedEnsemble,
    pushforward,
    pushforward_linear,
    sample_gaussian,
    sample_gibbs,
    tail_fit,
)
from .rng import derive_seed
from .spectral import (
    NORM_FACTOR,
    cosine_mode,
    integral_u3_many,
    linf_norms_many,
    sobolev_norm,
)
from .transport import (
    combined_metric_parts,
    pushforward_cost,
    wasserstein_p_exact,
)


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


EXPERIMENTS = (
    "continuity",
    "stability",
    "invariance_linear",
    "invariance_nonlinear",
    "galerkin",
    "tails",
)

PERTURBATIONS = ("mode_shift", "rescale", "resample")


@dataclass(frozen=True)
class ExperimentConfig:
    """Typed view of a flat experiment config; field names are the file keys."""

    experiment: str = "continuity"
    seed: int = 0
    out_dir: str = "runs/out"
    threads: int = 1
    format: str = "csv"
    # measure
    measure: str = "gibbs"
    modes: int = 16
    ensemble_size: int = 256
    cutoff_radius: float = 1.0
    cubic_coefficient: float = 1.0 / 6.0
    resample: bool = False
    # metric context
    s: float = 0.25
    p: float = 2.0
    # flow
    solver_modes: int = 48
    dt: float | None = None
    dealias: bool = True
    cfl_constant: float = 2.0
    time_grid: tuple[float, ...] = (0.25, 0.5, 1.0)
    horizon: float = 4.0
    # perturbation family
    perturbation: str = "mode_shift"
    perturbation_mode: int = 3
    perturbation_delta: float = 1e-3
    # galerkin / f-convergence
    projection_grid: tuple[int, ...] = (4, 8, 16, 32)
    sigma: float = 0.45
    # tails
    tail_functionals: tuple[str, ...] = ("linf", "l2", "hs")
    tail_grid_points: int = 12
    # statistics
    bootstrap_replicas: int = 200
    backend: str = "exact"
    epsilon: float | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.perturbation not in PERTURBATIONS:
            raise ConfigError(f"unknown perturbation {self.perturbation!r}")
        if self.measure not in ("gaussian", "gibbs"):
            raise ConfigError(f"unknown measure {self.measure!r}")
        if not self.p >= 1:
            raise ConfigError("the transport order must satisfy p >= 1")
        if self.experiment != "galerkin" and not 0 < self.s < 0.5:
            raise ConfigError("measure experiments need 0 < s < 1/2")
        if self.experiment == "galerkin" and not (0 <= self.s < self.sigma):
            raise ConfigError("galerkin needs 0 <= s < sigma")
        if any(abs(t) > self.horizon for t in self.time_grid):
            raise ConfigError("time grid exceeds the configured horizon")
        if any(t2 <= t1 for t1, t2 in zip(self.time_grid, self.time_grid[1:])):
            raise ConfigError("time grid must be strictly increasing")
        if self.ensemble_size < 1 or self.modes < 1:
            raise ConfigError("ensemble size and modes must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.backend not in ("exact", "entropic"):
            raise ConfigError("backend must be exact or entropic")
        if self.experiment in ("tails", "invariance_linear") and self.measure != "gaussian":
            raise ConfigError(f"{self.experiment} needs measure = gaussian")
        if self.experiment == "invariance_nonlinear" and self.measure != "gibbs":
            raise ConfigError("invariance_nonlinear needs measure = gibbs")

    def solver(self) -> SolverConfig:
        return SolverConfig(
            n_modes=self.solver_modes,
            dt=self.dt,
            dealias=self.dealias,
            cfl_constant=self.cfl_constant,
        )

    def gaussian_spec(self, seed: int | None = None) -> GaussianSpec:
        return GaussianSpec(n_modes=self.modes, seed=self.seed if seed is None else seed)

    def gibbs_spec(self, seed: int | None = None) -> GibbsSpec:
        return GibbsSpec(
            base=self.gaussian_spec(seed),
            cubic_coefficient=self.cubic_coefficient,
            cutoff_radius=self.cutoff_radius,
        )


_BOOL = {"true": True, "false": False, "yes": True, "no": False, "1": True, "0": False}


def _coerce(name: str, kind, raw: str):
    raw = raw.strip()
    try:
        if kind is bool:
            return _BOOL[raw.lower()]
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is str:
            return raw
        if kind == tuple[float, ...]:
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if kind == tuple[int, ...]:
            return tuple(int(v) for v in raw.split(",") if v.strip())
        if kind == tuple[str, ...]:
            return tuple(v.strip() for v in raw.split(",") if v.strip())
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc
    raise ConfigError(f"unsupported type for key {name}")


def parse_config_text(text: str, **overrides) -> ExperimentConfig:
    """Parse ``key = value`` lines; '#' starts a comment; keys match the schema."""
    schema = {f.name: f.type for f in fields(ExperimentConfig)}
    kinds = {
        "experiment": str, "seed": int, "out_dir": str, "threads": int, "format": str,
        "measure": str, "modes": int, "ensemble_size": int, "cutoff_radius": float,
        "cubic_coefficient": float, "resample": bool, "s": float, "p": float,
        "solver_modes": int, "dt": float, "dealias": bool, "cfl_constant": float,
        "time_grid": tuple[float, ...], "horizon": float, "perturbation": str,
        "perturbation_mode": int, "perturbation_delta": float,
        "projection_grid": tuple[int, ...], "sigma": float,
        "tail_functionals": tuple[str, ...], "tail_grid_points": int,
        "bootstrap_replicas": int, "backend": str, "epsilon": float,
    }
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in schema:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, kinds[key], raw)
    values.update(overrides)
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path, **overrides) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config_text(fh.read(), **overrides)


_RUNTIME_KEYS = {"threads", "out_dir", "format"}  # never affect the numbers


def config_hash(cfg: ExperimentConfig) -> str:
    payload = "\n".join(
        f"{f.name}={getattr(cfg, f.name)!r}"
        for f in fields(cfg)
        if f.name not in _RUNTIME_KEYS
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ExperimentReport:
    name: str
    series: list[dict]
    summary: dict
    provenance: dict

    def require_finite(self) -> None:
        def walk(obj, where):
            if isinstance(obj, dict):
                for k, v in obj.items():
                    walk(v, f"{where}.{k}")
            elif isinstance(obj, (list, tuple)):
                for i, v in enumerate(obj):
                    walk(v, f"{where}[{i}]")
            elif isinstance(obj, float) and not math.isfinite(obj):
                raise ValueError(f"non-finite report value at {where}")

        walk(self.summary, "summary")
        for i, row in enumerate(self.series):
            walk(row, f"series[{i}]")


def _provenance(cfg: ExperimentConfig) -> dict:
    import numpy
    import scipy

    from . import __version__

    return {
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "kdvlab_version": __version__,
        "numpy_version": numpy.__version__,
        "scipy_version": scipy.__version__,
    }


def write_report(report: ExperimentReport, out_dir, fmt: str = "csv") -> None:
    """Persist report.json plus the series as series.csv or series.json."""
    os.makedirs(out_dir, exist_ok=True)
    report.require_finite()
    payload = {
        "experiment": report.name,
        "summary": report.summary,
        "provenance": report.provenance,
    }
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if fmt == "json":
        with open(os.path.join(out_dir, "series.json"), "w") as fh:
            json.dump(report.series, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return
    with open(os.path.join(out_dir, "series.csv"), "w", newline="") as fh:
        if not report.series:
            fh.write("")
            return
        writer = csv.DictWriter(fh, fieldnames=list(report.series[0].keys()))
        writer.writeheader()
        for row in report.series:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


# --- shared pieces -----------------------------------------------------------


def _base_ensemble(cfg: ExperimentConfig, seed: int | None = None) -> tuple[WeightedEnsemble, float | None]:
    if cfg.measure == "gaussian":
        ens = sample_gaussian(cfg.gaussian_spec(seed), cfg.ensemble_size, cfg.s, cfg.p)
        return ens, None
    ens, kappa = sample_gibbs(
        cfg.gibbs_spec(seed), cfg.ensemble_size, cfg.s, cfg.p, resample=cfg.resample
    )
    return ens, kappa


def _perturb(ens: WeightedEnsemble, cfg: ExperimentConfig) -> WeightedEnsemble:
    """Apply the configured perturbation family to an ensemble."""
    if cfg.perturbation == "mode_shift":
        shift = cosine_mode(cfg.perturbation_mode, max(cfg.perturbation_mode, ens.n_modes))
        base = ens.padded(shift.n_modes)
        coeffs = base.coeffs + cfg.perturbation_delta * shift.modes[None, :]
        return base.replace(coeffs=coeffs, provenance={**ens.provenance, "perturbed": "mode_shift"})
    if cfg.perturbation == "rescale":
        coeffs = ens.coeffs * (1.0 + cfg.perturbation_delta)
        return ens.replace(coeffs=coeffs, provenance={**ens.provenance, "perturbed": "rescale"})
    ens2, _ = _base_ensemble(cfg, seed=derive_seed(cfg.seed, 0xFE))
    return ens2


def _measure_radii(cfg: ExperimentConfig, ens: WeightedEnsemble) -> dict:
    """The norm statistics entering the continuity envelope."""
    live = ens.weights > 0
    l2_sup = float(np.max(ens.l2_norms()[live]))
    hs_mom = float(np.sum(ens.weights * ens.hs_norms(cfg.s) ** cfg.p) ** (1.0 / cfg.p))
    return {"l2_sup": l2_sup, "hs_moment": hs_mom}


# --- experiment pipelines ----------------------------------------------------


def run_continuity(cfg: ExperimentConfig) -> ExperimentReport:
    """Track the combined distance of a coupled pair of ensembles through time.

    Builds a base ensemble and its perturbation, prices the time-zero optimal
    plan along the flow (an admissible coupling at every t, hence an upper
    bound), re-optimises the distance at every grid time, and fits
    log(distance ratio) linearly in t.
    """
    mu, _ = _base_ensemble(cfg)
    nu = _perturb(mu, cfg)
    solver = cfg.solver()
    d0 = combined_metric_parts(mu, nu, cfg.s, cfg.p, cfg.backend, cfg.epsilon)
    _, plan0 = wasserstein_p_exact(mu, nu, cfg.s, cfg.p)
    ra = _measure_radii(cfg, mu)
    rb = _measure_radii(cfg, nu)
    r1 = (ra["l2_sup"] + rb["l2_sup"]) ** 12
    r2 = ra["hs_moment"] + rb["hs_moment"]

    series = [
        {
            "t": 0.0,
            "w_inf": d0.w_inf,
            "w_p": d0.w_p,
            "combined": d0.total,
            "bound_w_inf": d0.w_inf,
            "bound_w_p": d0.w_p,
            "bound_combined": d0.total,
            "ratio": 1.0,
        }
    ]
    mu_t, nu_t = mu, nu
    t_prev = 0.0
    for t in cfg.time_grid:
        mu_t = pushforward(mu_t, t - t_prev, solver)
        nu_t = pushforward(nu_t, t - t_prev, solver)
        t_prev = t
        dt_parts = combined_metric_parts(mu_t, nu_t, cfg.s, cfg.p, cfg.backend, cfg.epsilon)
        bound = pushforward_cost(mu, nu, plan0, t, solver, cfg.s, cfg.p)
        series.append(
            {
                "t": t,
                "w_inf": dt_parts.w_inf,
                "w_p": dt_parts.w_p,
                "combined": dt_parts.total,
                "bound_w_inf": bound.w_inf_bound,
                "bound_w_p": bound.w_p_bound,
                "bound_combined": bound.combined_bound,
                "ratio": dt_parts.total / d0.total,
            }
        )
    ts = np.array([row["t"] for row in series[1:]])
    ratios = np.array([row["ratio"] for row in series[1:]])
    fit = weighted_linear_fit(np.abs(ts), np.log(ratios))
    bound_ok = all(
        row["bound_combined"] >= row["combined"] - 1e-12 for row in series
    )
    summary = {
        "base_distance": d0.total,
        "base_w_inf": d0.w_inf,
        "base_w_p": d0.w_p,
        "log_ratio_slope": fit.slope,
        "log_ratio_intercept": fit.intercept,
        "log_ratio_r_squared": fit.r_squared,
        "r1_l2_sup_pow12": r1,
        "r2_hs_moment_sum": r2,
        "bound_dominates": bound_ok,
        "backend": cfg.backend,
    }
    return ExperimentReport("continuity", series, summary, _provenance(cfg))


def run_stability(cfg: ExperimentConfig) -> ExperimentReport:
    """Compare an ensemble's drift from itself against its distance to the Gibbs one.

    The reference ensemble plays the invariant measure; the perturbed copy is
    evolved and the ratio of |nu^t - nu| to |nu - rho| is reported with the
    envelope ingredients of the perturbed ensemble.
    """
    rho, _ = _base_ensemble(cfg)
    nu = _perturb(rho, cfg)
    solver = cfg.solver()
    d_base = combined_metric_parts(rho, nu, cfg.s, cfg.p, cfg.backend, cfg.epsilon)
    rb = _measure_radii(cfg, nu)
    series = [{"t": 0.0, "distance": 0.0, "ratio": 0.0}]
    nu_t = nu
    t_prev = 0.0
    for t in cfg.time_grid:
        nu_t = pushforward(nu_t, t - t_prev, solver)
        t_prev = t
        dist = combined_metric_parts(nu, nu_t, cfg.s, cfg.p, cfg.backend, cfg.epsilon)
        ratio = dist.total / d_base.total if d_base.total > 0 else math.inf
        series.append({"t": t, "distance": dist.total, "ratio": ratio})
    finite_ratios = [row["ratio"] for row in series[1:] if math.isfinite(row["ratio"])]
    summary = {
        "distance_to_reference": d_base.total,
        "max_ratio": max(finite_ratios) if finite_ratios else math.inf,
        "r1_l2_sup_pow12": (1.0 + rb["l2_sup"]) ** 12,
        "r2_hs_moment": rb["hs_moment"],
        "backend": cfg.backend,
    }
    report = ExperimentReport("stability", series, summary, _provenance(cfg))
    return report


def _null_band(cfg: ExperimentConfig, n_replicas: int) -> np.ndarray:
    """Distances between independent same-law ensemble pairs (the zero baseline)."""

    def one(r: int) -> float:
        ens_a, _ = _base_ensemble(cfg, seed=derive_seed(cfg.seed, 0xA0, r, 0))
        ens_b, _ = _base_ensemble(cfg, seed=derive_seed(cfg.seed, 0xA0, r, 1))
        return combined_metric_parts(ens_a, ens_b, cfg.s, cfg.p, cfg.backend, cfg.epsilon).total

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            values = list(pool.map(one, range(n_replicas)))
    else:
        values = [one(r) for r in range(n_replicas)]
    return np.array(values)


def run_invariance(cfg: ExperimentConfig) -> ExperimentReport:
    if cfg.experiment == "invariance_linear" or cfg.measure == "gaussian":
        return _run_invariance_linear(cfg)
    return _run_invariance_nonlinear(cfg)


def _run_invariance_linear(cfg: ExperimentConfig) -> ExperimentReport:
    """Push a Gaussian ensemble by the free group; per-mode moments must not move."""
    ens = sample_gaussian(cfg.gaussian_spec(), cfg.ensemble_size, cfg.s, cfg.p)
    k = np.arange(1, ens.n_modes + 1, dtype=np.float64)
    base_moments = np.sum(ens.weights[:, None] * (NORM_FACTOR * np.abs(ens.coeffs) ** 2), axis=0)
    series = []
    worst = 0.0
    for t in cfg.time_grid:
        pushed = pushforward_linear(ens, t)
        moments = np.sum(
            pushed.weights[:, None] * (NORM_FACTOR * np.abs(pushed.coeffs) ** 2), axis=0
        )
        drift = float(np.max(np.abs(moments - base_moments)))
        hs_drift = {}
        for s_val in cfg.gaussian_spec().s_report:
            w = k ** (2 * s_val)
            before = float(np.sum(w * base_moments))
            after = float(np.sum(w * moments))
            hs_drift[f"hs_moment_drift_s{s_val}"] = abs(after - before)
        worst = max(worst, drift)
        series.append({"t": t, "max_mode_moment_drift": drift, **hs_drift})
    summary = {"worst_mode_moment_drift": worst, "n": ens.n, "modes": ens.n_modes}
    return ExperimentReport("invariance_linear", series, summary, _provenance(cfg))


def _run_invariance_nonlinear(cfg: ExperimentConfig) -> ExperimentReport:
    """Push a Gibbs ensemble by the nonlinear flow and test measure-level stillness.

    Weighted means of |u|_{L2}^2 and the cubic integral are compared against
    bootstrap standard errors of the unevolved ensemble; the combined distance
    between the ensemble and its pushforward is located inside the null band
    of independent same-law pair distances.
    """
    ens, kappa = _base_ensemble(cfg)
    solver = cfg.solver()
    t_star = cfg.time_grid[-1]
    pushed = pushforward(ens, t_star, solver)

    l2_sq0 = ens.l2_norms() ** 2
    l2_sq1 = pushed.l2_norms() ** 2
    cubic0 = integral_u3_many(ens.coeffs)
    cubic1 = integral_u3_many(pushed.coeffs)
    boot_seed = derive_seed(cfg.seed, 0xB5)
    b_l2 = bootstrap_weighted_mean(l2_sq0, ens.weights, cfg.bootstrap_replicas, boot_seed)
    b_cu = bootstrap_weighted_mean(cubic0, ens.weights, cfg.bootstrap_replicas, boot_seed + 1)
    drift_l2 = abs(float(np.sum(pushed.weights * l2_sq1)) - b_l2.mean)
    drift_cu = abs(float(np.sum(pushed.weights * cubic1)) - b_cu.mean)

    dist = combined_metric_parts(ens, pushed, cfg.s, cfg.p, cfg.backend, cfg.epsilon)
    null = _null_band(cfg, cfg.bootstrap_replicas)
    lo, hi = np.percentile(null, [2.5, 97.5])
    series = [
        {
            "t": t_star,
            "distance": dist.total,
            "null_lo95": float(lo),
            "null_hi95": float(hi),
            "l2_sq_mean": b_l2.mean,
            "l2_sq_pushed": float(np.sum(pushed.weights * l2_sq1)),
            "cubic_mean": b_cu.mean,
            "cubic_pushed": float(np.sum(pushed.weights * cubic1)),
        }
    ]
    summary = {
        "t": t_star,
        "kappa": kappa,
        "effective_sample_size": ens.effective_sample_size(),
        "l2_sq_drift": drift_l2,
        "l2_sq_se": b_l2.std_error,
        "l2_sq_drift_z": drift_l2 / b_l2.std_error if b_l2.std_error > 0 else math.inf,
        "cubic_drift": drift_cu,
        "cubic_se": b_cu.std_error,
        "cubic_drift_z": drift_cu / b_cu.std_error if b_cu.std_error > 0 else math.inf,
        "distance": dist.total,
        "null_lo95": float(lo),
        "null_hi95": float(hi),
        "inside_null_band": bool(lo <= dist.total <= hi),
        "null_replicas": int(null.size),
    }
    return ExperimentReport("invariance_nonlinear", series, summary, _provenance(cfg))


def run_galerkin(cfg: ExperimentConfig) -> ExperimentReport:
    """Convergence of the band-projected flow to the reference flow.

    The initial state is one Gaussian draw (slowly decaying spectrum, so the
    projection tail genuinely controls the data error); errors against the
    full-band reference are fitted log-log in the band size.
    """
    ens = sample_gaussian(cfg.gaussian_spec(), 1, cfg.s, cfg.p)
    u0 = ens.field(0)
    solver = cfg.solver()
    if max(cfg.projection_grid) > solver.n_modes:
        raise ConfigError("projection grid exceeds the solver truncation")
    t_star = cfg.time_grid[-1]
    reference = evolve(u0, t_star, solver)
    series = []
    errors = []
    for n_band in cfg.projection_grid:
        approx = evolve_projected(u0, t_star, n_band, solver)
        err = sobolev_norm(approx - reference, cfg.s)
        errors.append(err)
        series.append({"n_proj": int(n_band), "error": err})
    errors_arr = np.array(errors)
    fit = weighted_linear_fit(np.log(np.array(cfg.projection_grid, dtype=float)), np.log(errors_arr))
    monotone = bool(np.all(errors_arr[1:] <= errors_arr[:-1] * 1.05 + 1e-14))
    summary = {
        "t": t_star,
        "s": cfg.s,
        "sigma": cfg.sigma,
        "loglog_slope": fit.slope,
        "loglog_r_squared": fit.r_squared,
        "slope_bound": -(cfg.sigma - cfg.s) + 0.5,
        "monotone_within_noise": monotone,
        "u0_hsigma_norm": sobolev_norm(u0, cfg.sigma),
        "u0_l2_norm": sobolev_norm(u0, 0.0),
    }
    return ExperimentReport("galerkin", series, summary, _provenance(cfg))


def run_tails(cfg: ExperimentConfig) -> ExperimentReport:
    """Gaussian tail-decay fits for the configured norm functionals."""
    ens = sample_gaussian(cfg.gaussian_spec(), cfg.ensemble_size, cfg.s, cfg.p)
    series = []
    summary = {}
    for functional in cfg.tail_functionals:
        if functional == "linf":
            values = linf_norms_many(ens.coeffs)
        elif functional == "l2":
            values = ens.l2_norms()
        else:
            values = ens.hs_norms(cfg.s)
        # survival targets spaced between 0.45 and ~2e-3 pick the usable range
        targets = np.exp(np.linspace(math.log(0.45), math.log(2e-3), cfg.tail_grid_points))
        radii = np.quantile(values, 1.0 - targets)
        fit = tail_fit(ens, functional, radii, s=cfg.s if functional == "hs" else None)
        for r_val, surv, used in zip(fit.radii, fit.survival, fit.used):
            series.append(
                {
                    "functional": functional,
                    "radius": float(r_val),
                    "survival": float(surv),
                    "used": bool(used),
                }
            )
        summary[f"{functional}_slope"] = fit.slope
        summary[f"{functional}_r_squared"] = fit.r_squared
    return ExperimentReport("tails", series, summary, _provenance(cfg))


_RUNNERS = {
    "continuity": run_continuity,
    "stability": run_stability,
    "invariance_linear": run_invariance,
    "invariance_nonlinear": run_invariance,
    "galerkin": run_galerkin,
    "tails": run_tails,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    return _RUNNERS[cfg.experiment](cfg)


def run_and_write(cfg: ExperimentConfig, out_dir=None) -> ExperimentReport:
    """Run the configured experiment and persist its report and ensembles."""
    report = run_experiment(cfg)
    target = out_dir if out_dir is not None else cfg.out_dir
    write_report(report, target, cfg.format)
    if cfg.experiment in ("continuity", "stability", "invariance_nonlinear", "tails"):
        ens, _ = _base_ensemble(cfg)
        write_ensemble(os.path.join(target, "base.kdve"), ens)
    return report
