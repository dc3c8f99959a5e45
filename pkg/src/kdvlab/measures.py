"""Random fields on the torus: Gaussian ensembles, Gibbs reweighting, tail fits.

The base measure is the law of phi = sum_{n=1..M} (h_n c_n + l_n s_n) / n
with independent standard normal h_n, l_n.  The Gibbs measure reweights it by
f(u) = 1[|u|_{L2} <= r] * exp(kappa3 * integral of (P_N u)^3), represented
here by self-normalised importance weights on Gaussian draws.  Empirical
measures are carried as weighted ensembles together with the (s, p) metric
context they will be compared in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import flow, spectral
from .rng import derive_seed, substream
from .spectral import BASIS_TO_MODE, TorusField


class DegenerateEnsembleError(RuntimeError):
    """All importance weights vanished (every draw fell outside the cutoff)."""


class InsufficientDataError(RuntimeError):
    """Too few usable grid points or samples for a requested fit."""


@dataclass(frozen=True)
class GaussianSpec:
    """Truncation, seed and reporting exponents for the Gaussian sampler."""

    n_modes: int
    seed: int = 0
    s_report: tuple[float, ...] = (0.0, 0.25, 0.45)

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("sampler needs at least one mode")


@dataclass(frozen=True)
class GibbsSpec:
    """Cubic-exponential reweighting of a Gaussian base measure.

    ``projection=None`` means the cubic integral is taken of the full field;
    an integer N replaces it by the projection onto modes <= N.
    """

    base: GaussianSpec
    cubic_coefficient: float = 1.0 / 6.0
    cutoff_radius: float = 1.0
    projection: int | None = None

    def __post_init__(self):
        if not self.cutoff_radius > 0:
            raise ValueError("cutoff radius must be positive")
        if self.projection is not None and self.projection < 0:
            raise ValueError("projection cutoff must be >= 0")


class WeightedEnsemble:
    """Finite weighted collection of fields standing in for a measure.

    Samples are stored as a (n, M) array of mode amplitudes; weights are
    nonnegative and sum to one.  The (s, p) pair records the metric context
    the ensemble is meant to be compared in.
    """

    def __init__(self, coeffs, weights, s: float = 0.25, p: float = 2.0, provenance=None):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.ndim != 2 or coeffs.shape[0] == 0 or coeffs.shape[1] == 0:
            raise ValueError("ensemble needs a nonempty (n, M) coefficient array")
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (coeffs.shape[0],):
            raise ValueError("one weight per sample required")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite and nonnegative")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to one within 1e-12")
        self.coeffs = coeffs
        self.weights = weights
        self.s = float(s)
        self.p = float(p)
        self.provenance = dict(provenance or {})

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n_modes(self) -> int:
        return self.coeffs.shape[1]

    @property
    def samples(self) -> list[TorusField]:
        return [TorusField(row) for row in self.coeffs]

    def field(self, i: int) -> TorusField:
        return TorusField(self.coeffs[i])

    def effective_sample_size(self) -> float:
        return float(1.0 / np.sum(self.weights**2))

    def l2_norms(self) -> np.ndarray:
        return spectral.sobolev_norms_many(self.coeffs, 0.0)

    def hs_norms(self, s: float) -> np.ndarray:
        return spectral.sobolev_norms_many(self.coeffs, s)

    def weighted_mean(self, values: np.ndarray) -> float:
        return float(np.sum(self.weights * values))

    def padded(self, m: int) -> "WeightedEnsemble":
        if m < self.n_modes:
            raise ValueError("cannot pad to fewer modes")
        if m == self.n_modes:
            return self
        out = np.zeros((self.n, m), dtype=np.complex128)
        out[:, : self.n_modes] = self.coeffs
        return WeightedEnsemble(out, self.weights, self.s, self.p, self.provenance)

    def replace(self, coeffs=None, weights=None, provenance=None) -> "WeightedEnsemble":
        return WeightedEnsemble(
            self.coeffs if coeffs is None else coeffs,
            self.weights if weights is None else weights,
            self.s,
            self.p,
            self.provenance if provenance is None else provenance,
        )


def _gaussian_coeffs(spec: GaussianSpec, n: int) -> np.ndarray:
    m = spec.n_modes
    scale = BASIS_TO_MODE / np.arange(1, m + 1, dtype=np.float64)
    out = np.empty((n, m), dtype=np.complex128)
    for i in range(n):
        z = substream(spec.seed, i).standard_normal(2 * m)
        out[i] = (z[:m] - 1j * z[m:]) * scale
    return out


def sample_gaussian(spec: GaussianSpec, n: int, s: float = 0.25, p: float = 2.0) -> WeightedEnsemble:
    """Draw n independent fields from the Gaussian measure, uniform weights.

    Sample i consumes only the substream (seed, i): first the M cosine
    amplitudes h, then the M sine amplitudes l.  Results are identical
    regardless of how the draw loop is scheduled.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    coeffs = _gaussian_coeffs(spec, n)
    weights = np.full(n, 1.0 / n)
    prov = {"kind": "gaussian", "seed": spec.seed, "n_modes": spec.n_modes, "resampled": False}
    return WeightedEnsemble(coeffs, weights, s, p, prov)


def expected_hs_norm_sq(n_modes: int, s: float) -> float:
    """Closed-form E |phi|_{H^s}^2 = 2 sum_{n<=M} n^{2s-2}, valid for s < 1/2."""
    if s >= 0.5:
        raise ValueError("second moment formula requires s < 1/2")
    if s < 0:
        raise ValueError("regularity exponent must be >= 0")
    n = np.arange(1, n_modes + 1, dtype=np.float64)
    return float(2.0 * np.sum(n ** (2 * s - 2)))


def _gibbs_weights_raw(coeffs: np.ndarray, spec: GibbsSpec) -> np.ndarray:
    l2 = spectral.sobolev_norms_many(coeffs, 0.0)
    proj = coeffs
    if spec.projection is not None:
        proj = coeffs.copy()
        proj[:, spec.projection :] = 0.0
    cubic = spectral.integral_u3_many(proj)
    inside = l2 <= spec.cutoff_radius
    out = np.zeros(coeffs.shape[0])
    out[inside] = np.exp(spec.cubic_coefficient * cubic[inside])
    return out


def gibbs_weight(u: TorusField, spec: GibbsSpec) -> float:
    """Unnormalised Gibbs density of one field against the Gaussian base."""
    return float(_gibbs_weights_raw(u.modes[None, :], spec)[0])


def sample_gibbs(
    spec: GibbsSpec, n: int, s: float = 0.25, p: float = 2.0, resample: bool = False
) -> tuple[WeightedEnsemble, float]:
    """Importance-weighted Gibbs ensemble plus the normalisation estimate.

    Draws phi_i from the Gaussian base, sets w_i proportional to f(phi_i) and
    self-normalises; kappa is estimated by n / sum_i f(phi_i).  With
    ``resample=True`` the ensemble is multinomially resampled back to uniform
    weights (recorded in the provenance and the file flags).
    """
    if n < 1:
        raise ValueError("need at least one sample")
    coeffs = _gaussian_coeffs(spec.base, n)
    raw = _gibbs_weights_raw(coeffs, spec)
    total = raw.sum()
    if total == 0.0:
        raise DegenerateEnsembleError(
            "every draw fell outside the L2 cutoff; increase the sample count "
            "or change the seed"
        )
    kappa = n / total
    weights = raw / total
    prov = {
        "kind": "gibbs",
        "seed": spec.base.seed,
        "n_modes": spec.base.n_modes,
        "resampled": False,
        "kappa": kappa,
        "cutoff_radius": spec.cutoff_radius,
        "cubic_coefficient": spec.cubic_coefficient,
    }
    if resample:
        rng = substream(derive_seed(spec.base.seed, 0x5E5A), 0)
        idx = np.sort(rng.choice(n, size=n, p=weights))
        coeffs = coeffs[idx]
        weights = np.full(n, 1.0 / n)
        prov["resampled"] = True
    return WeightedEnsemble(coeffs, weights, s, p, prov), float(kappa)


def pushforward(ens: WeightedEnsemble, t: float, cfg: flow.SolverConfig) -> WeightedEnsemble:
    """Evolve every support point by the nonlinear flow; weights are carried along.

    Zero-weight points are not evolved (they carry no mass), which keeps the
    cost proportional to the effective support.
    """
    out = np.zeros((ens.n, cfg.n_modes), dtype=np.complex128)
    live = ens.weights > 0
    if np.any(live):
        out[live] = flow.evolve_many(ens.coeffs[live], t, cfg)
    keep = min(ens.n_modes, cfg.n_modes)
    out[~live, :keep] = ens.coeffs[~live, :keep]
    prov = dict(ens.provenance)
    prov["evolved_t"] = prov.get("evolved_t", 0.0) + t
    return WeightedEnsemble(out, ens.weights, ens.s, ens.p, prov)


def pushforward_linear(ens: WeightedEnsemble, t: float) -> WeightedEnsemble:
    """Exact pushforward under the linear group."""
    out = flow.linear_flow_many(ens.coeffs, t)
    prov = dict(ens.provenance)
    prov["evolved_t_linear"] = prov.get("evolved_t_linear", 0.0) + t
    return WeightedEnsemble(out, ens.weights, ens.s, ens.p, prov)


_FUNCTIONALS = ("linf", "l2", "hs")


def _functional_values(ens: WeightedEnsemble, functional: str, s: float | None) -> np.ndarray:
    if functional == "linf":
        return spectral.linf_norms_many(ens.coeffs)
    if functional == "l2":
        return ens.l2_norms()
    if functional == "hs":
        if s is None:
            raise ValueError("the hs functional needs an explicit s")
        return ens.hs_norms(s)
    raise ValueError(f"unknown functional {functional!r}; expected one of {_FUNCTIONALS}")


@dataclass(frozen=True)
class TailFit:
    """Weighted least-squares fit of log survival against R^2."""

    functional: str
    slope: float
    intercept: float
    r_squared: float
    radii: np.ndarray
    survival: np.ndarray
    used: np.ndarray  # boolean mask of grid points entering the fit


def tail_fit(
    ens: WeightedEnsemble, functional: str, radii, s: float | None = None
) -> TailFit:
    """Fit log P(F(u) > R) ~ intercept + slope * R^2 over the usable range.

    Grid points with survival outside [1e-3, 0.5] are excluded; fewer than
    three usable points raises :class:`InsufficientDataError`.  Points are
    weighted by their effective tail count, the inverse-variance scale of a
    log survival estimate.
    """
    if ens.effective_sample_size() < 500:
        raise InsufficientDataError("tail fits need >= 500 effective samples")
    radii = np.asarray(list(radii), dtype=np.float64)
    values = _functional_values(ens, functional, s)
    survival = np.array([ens.weights[values > r].sum() for r in radii])
    used = (survival >= 1e-3) & (survival <= 0.5)
    if used.sum() < 3:
        raise InsufficientDataError(
            f"only {int(used.sum())} usable grid points with survival in [1e-3, 0.5]"
        )
    x = radii[used] ** 2
    y = np.log(survival[used])
    w = survival[used] * ens.effective_sample_size()
    from .fitting import weighted_linear_fit

    fit = weighted_linear_fit(x, y, w)
    return TailFit(
        functional=functional,
        slope=fit.slope,
        intercept=fit.intercept,
        r_squared=fit.r_squared,
        radii=radii,
        survival=survival,
        used=used,
    )


@dataclass(frozen=True)
class FConvergenceResult:
    """Monte-Carlo estimates of E |f - f_N| over a projection grid."""

    projections: np.ndarray
    estimates: np.ndarray
    std_errors: np.ndarray
    pair_deltas: np.ndarray  # est[i] - est[i+1], paired over common samples
    pair_std_errors: np.ndarray
    loglog_slope: float


def f_convergence_probe(spec: GibbsSpec, projections, n: int) -> FConvergenceResult:
    """Estimate the L1 distance between the full and projected Gibbs densities.

    All projections are evaluated on one common set of base draws, so the
    per-N estimates and their successive differences come with paired
    standard errors.
    """
    projections = np.asarray(list(projections), dtype=np.int64)
    if np.any(np.diff(projections) <= 0):
        raise ValueError("projection grid must be strictly increasing")
    coeffs = _gaussian_coeffs(spec.base, n)
    full = _gibbs_weights_raw(coeffs, GibbsSpec(spec.base, spec.cubic_coefficient, spec.cutoff_radius, None))
    diffs = []
    for n_proj in projections:
        trunc = GibbsSpec(spec.base, spec.cubic_coefficient, spec.cutoff_radius, int(n_proj))
        diffs.append(np.abs(full - _gibbs_weights_raw(coeffs, trunc)))
    diffs = np.array(diffs)
    estimates = diffs.mean(axis=1)
    std_errors = diffs.std(axis=1, ddof=1) / math.sqrt(n)
    deltas = diffs[:-1] - diffs[1:]
    pair_deltas = deltas.mean(axis=1)
    pair_ses = deltas.std(axis=1, ddof=1) / math.sqrt(n)
    positive = estimates > 0
    if positive.sum() >= 2:
        from .fitting import weighted_linear_fit

        fit = weighted_linear_fit(np.log(projections[positive]), np.log(estimates[positive]))
        slope = fit.slope
    else:
        slope = float("nan")
    return FConvergenceResult(
        projections=projections,
        estimates=estimates,
        std_errors=std_errors,
        pair_deltas=pair_deltas,
        pair_std_errors=pair_ses,
        loglog_slope=slope,
    )
