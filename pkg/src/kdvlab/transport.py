"""Optimal transport between weighted ensembles of torus fields.

Three solvers over the coupling polytope Marg(a, b):

* an exact one (optimal assignment for uniform equal-size marginals, a
  linear program otherwise),
* a bottleneck solver for the order-infinity distance (threshold bisection
  over the sorted distinct costs with a flow feasibility test),
* an entropically regularised one whose plan is rounded back to exact
  feasibility, so its value always upper-bounds the exact optimum.

Distances are |x - y|_{H^s} raised to the requested power; the combined
metric adds the bottleneck value in L2 to the p-cost in H^s.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linear_sum_assignment, linprog
from scipy.sparse.csgraph import maximum_bipartite_matching, maximum_flow
from scipy.special import logsumexp

from .flow import SolverConfig, evolve_many
from .measures import WeightedEnsemble
from .spectral import NORM_FACTOR

MARGINAL_TOL = 1e-9
_MASS_EPS = 1e-15  # plan entries below this are treated as structural zeros


class SinkhornConvergenceError(RuntimeError):
    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"Sinkhorn failed to reach the marginal tolerance after "
            f"{iterations} iterations (residual {residual:.3e})"
        )
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class CostMatrix:
    """Pairwise costs c_ij = |x_i - y_j|_{H^s}^p."""

    entries: np.ndarray
    s: float
    p: float


@dataclass(frozen=True)
class TransportPlan:
    """Coupling matrix with the marginal residuals it achieves."""

    plan: np.ndarray
    row_residual: float
    col_residual: float

    def check(self, tol: float = MARGINAL_TOL) -> bool:
        return self.row_residual <= tol and self.col_residual <= tol


def _plan_from(matrix: np.ndarray, wa: np.ndarray, wb: np.ndarray) -> TransportPlan:
    matrix = np.where(matrix < _MASS_EPS, 0.0, matrix)
    return TransportPlan(
        plan=matrix,
        row_residual=float(np.max(np.abs(matrix.sum(axis=1) - wa))),
        col_residual=float(np.max(np.abs(matrix.sum(axis=0) - wb))),
    )


def _common_modes(a: WeightedEnsemble, b: WeightedEnsemble):
    m = max(a.n_modes, b.n_modes)
    return a.padded(m).coeffs, b.padded(m).coeffs


def _distance_matrix(xa: np.ndarray, xb: np.ndarray, s: float) -> np.ndarray:
    """Pairwise H^s distances by direct differencing (exact zeros on ties)."""
    k = np.arange(1, xa.shape[1] + 1, dtype=np.float64)
    w = NORM_FACTOR * k ** (2 * s)
    n, m = xa.shape[0], xb.shape[0]
    out = np.empty((n, m))
    block = max(1, (1 << 22) // max(1, m * xa.shape[1]))
    for start in range(0, n, block):
        stop = min(start + block, n)
        diff = xa[start:stop, None, :] - xb[None, :, :]
        out[start:stop] = np.sqrt(np.sum(w * (diff.real**2 + diff.imag**2), axis=-1))
    return out


def cost_matrix(a: WeightedEnsemble, b: WeightedEnsemble, s: float, p: float) -> CostMatrix:
    """H^s distances to the power p between all support pairs.

    Ensembles with different truncations are zero-padded to the larger one.
    """
    if s < 0:
        raise ValueError("regularity exponent must be >= 0")
    if not p >= 1:
        raise ValueError("the transport order must satisfy p >= 1")
    xa, xb = _common_modes(a, b)
    return CostMatrix(entries=_distance_matrix(xa, xb, s) ** p, s=s, p=p)


def _check_marginals(a: WeightedEnsemble, b: WeightedEnsemble) -> None:
    if abs(a.weights.sum() - 1.0) > MARGINAL_TOL or abs(b.weights.sum() - 1.0) > MARGINAL_TOL:
        raise ValueError("infeasible marginals: ensemble weights must both sum to one")


def _uniform_equal(a: WeightedEnsemble, b: WeightedEnsemble) -> bool:
    if a.n != b.n:
        return False
    return np.allclose(a.weights, 1.0 / a.n, atol=1e-12, rtol=0.0) and np.allclose(
        b.weights, 1.0 / b.n, atol=1e-12, rtol=0.0
    )


def _transport_lp(wa: np.ndarray, wb: np.ndarray, cost: np.ndarray) -> np.ndarray:
    """Exact solution of the transportation LP with general weights."""
    n, m = cost.shape
    a_rows = sparse.kron(sparse.eye(n, format="csr"), np.ones((1, m)), format="csr")
    a_cols = sparse.kron(np.ones((1, n)), sparse.eye(m, format="csr"), format="csr")
    a_eq = sparse.vstack([a_rows, a_cols[:-1]], format="csr")  # drop one redundant row
    b_eq = np.concatenate([wa, wb[:-1]])
    res = linprog(cost.ravel(), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        raise RuntimeError(f"transport LP failed: {res.message}")
    return np.maximum(res.x.reshape(n, m), 0.0)


def wasserstein_p_exact(
    a: WeightedEnsemble, b: WeightedEnsemble, s: float, p: float
) -> tuple[float, TransportPlan]:
    """Exact order-p transport distance and an optimal plan.

    Uniform equal-size marginals reduce to an optimal assignment; anything
    else is solved as a linear program.  Zero-weight support points are
    pruned before solving and re-embedded as zero rows/columns of the plan.
    """
    if not (p >= 1 and math.isfinite(p)):
        raise ValueError("the transport order must be a finite p >= 1")
    _check_marginals(a, b)
    cm = cost_matrix(a, b, s, p)
    full = np.zeros((a.n, b.n))
    if _uniform_equal(a, b):
        rows, cols = linear_sum_assignment(cm.entries)
        full[rows, cols] = 1.0 / a.n
    else:
        ia = np.flatnonzero(a.weights > 0)
        ib = np.flatnonzero(b.weights > 0)
        sub = _transport_lp(a.weights[ia], b.weights[ib], cm.entries[np.ix_(ia, ib)])
        full[np.ix_(ia, ib)] = sub
    value = float(np.sum(full * cm.entries)) ** (1.0 / p)
    return value, _plan_from(full, a.weights, b.weights)


def _round_to_feasible(plan: np.ndarray, wa: np.ndarray, wb: np.ndarray) -> np.ndarray:
    """Project an almost-feasible nonnegative matrix onto Marg(wa, wb)."""
    rows = plan.sum(axis=1)
    scale = np.where(rows > 0, np.minimum(1.0, wa / np.where(rows > 0, rows, 1.0)), 0.0)
    plan = plan * scale[:, None]
    cols = plan.sum(axis=0)
    scale = np.where(cols > 0, np.minimum(1.0, wb / np.where(cols > 0, cols, 1.0)), 0.0)
    plan = plan * scale[None, :]
    err_a = wa - plan.sum(axis=1)
    err_b = wb - plan.sum(axis=0)
    total = err_a.sum()
    if total > 0:
        plan = plan + np.outer(err_a, err_b) / total
    return plan


@dataclass(frozen=True)
class EntropicResult:
    value: float
    plan: TransportPlan
    iterations: int
    residual: float
    epsilon: float


def wasserstein_p_entropic(
    a: WeightedEnsemble,
    b: WeightedEnsemble,
    s: float,
    p: float,
    epsilon: float,
    max_iter: int = 20000,
    tol: float = 1e-5,
) -> EntropicResult:
    """Sinkhorn estimate of the order-p distance, always >= the exact value.

    Log-domain Sinkhorn with an annealed regularisation schedule (halving
    from a quarter of the cost range down to the target epsilon) warm-starts
    the potentials; the target level then iterates until the worst marginal
    violation falls below tol.  The plan is finally rounded to exact
    feasibility, so the reported cost is that of a true coupling (marginals
    are exact regardless of tol) and decreases toward the exact optimum as
    epsilon shrinks.
    """
    if not epsilon > 0:
        raise ValueError("regularisation must be positive")
    _check_marginals(a, b)
    cm = cost_matrix(a, b, s, p)
    ia = np.flatnonzero(a.weights > 0)
    ib = np.flatnonzero(b.weights > 0)
    wa, wb = a.weights[ia], b.weights[ib]
    cost = cm.entries[np.ix_(ia, ib)]
    la, lb = np.log(wa), np.log(wb)
    f = np.zeros(wa.size)
    g = np.zeros(wb.size)

    def sweep(eps: float):
        f2 = eps * (la - logsumexp((g[None, :] - cost) / eps, axis=1))
        g2 = eps * (lb - logsumexp((f2[:, None] - cost) / eps, axis=0))
        log_plan = (f2[:, None] + g2[None, :] - cost) / eps
        rows = np.exp(logsumexp(log_plan, axis=1))
        return f2, g2, log_plan, float(np.max(np.abs(rows - wa)))

    level = max(epsilon, 0.25 * float(np.ptp(cost)))
    while level > epsilon:
        for _ in range(50):
            f, g, _, residual = sweep(level)
            if residual < tol:
                break
        level /= 2.0
    residual = math.inf
    iterations = 0
    log_plan = None
    for it in range(1, max_iter + 1):
        iterations = it
        f, g, log_plan, residual = sweep(epsilon)
        if residual < tol:
            break
    else:
        raise SinkhornConvergenceError(residual, iterations)
    plan_sub = _round_to_feasible(np.exp(log_plan), wa, wb)
    full = np.zeros((a.n, b.n))
    full[np.ix_(ia, ib)] = plan_sub
    value = float(np.sum(full * cm.entries)) ** (1.0 / p)
    return EntropicResult(
        value=value,
        plan=_plan_from(full, a.weights, b.weights),
        iterations=iterations,
        residual=residual,
        epsilon=epsilon,
    )


# --- bottleneck distance ----------------------------------------------------

_FLOW_SCALE = 1 << 30  # integer mass resolution for the max-flow feasibility test


def _round_to_total(weights: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder rounding of weights summing to one onto integers summing to total."""
    raw = weights * total
    base = np.floor(raw).astype(np.int64)
    short = total - base.sum()
    if short > 0:
        order = np.argsort(-(raw - base), kind="stable")
        base[order[:short]] += 1
    return base


def _flow_feasible(mask: np.ndarray, ia_units: np.ndarray, ib_units: np.ndarray) -> bool:
    n, m = mask.shape
    src, dst = n + m, n + m + 1
    rows_i, cols_j = np.nonzero(mask)
    row = np.concatenate([np.full(n, src), rows_i, n + np.arange(m)])
    col = np.concatenate([np.arange(n), n + cols_j, np.full(m, dst)])
    cap = np.concatenate(
        [ia_units, np.full(rows_i.size, _FLOW_SCALE, dtype=np.int64), ib_units]
    )
    graph = sparse.csr_matrix(
        (cap.astype(np.int32), (row, col)), shape=(n + m + 2, n + m + 2)
    )
    return maximum_flow(graph, src, dst).flow_value == _FLOW_SCALE


def _matching_feasible(mask: np.ndarray) -> bool:
    graph = sparse.csr_matrix(mask)
    match = maximum_bipartite_matching(graph, perm_type="column")
    return bool(np.all(match >= 0))


def _restricted_lp(wa, wb, cost, mask) -> np.ndarray | None:
    """Feasible low-cost plan supported on allowed edges, or None if infeasible."""
    n, m = cost.shape
    rows_i, cols_j = np.nonzero(mask)
    n_var = rows_i.size
    data = np.ones(2 * n_var)
    row_idx = np.concatenate([rows_i, n + cols_j])
    col_idx = np.concatenate([np.arange(n_var), np.arange(n_var)])
    a_eq = sparse.csr_matrix((data, (row_idx, col_idx)), shape=(n + m, n_var))[:-1]
    b_eq = np.concatenate([wa, wb[:-1]])
    res = linprog(cost[rows_i, cols_j], A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        return None
    plan = np.zeros((n, m))
    plan[rows_i, cols_j] = np.maximum(res.x, 0.0)
    return plan


def wasserstein_inf(a: WeightedEnsemble, b: WeightedEnsemble) -> tuple[float, TransportPlan]:
    """Bottleneck transport value in L2: the least threshold carrying a feasible plan.

    Bisection runs over the sorted distinct pairwise distances; feasibility at
    a candidate threshold is decided by bipartite matching for uniform
    equal-size marginals and by an integer max-flow otherwise.  The final
    threshold is confirmed by an exact LP, which also provides the reported
    plan (rounding in the flow test can never survive that confirmation).
    """
    _check_marginals(a, b)
    xa, xb = _common_modes(a, b)
    dist = _distance_matrix(xa, xb, 0.0)
    ia = np.flatnonzero(a.weights > 0)
    ib = np.flatnonzero(b.weights > 0)
    sub = dist[np.ix_(ia, ib)]
    wa, wb = a.weights[ia], b.weights[ib]
    uniform = _uniform_equal(a, b)
    if uniform:
        feasible = lambda lam: _matching_feasible(sub <= lam)
    else:
        ua = _round_to_total(wa, _FLOW_SCALE)
        ub = _round_to_total(wb, _FLOW_SCALE)
        feasible = lambda lam: _flow_feasible(sub <= lam, ua, ub)
    levels = np.unique(sub)
    lo, hi = 0, levels.size - 1
    if feasible(levels[lo]):
        hi = lo
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(levels[mid]):
            hi = mid
        else:
            lo = mid + 1
    idx = hi
    full = np.zeros((a.n, b.n))
    if uniform:
        # the matching test is exact; the matching itself is the plan
        match = maximum_bipartite_matching(
            sparse.csr_matrix(sub <= levels[idx]), perm_type="column"
        )
        full[np.arange(a.n), match] = 1.0 / a.n
    else:
        # the flow test rounds masses to an integer grid; confirm the
        # threshold with an exact feasibility LP, which also yields the plan
        plan_sub = _restricted_lp(wa, wb, sub, sub <= levels[idx])
        while plan_sub is None and idx + 1 < levels.size:
            idx += 1
            plan_sub = _restricted_lp(wa, wb, sub, sub <= levels[idx])
        if plan_sub is None:
            raise RuntimeError("bottleneck feasibility could not be established")
        full[np.ix_(ia, ib)] = plan_sub
    return float(levels[idx]), _plan_from(full, a.weights, b.weights)


# --- combined metric and pushforward bounds ---------------------------------


@dataclass(frozen=True)
class CombinedDistance:
    w_inf: float
    w_p: float
    backend: str
    epsilon: float | None = None

    @property
    def total(self) -> float:
        return self.w_inf + self.w_p


def combined_metric_parts(
    a: WeightedEnsemble,
    b: WeightedEnsemble,
    s: float,
    p: float,
    backend: str = "exact",
    epsilon: float | None = None,
) -> CombinedDistance:
    w_inf, _ = wasserstein_inf(a, b)
    if backend == "exact":
        w_p, _ = wasserstein_p_exact(a, b, s, p)
    elif backend == "entropic":
        if epsilon is None:
            cm = cost_matrix(a, b, s, p)
            epsilon = 0.01 * float(np.median(cm.entries))
            epsilon = max(epsilon, 1e-12)
        w_p = wasserstein_p_entropic(a, b, s, p, epsilon).value
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return CombinedDistance(w_inf=w_inf, w_p=w_p, backend=backend, epsilon=epsilon)


def combined_metric(
    a: WeightedEnsemble,
    b: WeightedEnsemble,
    s: float,
    p: float,
    backend: str = "exact",
    epsilon: float | None = None,
) -> float:
    """Bottleneck-in-L2 plus order-p-in-H^s distance between two ensembles."""
    return combined_metric_parts(a, b, s, p, backend, epsilon).total


@dataclass(frozen=True)
class PushforwardCost:
    """Cost of one fixed coupling after both supports are evolved."""

    t: float
    w_p_bound: float
    w_inf_bound: float

    @property
    def combined_bound(self) -> float:
        return self.w_inf_bound + self.w_p_bound


def pushforward_cost(
    a: WeightedEnsemble,
    b: WeightedEnsemble,
    plan: TransportPlan,
    t: float,
    cfg: SolverConfig,
    s: float,
    p: float,
) -> PushforwardCost:
    """Evolve every support point and price the same plan at time t.

    A coupling pushed through the flow stays a coupling of the evolved
    ensembles, so both reported numbers upper-bound the corresponding
    re-optimised distances at time t.
    """
    xa, xb = _common_modes(a, b)
    if t != 0.0:
        xa = evolve_many(xa, t, cfg)
        xb = evolve_many(xb, t, cfg)
    mask = plan.plan > _MASS_EPS
    dist_hs = _distance_matrix(xa, xb, s)
    dist_l2 = dist_hs if s == 0 else _distance_matrix(xa, xb, 0.0)
    w_p = float(np.sum(plan.plan[mask] * dist_hs[mask] ** p)) ** (1.0 / p)
    w_inf = float(np.max(dist_l2[mask])) if np.any(mask) else 0.0
    return PushforwardCost(t=t, w_p_bound=w_p, w_inf_bound=w_inf)


# --- persistence ------------------------------------------------------------


def write_plan_csv(path, plan: TransportPlan, cost: CostMatrix) -> None:
    """Plan support as CSV rows (i, j, mass, cost)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "mass", "cost"])
        for i, j in zip(*np.nonzero(plan.plan > _MASS_EPS)):
            writer.writerow([int(i), int(j), repr(plan.plan[i, j]), repr(cost.entries[i, j])])


def write_distance_json(
    path,
    distance: CombinedDistance,
    plan: TransportPlan | None = None,
    iterations: int | None = None,
) -> None:
    payload = {
        "distance": distance.total,
        "w_inf": distance.w_inf,
        "w_p": distance.w_p,
        "backend": distance.backend,
        "epsilon": distance.epsilon,
        "iterations": iterations,
        "marginal_residuals": None
        if plan is None
        else [plan.row_residual, plan.col_residual],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
