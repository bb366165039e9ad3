"""Entropic optimal-transport estimators: log-domain Sinkhorn iterates,
the debiased Sinkhorn divergence, an exact squared-Wasserstein baseline via
a shortest-augmenting-path assignment solver, and the comparison harness."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import logsumexp

from .empirical import generate, slope_fit
from .rates import ot_schedule


def _sq_dists(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[0] == 1 and X.ndim == 2 and X.shape != Y.shape and X.shape[1] != Y.shape[1]:
        raise ValueError("dimension mismatch")
    d2 = ((X[:, None, :] - Y[None, :, :]) ** 2).sum(axis=2)
    return d2


@dataclass(frozen=True)
class SinkhornState:
    """Dual potentials for entropic transport between two point clouds.

    ``v`` starts at zero; ``k`` counts completed (u, v) update pairs.
    """

    u: np.ndarray
    v: np.ndarray
    eps: float
    k: int
    cost: np.ndarray  # pairwise squared distances, shape (m, n)

    @classmethod
    def init(cls, X, Y, eps: float) -> "SinkhornState":
        if eps <= 0:
            raise ValueError("eps must be > 0")
        cost = _sq_dists(X, Y)
        m, n = cost.shape
        if m == 0 or n == 0:
            raise ValueError("empty cloud")
        return cls(u=np.zeros(m), v=np.zeros(n), eps=eps, k=0, cost=cost)


def sinkhorn_iterate(state: SinkhornState) -> SinkhornState:
    """One full iterate: u from v, then v from the new u, in the log domain.

    u_i = -eps log( n^{-1} sum_j exp((v_j - c_ij)/eps) ) and symmetrically
    for v with m^{-1}; log-sum-exp is max-shifted so iterates stay finite.
    """
    eps, cost = state.eps, state.cost
    m, n = cost.shape
    u = -eps * (logsumexp((state.v[None, :] - cost) / eps, axis=1) - math.log(n))
    v = -eps * (logsumexp((u[:, None] - cost) / eps, axis=0) - math.log(m))
    return replace(state, u=u, v=v, k=state.k + 1)


def t_eps_k(X, Y, eps: float, k: int) -> float:
    """Entropic transport cost after k Sinkhorn iterations: the dual value
    m^{-1} sum u + n^{-1} sum v."""
    if k < 1:
        raise ValueError("need k >= 1")
    state = SinkhornState.init(X, Y, eps)
    for _ in range(k):
        state = sinkhorn_iterate(state)
    return float(np.mean(state.u) + np.mean(state.v))


def sinkhorn_divergence(X, Y, eps: float, k: int) -> float:
    """Debiased cost T(X,Y) - (T(X,X) + T(Y,Y))/2, all three terms at the
    same (eps, k) so identical clouds cancel exactly."""
    return (t_eps_k(X, Y, eps, k)
            - 0.5 * (t_eps_k(X, X, eps, k) + t_eps_k(Y, Y, eps, k)))


# ---------------------------------------------------------------------------
# Exact baseline


def solve_assignment(cost: np.ndarray) -> tuple[np.ndarray, float]:
    """Minimum-cost perfect matching on a square cost matrix by the
    shortest-augmenting-path method with dual potentials (cubic time).

    Returns (cols, total) where cols[i] is the column matched to row i.
    """
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    if cost.shape != (n, n):
        raise ValueError("cost matrix must be square")
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    matched_row = np.zeros(n + 1, dtype=int)  # column j -> row (1-indexed)
    parent = np.zeros(n + 1, dtype=int)
    for i in range(1, n + 1):
        matched_row[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = matched_row[j0]
            free = ~used[1:]
            cur = cost[i0 - 1, :] - u[i0] - v[1:]
            upd = free & (cur < minv[1:])
            minv1 = minv[1:]
            minv1[upd] = cur[upd]
            parent[1:][upd] = j0
            idx = np.flatnonzero(free)
            j1 = int(idx[np.argmin(minv1[idx])]) + 1
            delta = minv[j1]
            u[matched_row[used]] += delta
            v[used] -= delta
            minv1[free] -= delta
            j0 = j1
            if matched_row[j0] == 0:
                break
        while j0:
            j1 = parent[j0]
            matched_row[j0] = matched_row[j1]
            j0 = j1
    cols = np.zeros(n, dtype=int)
    for j in range(1, n + 1):
        cols[matched_row[j] - 1] = j - 1
    total = float(cost[np.arange(n), cols].sum())
    return cols, total


def exact_w2(X, Y, method: str = "auto") -> float:
    """Exact squared 2-Wasserstein distance between equal-size point clouds:
    min over matchings of the mean squared distance.

    One-dimensional clouds use the sorted-matching shortcut; ``method``
    forces a specific solver (assignment / sorted / brute) for cross-checks.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if X.ndim == 2 and X.shape[1] != Y.shape[1]:
        raise ValueError("dimension mismatch")
    if X.shape[0] != Y.shape[0]:
        raise ValueError("clouds must have equal size")
    n = X.shape[0]
    if method == "auto":
        method = "sorted" if X.shape[1] == 1 else "assignment"
    if method == "sorted":
        if X.shape[1] != 1:
            raise ValueError("sorted matching requires 1-D clouds")
        return float(np.mean((np.sort(X[:, 0]) - np.sort(Y[:, 0])) ** 2))
    cost = _sq_dists(X, Y)
    if method == "brute":
        best = min(sum(cost[i, p[i]] for i in range(n))
                   for p in itertools.permutations(range(n)))
        return float(best) / n
    if method != "assignment":
        raise ValueError(f"unknown method {method!r}")
    _, total = solve_assignment(cost)
    return total / n


# ---------------------------------------------------------------------------
# Comparison harness


@dataclass(frozen=True)
class OtComparisonReport:
    n_grid: np.ndarray
    exact_values: np.ndarray
    sinkhorn_values: np.ndarray
    exact_times: np.ndarray
    sinkhorn_times: np.ndarray
    schedules: list
    exact_runtime_exponent: float
    sinkhorn_runtime_exponent: float
    regime: str  # "fast" or "slow" schedule regime


def gen_cloud(dgp_cfg: dict, n: int, d: int, seed: int) -> np.ndarray:
    """A d-dimensional cloud of n points: one generated sequence per axis."""
    cols = [generate(dgp_cfg, n, seed + 7919 * j).values for j in range(d)]
    return np.column_stack(cols)


def compare_estimators(dgp_pair_cfg: dict, d: int, beta: float, n_grid,
                       replications: int = 1, base_seed: int = 0,
                       eps_override: float | None = None,
                       k_override: int | None = None) -> OtComparisonReport:
    """Exact assignment baseline versus Sinkhorn divergence at the
    theoretical (k_n, eps_n) schedule, with wall-clock power-law fits."""
    if d < 2:
        raise ValueError("harness needs d >= 2")
    n_grid = np.asarray(list(n_grid), dtype=int)
    exact_vals = np.empty(len(n_grid))
    sink_vals = np.empty(len(n_grid))
    exact_t = np.empty(len(n_grid))
    sink_t = np.empty(len(n_grid))
    schedules = []
    regime = "fast" if d > 2 and beta > 2.0 / (d - 2) else "slow"
    for i, n in enumerate(n_grid):
        if eps_override is not None and k_override is not None:
            k_n, eps_n = k_override, eps_override
        else:
            k_n, eps_n = ot_schedule(beta, d, int(n))
            if eps_override is not None:
                eps_n = eps_override
            if k_override is not None:
                k_n = k_override
        schedules.append((int(k_n), float(eps_n)))
        ev, sv, et, st = 0.0, 0.0, 0.0, 0.0
        for rep in range(replications):
            seed = base_seed + 10_000 * i + 2 * rep
            X = gen_cloud(dgp_pair_cfg, int(n), d, seed)
            Y = gen_cloud(dgp_pair_cfg, int(n), d, seed + 1)
            t0 = time.perf_counter()
            ev += exact_w2(X, Y, method="assignment")
            et += time.perf_counter() - t0
            t0 = time.perf_counter()
            sv += sinkhorn_divergence(X, Y, eps_n, k_n)
            st += time.perf_counter() - t0
        exact_vals[i], sink_vals[i] = ev / replications, sv / replications
        exact_t[i], sink_t[i] = et, st
    if len(n_grid) >= 4:
        exp_e = slope_fit(list(zip(n_grid, np.maximum(exact_t, 1e-9)))).slope
        exp_s = slope_fit(list(zip(n_grid, np.maximum(sink_t, 1e-9)))).slope
    else:  # too few sizes for a runtime power-law fit
        exp_e = exp_s = math.nan
    return OtComparisonReport(
        n_grid=n_grid, exact_values=exact_vals, sinkhorn_values=sink_vals,
        exact_times=exact_t, sinkhorn_times=sink_t, schedules=schedules,
        exact_runtime_exponent=exp_e,
        sinkhorn_runtime_exponent=exp_s, regime=regime)
