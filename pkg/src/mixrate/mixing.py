"""Stationary sequence generators with known mixing decay.

Every generator is a pure function of its parameters and a 64-bit seed, so
samples can be regenerated bit-identically.  Where the construction permits
it, the sample carries an exact mixing oracle (a :class:`MixingProfile`)
describing the decay of its dependence coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np


class MixingFlavor(str, Enum):
    BETA = "beta"
    RHO = "rho"
    GAMMA = "gamma"


class ProfileKind(str, Enum):
    EXACT_MARKOV = "exact_markov"
    POLYNOMIAL = "polynomial"
    EXPONENTIAL = "exponential"
    TABULATED = "tabulated"


class ConstructionError(ValueError):
    """Raised when a generator's inputs cannot yield a stationary chain."""


class EstimationError(ValueError):
    """Raised when a sample is too small for the requested estimate."""


def _check_stochastic(transition: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    transition = np.asarray(transition, dtype=float)
    if transition.ndim != 2 or transition.shape[0] != transition.shape[1]:
        raise ConstructionError("transition matrix must be square")
    if np.any(transition < -tol):
        raise ConstructionError("transition matrix has negative entries")
    rows = transition.sum(axis=1)
    if np.any(np.abs(rows - 1.0) > tol):
        raise ConstructionError("rows of transition matrix must sum to 1")
    return transition


def stationary_distribution(transition: np.ndarray, tol: float = 1e-12,
                            max_iter: int = 200_000) -> np.ndarray:
    """Stationary vector of a row-stochastic matrix by power iteration.

    Non-convergence (reducible or periodic chain without a unique
    stationary law) raises :class:`ConstructionError`.
    """
    transition = _check_stochastic(transition)
    m = transition.shape[0]
    # asymmetric start so periodic chains oscillate instead of luckily
    # starting at the fixed point
    pi = np.arange(1, m + 1, dtype=float)
    pi /= pi.sum()
    for _ in range(max_iter):
        nxt = pi @ transition
        if np.abs(nxt - pi).max() < tol:
            pi = nxt
            break
        pi = nxt
    else:
        raise ConstructionError(
            "power iteration did not converge; chain may be reducible or periodic")
    pi = pi / pi.sum()
    if np.abs(pi @ transition - pi).max() > 1e-10:
        raise ConstructionError("stationary vector check failed")
    return pi


@dataclass(frozen=True)
class MixingProfile:
    """Model of a mixing-coefficient sequence q -> coefficient(q) in [0,1].

    ``coefficient(0) == 1`` by convention and the sequence is
    non-increasing.  ``flavor`` records which dependence coefficient the
    profile describes.
    """

    kind: ProfileKind
    flavor: MixingFlavor = MixingFlavor.BETA
    # exact_markov
    transition: Optional[np.ndarray] = None
    stationary: Optional[np.ndarray] = None
    # polynomial / exponential
    scale: float = 1.0
    exponent: float = 1.0
    rate: float = 1.0
    # tabulated
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind == ProfileKind.EXACT_MARKOV:
            t = _check_stochastic(self.transition)
            pi = np.asarray(self.stationary, dtype=float)
            if np.abs(pi @ t - pi).max() > 1e-10:
                raise ConstructionError("stationary vector does not satisfy pi P = pi")
            object.__setattr__(self, "transition", t)
            object.__setattr__(self, "stationary", pi)
        elif self.kind == ProfileKind.POLYNOMIAL:
            if self.exponent <= 0:
                raise ValueError("polynomial profile needs exponent > 0")
        elif self.kind == ProfileKind.TABULATED:
            v = np.asarray(self.values, dtype=float)
            if np.any(v < 0) or np.any(v > 1):
                raise ValueError("tabulated coefficients must lie in [0,1]")
            if np.any(np.diff(v) > 1e-12):
                raise ValueError("tabulated coefficients must be non-increasing")
            object.__setattr__(self, "values", v)

    def coefficient(self, q: int) -> float:
        """Mixing coefficient at gap q; coefficient(0) = 1 by convention."""
        if q < 0:
            raise ValueError("gap q must be >= 0")
        if q == 0:
            return 1.0
        if self.kind == ProfileKind.EXACT_MARKOV:
            return exact_beta_markov(self.transition, self.stationary, q)
        if self.kind == ProfileKind.POLYNOMIAL:
            return min(1.0, self.scale * (1.0 + q) ** (-self.exponent))
        if self.kind == ProfileKind.EXPONENTIAL:
            return min(1.0, self.scale * math.exp(-self.rate * q))
        v = self.values
        return float(v[q]) if q < len(v) else 0.0

    @staticmethod
    def iid() -> "MixingProfile":
        return MixingProfile(kind=ProfileKind.TABULATED, values=np.array([1.0]))


@dataclass(frozen=True)
class SequenceSample:
    """Realized stationary sequence plus the provenance needed to rebuild it."""

    values: np.ndarray
    generator_id: str
    params: dict
    seed: int
    mixing_oracle: Optional[MixingProfile] = None

    def __len__(self) -> int:
        return len(self.values)


def gen_finite_markov(transition, state_values, n: int, seed: int) -> SequenceSample:
    """Stationary finite-state Markov trajectory mapped through state values."""
    transition = _check_stochastic(transition)
    state_values = np.asarray(state_values, dtype=float)
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(state_values) != transition.shape[0]:
        raise ConstructionError("state_values length must match transition size")
    pi = stationary_distribution(transition)
    rng = np.random.default_rng(seed)
    m = transition.shape[0]
    states = np.empty(n, dtype=np.int64)
    # inverse-CDF sampling against precomputed row CDFs
    row_cdf = np.cumsum(transition, axis=1)
    states[0] = np.searchsorted(np.cumsum(pi), rng.random())
    u = rng.random(n - 1)
    for i in range(1, n):
        states[i] = np.searchsorted(row_cdf[states[i - 1]], u[i - 1])
    states = np.minimum(states, m - 1)
    oracle = MixingProfile(kind=ProfileKind.EXACT_MARKOV, flavor=MixingFlavor.BETA,
                           transition=transition, stationary=pi)
    return SequenceSample(values=state_values[states], generator_id="finite_markov",
                          params={"transition": transition.tolist(),
                                  "state_values": state_values.tolist(), "n": n},
                          seed=seed, mixing_oracle=oracle)


def _block_length_pmf(tail_exponent: float, l_max: int) -> np.ndarray:
    k = np.arange(1, l_max + 1, dtype=float)
    pmf = k ** (-(2.0 + tail_exponent))
    return pmf / pmf.sum()


def _residual_life_pmf(pmf: np.ndarray) -> np.ndarray:
    # stationary residual-life law: P(R = j) = P(L >= j) / E[L]
    tail = pmf[::-1].cumsum()[::-1]
    return tail / tail.sum()


def gen_renewal_chain(tail_exponent: float, l_max: int, n: int, seed: int) -> SequenceSample:
    """Block-constant regenerative sequence with polynomial beta decay.

    Block lengths are i.i.d. with P(L=k) proportional to k^{-(2+beta)},
    truncated at ``l_max``; each block carries a fresh Uniform[0,1] value.
    The first block is drawn from the stationary residual-life law so the
    sequence is strictly stationary.  The beta-mixing coefficients decay
    like q^{-beta} up to the truncation horizon.
    """
    if tail_exponent <= 0:
        raise ConstructionError("tail exponent must be > 0")
    if l_max < 1:
        raise ConstructionError("l_max must be >= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    pmf = _block_length_pmf(tail_exponent, l_max)
    lengths = [int(rng.choice(l_max, p=_residual_life_pmf(pmf)) + 1)]
    total = lengths[0]
    mean_len = float(np.arange(1, l_max + 1) @ pmf)
    while total < n:
        want = max(16, int((n - total) / mean_len * 1.5) + 8)
        batch = rng.choice(l_max, size=want, p=pmf) + 1
        lengths.extend(int(b) for b in batch)
        total += int(batch.sum())
    lengths = np.asarray(lengths)
    vals = rng.random(len(lengths))
    series = np.repeat(vals, lengths)[:n]
    oracle = MixingProfile(kind=ProfileKind.POLYNOMIAL, flavor=MixingFlavor.BETA,
                           scale=1.0, exponent=tail_exponent)
    return SequenceSample(values=series, generator_id="renewal_chain",
                          params={"tail_exponent": tail_exponent, "l_max": l_max, "n": n},
                          seed=seed, mixing_oracle=oracle)


def renewal_age_value_chain(tail_exponent: float, l_max: int, n_values: int):
    """Exact finite-state (residual-life, value) chain for the renewal DGP.

    Values are discretized to ``n_values`` equiprobable levels.  Returns
    (transition, stationary, state_values) with states ordered as
    (residual r = 1..l_max) x (value v = 0..n_values-1).
    """
    pmf = _block_length_pmf(tail_exponent, l_max)
    resid = _residual_life_pmf(pmf)
    m = l_max * n_values
    trans = np.zeros((m, m))
    for r in range(1, l_max + 1):
        for v in range(n_values):
            s = (r - 1) * n_values + v
            if r > 1:
                trans[s, (r - 2) * n_values + v] = 1.0
            else:
                for rl in range(1, l_max + 1):
                    for vn in range(n_values):
                        trans[s, (rl - 1) * n_values + vn] = pmf[rl - 1] / n_values
    pi = np.repeat(resid, n_values) / n_values
    state_values = np.tile((np.arange(n_values) + 0.5) / n_values, l_max)
    return trans, pi, state_values


def gen_ar1(a: float, n: int, seed: int) -> SequenceSample:
    """Stationary Gaussian AR(1); exponential mixing with |a|^q decay."""
    if abs(a) >= 1:
        raise ConstructionError("|a| must be < 1 for stationarity")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    x = np.empty(n)
    x[0] = rng.standard_normal() / math.sqrt(1.0 - a * a)
    eps = rng.standard_normal(n - 1)
    for i in range(1, n):
        x[i] = a * x[i - 1] + eps[i - 1]
    if a == 0.0:
        oracle = MixingProfile.iid()
    else:
        oracle = MixingProfile(kind=ProfileKind.EXPONENTIAL, flavor=MixingFlavor.GAMMA,
                               scale=1.0, rate=-math.log(abs(a)))
    return SequenceSample(values=x, generator_id="ar1",
                          params={"a": a, "n": n}, seed=seed, mixing_oracle=oracle)


def gen_iid_uniform(n: int, seed: int) -> SequenceSample:
    """I.i.d. Uniform[0,1] baseline DGP."""
    rng = np.random.default_rng(seed)
    return SequenceSample(values=rng.random(n), generator_id="iid_uniform",
                          params={"n": n}, seed=seed, mixing_oracle=MixingProfile.iid())


def exact_beta_markov(transition, stationary, q: int) -> float:
    """Exact beta coefficient of a stationary finite chain at gap q.

    Uses the two-coordinate identity for stationary Markov chains:
    beta_q = sum_x pi(x) * TV(P^q(x, .), pi), with TV the half-L1 distance.
    Returns 1 at q = 0 by convention.
    """
    if q < 0:
        raise ValueError("gap q must be >= 0")
    if q == 0:
        return 1.0
    transition = _check_stochastic(transition)
    pi = np.asarray(stationary, dtype=float)
    pq = np.linalg.matrix_power(transition, q)
    tv_rows = 0.5 * np.abs(pq - pi[None, :]).sum(axis=1)
    return float(pi @ tv_rows)


def _rank_bins(values: np.ndarray, m_bins: int) -> np.ndarray:
    # equal-frequency binning; ties broken by original index (stable sort)
    n = len(values)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(n)
    return (ranks * m_bins) // n


def estimate_beta_binning(sample: SequenceSample, q: int, m_bins: int) -> float:
    """Binning estimate of the beta coefficient at gap q.

    Half-L1 distance between the empirical joint of (X_0, X_q) over an
    equal-frequency binning and the product of the binned marginals.  This
    is a lower-bound proxy for the full sigma-field coefficient: it only
    sees the two-coordinate, binned dependence.
    """
    values = np.asarray(sample.values, dtype=float)
    n = len(values)
    if n < 10 * m_bins * m_bins:
        raise EstimationError(
            f"need n >= {10 * m_bins * m_bins} observations for m_bins={m_bins}, got {n}")
    if q >= n // 2:
        raise EstimationError("gap q must be < n/2")
    bins = _rank_bins(values, m_bins)
    a, b = bins[: n - q], bins[q:]
    joint = np.zeros((m_bins, m_bins))
    np.add.at(joint, (a, b), 1.0)
    joint /= joint.sum()
    pa = joint.sum(axis=1)
    pb = joint.sum(axis=0)
    return float(0.5 * np.abs(joint - np.outer(pa, pb)).sum())
