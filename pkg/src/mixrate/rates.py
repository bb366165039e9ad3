"""Pivotal quantities and closed-form rates for empirical-process suprema
under mixing dependence.

All bounds are "unconstanted": every absolute constant is set to 1 and
acceptance is phrased in exponents and slopes, never in constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable

import numpy as np

from .mixing import MixingProfile
from .classes import EntropyModel, entropy_eval


class BoundaryParameterError(ValueError):
    """Raised when parameters sit exactly on an excluded phase boundary."""


class ScaleError(ValueError):
    """Raised when the norm radius is below the admissible scale."""


# ---------------------------------------------------------------------------
# Orlicz power family


@dataclass(frozen=True)
class OrliczPower:
    """The power Orlicz family phi(x) = x**(r/2), r > 2, with its conjugate
    constant c_phi = sqrt(1 + sup_{x>=0}(x - x**(r/2)))."""

    r: float
    c_phi: float = field(init=False)

    def __post_init__(self):
        if self.r <= 2:
            raise ValueError("power index r must exceed 2 (linear phi excluded)")
        object.__setattr__(self, "c_phi", c_phi(self.r))


def c_phi(r: float) -> float:
    """sqrt(1 + sup_{x>=0}(x - x**(r/2))), maximized at x = (2/r)**(2/(r-2))."""
    if r <= 2:
        raise ValueError("power index r must exceed 2 (linear phi excluded)")
    if math.isinf(r):
        return math.sqrt(2.0)
    x_star = (2.0 / r) ** (2.0 / (r - 2.0))
    return math.sqrt(1.0 + x_star - x_star ** (r / 2.0))


def lambda_phi_beta(profile: MixingProfile, q: int, r: float) -> float:
    """Cumulative Orlicz-weighted mixing mass
    sum_{i=0}^q integral_0^{beta_i} u**(-2/r) du = (1-2/r)^{-1} sum beta_i**(1-2/r)."""
    if r <= 2:
        raise ValueError("r must exceed 2")
    if q < 0:
        raise ValueError("q must be >= 0")
    p = 1.0 - 2.0 / r
    coeffs = np.array([profile.coefficient(i) for i in range(q + 1)])
    return float(np.sum(coeffs ** p) / p)


def _lambda_cumulative(profile: MixingProfile, q_max: int, r: float) -> np.ndarray:
    p = 1.0 - 2.0 / r
    coeffs = np.array([profile.coefficient(i) for i in range(q_max + 1)])
    return np.cumsum(coeffs ** p) / p


# ---------------------------------------------------------------------------
# tau_q


def _entropy_dyadic_sum(entropy: EntropyModel, delta: float) -> float:
    """1 + sum over k >= 0 with 2**(-k) sigma >= delta of H(2**(-k) sigma)."""
    total = 1.0
    k = 0
    while entropy.sigma * 2.0 ** (-k) >= delta:
        total += entropy_eval(entropy, entropy.sigma * 2.0 ** (-k))
        k += 1
    return total


def tau_q(profile: MixingProfile, entropy: EntropyModel, delta: float, n: int,
          method: str = "auto") -> int:
    """Smallest q in [0, n] with beta_q <= (q/n) * (1 + dyadic entropy sum).

    The left side is non-increasing and the right side increasing in q, so
    the first crossing is found by linear scan (n <= 1e4) or bisection.
    """
    if not (0 < delta <= entropy.sigma):
        raise ValueError("delta must lie in (0, sigma]")
    if n < 1:
        raise ValueError("n must be >= 1")
    slope = _entropy_dyadic_sum(entropy, delta) / n

    def crossed(q: int) -> bool:
        return profile.coefficient(q) <= q * slope

    if method == "auto":
        method = "scan" if n <= 10_000 else "bisect"
    if method == "scan":
        for q in range(n + 1):
            if crossed(q):
                return q
        raise ValueError("no admissible q in [0, n]")
    if method != "bisect":
        raise ValueError(f"unknown method {method!r}")
    if not crossed(n):
        raise ValueError("no admissible q in [0, n]")
    lo, hi = 0, n  # crossed(hi) True; find first True
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if crossed(mid):
            hi = mid
        else:
            lo = mid
    return hi if not crossed(lo) else lo


# ---------------------------------------------------------------------------
# Finite-class maximal inequality


def finite_class_bound(sigma: float, b: float, cardinality: int, n: int,
                       profile: MixingProfile, r: float) -> float:
    """inf over q in [1, n] of
    sigma*pi(q)*sqrt(1+log|F|) + b*q*(1+log|F|)/sqrt(n) + b*beta_q*sqrt(n),
    with pi(q) = sqrt(c_phi**2 + 2*Lambda(q)).  Absolute constant K = 1."""
    if cardinality < 1:
        raise ValueError("cardinality must be >= 1")
    if sigma <= 0 or b <= 0:
        raise ValueError("sigma and b must be > 0")
    lam = _lambda_cumulative(profile, n, r)
    q = np.arange(1, n + 1)
    pi_q = np.sqrt(c_phi(r) ** 2 + 2.0 * lam[1:])
    log_card = 1.0 + math.log(cardinality)
    betas = np.array([profile.coefficient(int(i)) for i in q])
    vals = (sigma * pi_q * math.sqrt(log_card)
            + b * q * log_card / math.sqrt(n)
            + b * betas * math.sqrt(n))
    return float(np.min(vals))


# ---------------------------------------------------------------------------
# Main chaining bound


@dataclass(frozen=True)
class RateBound:
    """Solved chaining budget plus the block remainder term."""

    a: float
    tail_term: float
    total: float
    tau_at_sigma: int
    lambda_at_sigma: float
    integral_residual: float


def _monotone_envelopes(entropy: EntropyModel, profile: MixingProfile,
                        n: int, r: float, grid: np.ndarray) -> np.ndarray:
    """Non-increasing majorant of R1(u) = Lambda-envelope(u) * (1 + H(u))
    evaluated on an increasing u-grid."""
    psi = np.array([lambda_phi_beta(profile, tau_q(profile, entropy, d, n), r)
                    for d in grid])
    psi = np.maximum.accumulate(psi)  # non-decreasing in delta
    h = np.array([entropy_eval(entropy, u) for u in grid])
    r1 = psi * (1.0 + h)
    # non-increasing majorant: running max from large u downward
    return np.maximum.accumulate(r1[::-1])[::-1]


def main_bound(entropy: EntropyModel, profile: MixingProfile, n: int,
               r: float, grid_per_decade: int = 64) -> RateBound:
    """Chaining bound: the smallest a in [0, 8 sqrt(n) sigma] with
    integral_{a/(64 sqrt(n))}^{sigma} sqrt(R1(u)) du <= a, plus the block
    remainder b * tau_q(sigma) * (1 + H(sigma)) / sqrt(n)."""
    sigma, b = entropy.sigma, entropy.b
    sqrt_n = math.sqrt(n)
    a_hi = 8.0 * sqrt_n * sigma
    u_floor = sigma * 1e-9 / sqrt_n
    n_pts = max(2, int(grid_per_decade * math.log10(sigma / u_floor)) + 1)
    grid = np.geomspace(u_floor, sigma, n_pts)
    r1 = _monotone_envelopes(entropy, profile, n, r, grid)
    sqrt_r1 = np.sqrt(r1)
    log_u = np.log(grid)
    # cumulative integral of sqrt(R1) from each node to sigma (trapezoid in
    # log space: integral f du = integral f*u dlog u); grid density plays the
    # role of the adaptive refinement (64 points/decade << 1e-6 rel error for
    # smooth power-log integrands)
    w = sqrt_r1 * grid
    seg = 0.5 * (w[1:] + w[:-1]) * np.diff(log_u)
    cum_from_right = np.concatenate((np.cumsum(seg[::-1])[::-1], [0.0]))

    def entropy_integral(a: float) -> float:
        lo = max(a / (64.0 * sqrt_n), u_floor)
        if lo >= sigma:
            return 0.0
        i = int(np.searchsorted(grid, lo, side="right"))
        # partial segment from lo to grid[i]
        wi = np.interp(math.log(lo), log_u, w)
        part = 0.5 * (wi + w[i]) * (log_u[i] - math.log(lo))
        return part + cum_from_right[i]

    def g(a: float) -> float:
        return entropy_integral(a) - a

    if g(a_hi) > 0:
        raise ScaleError("no admissible chaining budget: sigma below the "
                         "admissible scale for this entropy/mixing pair")
    a_lo = a_hi * 1e-14
    if g(a_lo) <= 0:
        a = a_lo
    else:
        for _ in range(100):
            mid = math.sqrt(a_lo * a_hi)
            if g(mid) <= 0:
                a_hi = mid
            else:
                a_lo = mid
            if a_hi / a_lo < 1.0 + 1e-9:
                break
        a = a_hi
    tq = tau_q(profile, entropy, sigma, n)
    lam = lambda_phi_beta(profile, tq, r)
    tail = b * tq * (1.0 + entropy_eval(entropy, sigma)) / sqrt_n
    return RateBound(a=a, tail_term=tail, total=a + tail, tau_at_sigma=tq,
                     lambda_at_sigma=lam, integral_residual=g(a))


# ---------------------------------------------------------------------------
# Regime classification


class Regime(str, Enum):
    IID_LIKE = "iid_like"
    DEPENDENCE_DOMINATED = "dependence_dominated"
    DONSKER_BOUNDED = "donsker_bounded"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class RegimeReport:
    regime: Regime
    exponent: Fraction | None
    source: str

    def __post_init__(self):
        if self.exponent is not None and not (0 <= self.exponent < Fraction(1, 2)):
            raise ValueError("exponent must lie in [0, 1/2)")


def _near(x, y, tol=1e-12):
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def rate_exponent(alpha, dep_exponent, r_or_inf=math.inf,
                  sigma_mode: str = "unit") -> RegimeReport:
    """Regime and n-exponent of the expected supremum for an entropy exponent
    alpha and polynomial mixing decay exponent.

    Sup-norm brackets (r = inf): decay > 1 gives the short-range table
    (alpha < 2 bounded; alpha > 2 exponent 1/2 - 1/alpha); decay < 1 gives
    the long-range table with boundary curve alpha = (1+beta)/beta.  Finite
    r > 2 is analogous with decay threshold r/(r-2) and boundary curve
    alpha = r(1+beta)/(beta(r-1)).  Exact boundary inputs are flagged, never
    assigned an exponent.
    """
    a, beta, r = float(alpha), float(dep_exponent), float(r_or_inf)
    if a < 0 or beta <= 0:
        raise ValueError("need alpha >= 0 and dep_exponent > 0")
    if not (r > 2):
        raise ValueError("norm index must exceed 2 (or be inf)")
    if sigma_mode not in ("unit", "free"):
        raise ValueError("sigma_mode must be 'unit' or 'free'")
    alpha_frac = Fraction(alpha).limit_denominator(10**6)
    beta_frac = Fraction(dep_exponent).limit_denominator(10**6)
    if math.isinf(r):
        beta_star = Fraction(1)
        curve = (1 + beta_frac) / beta_frac
        dep_exp = (1 - beta_frac) / (2 * (1 + beta_frac))
        source = "sup-norm-bracket table"
    else:
        r_frac = Fraction(r).limit_denominator(10**6)
        beta_star = r_frac / (r_frac - 2)
        curve = r_frac * (1 + beta_frac) / (beta_frac * (r_frac - 1))
        dep_exp = (1 - beta_frac * (1 - 2 / r_frac)) / (2 * (1 + beta_frac))
        source = "finite-r-bracket table"
    if beta_frac > beta_star:
        if alpha_frac == 2:
            return RegimeReport(Regime.BOUNDARY, None, source)
        if alpha_frac < 2:
            return RegimeReport(Regime.DONSKER_BOUNDED, Fraction(0), source)
        return RegimeReport(Regime.IID_LIKE,
                            Fraction(1, 2) - 1 / alpha_frac, source)
    if beta_frac == beta_star:
        # curve meets alpha = 2 here; off-curve values still classify
        if alpha_frac == 2:
            return RegimeReport(Regime.BOUNDARY, None, source)
        if alpha_frac < 2:
            return RegimeReport(Regime.DONSKER_BOUNDED, Fraction(0), source)
        return RegimeReport(Regime.IID_LIKE,
                            Fraction(1, 2) - 1 / alpha_frac, source)
    if alpha_frac == curve:
        return RegimeReport(Regime.BOUNDARY, None, source)
    if alpha_frac > curve:
        return RegimeReport(Regime.IID_LIKE,
                            Fraction(1, 2) - 1 / alpha_frac, source)
    if sigma_mode != "unit":
        # the long-range exponent below presumes a unit norm radius
        return RegimeReport(Regime.DEPENDENCE_DOMINATED, dep_exp,
                            source + " (exponent stated at unit radius)")
    return RegimeReport(Regime.DEPENDENCE_DOMINATED, dep_exp, source)


# ---------------------------------------------------------------------------
# Gamma-mixing maximal inequality


def pi_n(entropy: EntropyModel, gamma: float, sigma: float, n: int,
         enforce_scale: bool = True) -> float:
    """Three-case maximal-inequality bound under polynomial gamma-mixing.

    Cases split on alpha versus r_tilde = min(r, 2) and r_tilde*(1+1/gamma);
    case boundaries are rejected, as are radii below the case's admissible
    scale (unless enforce_scale=False, used by the localization solver whose
    fixed point sits exactly at the scale floor).
    """
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    D, theta, B, alpha, V = entropy.D, entropy.theta, entropy.B, entropy.alpha, entropy.V
    r_t = min(entropy.r, 2.0)
    base = D * (theta / sigma) ** alpha * math.log(B / sigma) ** V
    if enforce_scale and base > n:
        raise ScaleError("entropy mass at the radius exceeds n")
    g1 = gamma / (gamma + 1.0)
    log_s = math.log(B / sigma)
    term_vc = (sigma ** (r_t / 2.0)
               * (D * (theta / sigma) ** alpha) ** (gamma / (2 * (gamma + 1)))
               * n ** (1.0 / (2 * (gamma + 1)))
               * log_s ** (V * gamma / (2 * (gamma + 1))))
    term_block = n ** (0.5 - g1) * base ** g1
    if _near(alpha, r_t) or _near(alpha, r_t * (1 + 1 / gamma)):
        raise BoundaryParameterError("alpha at a case boundary")
    if alpha < r_t:
        return term_vc + term_block
    if alpha < r_t * (1 + 1 / gamma):
        floor = n ** (-1.0 / (alpha + 2 - r_t))
        if enforce_scale and sigma < floor:
            raise ScaleError(f"sigma below admissible scale {floor:.3e}")
        extra = ((D * theta ** alpha * n ** ((r_t - alpha) / 2.0))
                 ** (-1.0 / (alpha + 2 - r_t)) * log_s ** (V / 2.0))
        return term_vc + term_block + extra
    floor = n ** (-1.0 / (alpha + (2 - r_t) * (1 + 1 / gamma)))
    if enforce_scale and sigma < floor:
        raise ScaleError(f"sigma below admissible scale {floor:.3e}")
    denom = alpha * gamma + (2 - r_t) * (gamma + 1)
    t1 = (n ** ((gamma * (alpha - r_t) + (2 - r_t)) / (2 * denom))
          * (D * theta ** alpha) ** (gamma / denom)
          * log_s ** (V * gamma / (2 * (gamma + 1))))
    t3 = (n ** (1.0 / (2 * (gamma + 1))) * sigma ** (r_t / 2.0)
          * base ** (gamma / (2 * (gamma + 1))))
    t4 = (n ** (gamma * (alpha - r_t) / (2 * denom))
          * (D * theta ** alpha) ** ((2 * gamma + 2 - r_t) / (2 * denom))
          * log_s ** (V / 2.0))
    return t1 + term_block + t3 + t4


def solve_delta_n(pi_fn: Callable[[float], float], n: int, t: float,
                  delta_max: float = 1.0, grid_per_decade: int = 32,
                  decades: float = 6.0) -> float:
    """Smallest delta with pi_fn(delta) <= sqrt(n) * delta**2.

    Requires pi_fn(delta)/delta**t non-increasing for some t in (0, 2)
    (audited on the search grid); the crossing is bracketed on a geometric
    grid and refined by bisection to relative tolerance 1e-6.
    """
    if not (0 < t < 2):
        raise ValueError("t must lie in (0, 2)")
    sqrt_n = math.sqrt(n)
    grid = np.geomspace(delta_max * 10.0 ** (-decades), delta_max,
                        int(grid_per_decade * decades) + 1)
    vals = np.array([pi_fn(d) for d in grid])
    ok = vals <= sqrt_n * grid ** 2
    if not ok.any():
        raise ValueError("no crossing: pi_fn(delta) > sqrt(n) delta^2 on grid")
    i = int(np.argmax(ok))
    if i == 0:
        # crossing already holds at the grid infimum; no refinement needed
        return float(grid[0])
    ratio = vals / grid ** t
    if np.any(np.diff(ratio) > 1e-9 * ratio[:-1]):
        raise ValueError("pi_fn(delta)/delta**t is not non-increasing")
    lo, hi = float(grid[i - 1]), float(grid[i])
    while hi / lo > 1.0 + 1e-6:
        mid = math.sqrt(lo * hi)
        if pi_fn(mid) <= sqrt_n * mid * mid:
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# Phase diagram


@dataclass(frozen=True)
class PhaseDiagram:
    beta_grid: np.ndarray
    alpha_grid: np.ndarray
    cells: list            # list of (beta, alpha, RegimeReport)
    curve: np.ndarray      # (beta, alpha) boundary polyline


def boundary_curve(beta: float, r_or_inf=math.inf) -> float:
    """Complexity exponent on the phase boundary at dependence exponent beta."""
    if math.isinf(r_or_inf):
        return (1.0 + beta) / beta if beta <= 1.0 else 2.0
    r = r_or_inf
    beta_star = r / (r - 2.0)
    if beta <= beta_star:
        return r * (1.0 + beta) / (beta * (r - 1.0))
    return 2.0


def phase_diagram(beta_grid, alpha_grid, r_or_inf=math.inf) -> PhaseDiagram:
    beta_grid = np.asarray(beta_grid, dtype=float)
    alpha_grid = np.asarray(alpha_grid, dtype=float)
    if (beta_grid <= 0).any() or (alpha_grid <= 0).any():
        raise ValueError("grids must be positive")
    cells = [(b, a, rate_exponent(a, b, r_or_inf))
             for b in beta_grid for a in alpha_grid]
    bs = np.geomspace(beta_grid.min(), beta_grid.max(), 256)
    curve = np.column_stack([bs, [boundary_curve(b, r_or_inf) for b in bs]])
    return PhaseDiagram(beta_grid, alpha_grid, cells, curve)


# ---------------------------------------------------------------------------
# Application exponent calculator


@dataclass(frozen=True)
class ApplicationExponent:
    app: str
    exponent: float
    params: dict
    notes: str = ""


def application_exponents(app: str, **p) -> ApplicationExponent:
    """Convergence-rate exponents (of n^{-exponent} for the squared risk,
    or as noted) for the worked estimation problems.

    Apps: dnn(s, d, gamma); additive(s, gamma, d_as); convex_worst(d, beta);
    convex_adapt(d, gamma); ot(beta, d); classification(alpha, gamma).
    gamma = math.inf recovers the independent-data exponents exactly.
    """
    if app == "dnn":
        s, d, gamma = p["s"], p["d"], p["gamma"]
        if s <= 0 or d < 1 or gamma <= 0:
            raise ValueError("need s > 0, d >= 1, gamma > 0")
        infl = 1.0 if math.isinf(gamma) else (1.0 + gamma) / gamma
        return ApplicationExponent(app, s / (d + 2 * s * infl), dict(p))
    if app == "additive":
        s, gamma, a = p["s"], p["gamma"], p["d_as"]
        if not (0 <= a < 1) or s <= 0 or gamma <= 0:
            raise ValueError("need 0 <= d_as < 1, s > 0, gamma > 0")
        infl = 1.0 if math.isinf(gamma) else (1.0 + gamma) / gamma
        num = 2 * s * (1 - a) - a
        if num <= 0:
            raise ValueError("dimension growth too fast for consistency")
        return ApplicationExponent(app, num / (2 * s * infl + 1), dict(p))
    if app == "convex_worst":
        d, beta = p["d"], p["beta"]
        if d <= 4:
            raise ValueError("worst-case convex regression needs d > 4")
        if _near(beta, 2.0 / (d - 2)) or _near(beta, 1.0):
            raise BoundaryParameterError("beta at an excluded boundary")
        if beta < 2.0 / (d - 2):
            raise ValueError("needs beta > 2/(d-2)")
        return ApplicationExponent(app, 2.0 / d, dict(p))
    if app == "convex_adapt":
        d, gamma = p["d"], p["gamma"]
        if d <= 8:
            raise ValueError("convex adaptation needs d > 8")
        if _near(gamma, 4.0 / (d - 4)) or _near(gamma, 1.0):
            raise BoundaryParameterError("gamma at an excluded boundary")
        if gamma < 4.0 / (d - 4):
            raise ValueError("needs gamma > 4/(d-4)")
        return ApplicationExponent(app, 4.0 / d, dict(p))
    if app == "ot":
        beta, d = p["beta"], p["d"]
        if d < 4 or beta <= 0:
            raise ValueError("need d >= 4 and beta > 0")
        if _near(beta, 2.0 / (d - 2)):
            raise BoundaryParameterError("beta at the regime boundary")
        expn = 2.0 / d if beta > 2.0 / (d - 2) else beta / (beta + 1.0)
        return ApplicationExponent(app, expn, dict(p))
    if app == "classification":
        alpha, gamma = p["alpha"], p["gamma"]
        if alpha < 0 or gamma <= 0:
            raise ValueError("need alpha >= 0, gamma > 0")
        inv_g = 0.0 if math.isinf(gamma) else 1.0 / gamma
        return ApplicationExponent(app, 1.0 / (alpha + 1.0 + inv_g), dict(p))
    raise ValueError(f"unknown application {app!r}")


def ot_schedule(beta: float, d: int, n: int) -> tuple[int, float]:
    """Sinkhorn iteration count and regularization for the debiased entropic
    transport estimator: (ceil(n^{3/d}), n^{-1/d}) in the fast-mixing regime
    beta > 2/(d-2), else (ceil(n^{3 beta/(2(beta+1))}), n^{-beta/(2(beta+1))})."""
    if d < 4 or beta <= 0 or n < 1:
        raise ValueError("need d >= 4, beta > 0, n >= 1")
    if _near(beta, 2.0 / (d - 2)):
        raise BoundaryParameterError("beta at the regime boundary 2/(d-2)")
    if beta > 2.0 / (d - 2):
        return math.ceil(n ** (3.0 / d)), n ** (-1.0 / d)
    e = beta / (2.0 * (beta + 1.0))
    return math.ceil(n ** (3.0 * e)), n ** (-e)
