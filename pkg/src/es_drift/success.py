"""Success probabilities of the sphere step, exact and by Monte Carlo.

The probability that a Gaussian offspring improves the parent by a
relative rate r,

    p(d, r, sbar) = Pr( ||e1 + (sbar/d) N|| < 1 - r ),   N ~ N(0, I_d),

depends on the state only through the normalized step size
sbar = d*sigma/||m||. Squaring and rescaling turns the event into a
noncentral chi-squared CDF evaluation:

    ||e1 + (sbar/d) N||^2 * (d/sbar)^2  ~  chi2'_d(lambda),
    lambda = (d/sbar)^2,

so the exact value is the CDF of chi2'_d(lambda) at ((1-r) d / sbar)^2,
computed by the tolerance-controlled Poisson-mixture series in
:mod:`es_drift.kernels`. For r = 0 the curve is strictly decreasing in
sbar with image (0, 1/2), which makes it invertible by bisection. As
d -> infinity with r*d -> rho the curve converges to
Phi(-rho/sbar - sbar/2).
"""

import math
from dataclasses import dataclass

from scipy.special import gammainc

from . import kernels
from .errors import ConvergenceError
from .estimates import ProbEstimate, prob_estimate

SQRT2 = math.sqrt(2.0)

# hard cap on series terms before signaling failure
MAX_SERIES_TERMS = 1_000_000


@dataclass(frozen=True)
class SuccessProbQuery:
    """One success-probability evaluation point."""

    d: int
    r: float
    sigma_bar: float

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be positive, got {self.d}")
        if not 0.0 <= self.r < 1.0:
            raise ValueError(f"improvement rate must lie in [0, 1), got {self.r}")
        if not self.sigma_bar > 0.0:
            raise ValueError(f"normalized step size must be positive, got {self.sigma_bar}")


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / SQRT2)


def psucc_mc(q: SuccessProbQuery, n: int, rng) -> ProbEstimate:
    """Monte Carlo estimate of the success probability with rate q.r."""
    if n < 1:
        raise ValueError("sample count must be positive")
    hits = kernels.success_mc_hits(q.sigma_bar / q.d, 1.0 - q.r, q.d, n, rng)
    return prob_estimate(int(hits), n)


def _chisq_mixture_cdf(df: int, lam: float, x: float, tol: float,
                       max_terms: int) -> float:
    """Noncentral chi-squared CDF at x, accurate to tol."""
    if x <= 0.0:
        return 0.0
    a = 0.5 * df
    lam2 = 0.5 * lam
    x2 = 0.5 * x
    j0 = int(lam2)
    log_w0 = -lam2 if j0 == 0 else j0 * math.log(lam2) - lam2 - math.lgamma(j0 + 1)
    w0 = math.exp(log_w0)
    c0 = float(gammainc(a + j0, x2))
    log_t0 = (a + j0) * math.log(x2) - x2 - math.lgamma(a + j0 + 1)
    t0 = math.exp(log_t0) if log_t0 > -745.0 else 0.0
    value, err, n_terms, converged = kernels.poisson_mixture_chisq_cdf(
        a, lam2, x2, c0, t0, w0, j0, tol, max_terms)
    if not converged:
        raise ConvergenceError(
            f"mixture series hit the {max_terms}-term cap with error bound "
            f"{err:.3e} > tol {tol:.3e} (df={df}, noncentrality={lam:.4g}, x={x:.4g})",
            estimate=float(value), error_bound=float(err))
    return min(max(float(value), 0.0), 1.0)


def psucc_exact(q: SuccessProbQuery, tol: float = 1e-9,
                max_terms: int = MAX_SERIES_TERMS) -> float:
    """Success probability to absolute tolerance tol via the mixture series.

    Raises ConvergenceError (carrying the achieved bound) if the series
    needs more than ``max_terms`` terms, which happens for extreme
    normalized step sizes where the noncentrality explodes.
    """
    if not 0.0 < tol <= 1e-3:
        raise ValueError(f"tol must lie in (0, 1e-3], got {tol}")
    lam = (q.d / q.sigma_bar) ** 2
    x = ((1.0 - q.r) * q.d / q.sigma_bar) ** 2
    return _chisq_mixture_cdf(q.d, lam, x, tol, max_terms)


def psucc_limit(rho: float, sigma_bar: float) -> float:
    """Large-dimension limit Phi(-rho/sbar - sbar/2) for r*d -> rho."""
    if rho < 0.0:
        raise ValueError(f"rho must be non-negative, got {rho}")
    if not sigma_bar > 0.0:
        raise ValueError("normalized step size must be positive")
    return std_normal_cdf(-rho / sigma_bar - sigma_bar / 2.0)


def psucc0_inverse(d: int, p: float, tol: float = 1e-9) -> float:
    """Normalized step size sbar with psucc_exact(d, 0, sbar) = p, to tol.

    Defined for p in (0, 1/2), the image of the rate-zero success curve.
    Bisection on a bracket whose upper end doubles from 64 until the
    value falls below p; the lower end needs no evaluation because the
    curve tends to 1/2 as sbar -> 0.
    """
    if not 0.0 < p < 0.5:
        raise ValueError(f"p must lie in (0, 1/2), the image of the rate-0 curve; got {p}")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    inner = min(tol / 10.0, 1e-9)
    lo, hi = 1e-6, 64.0
    for _ in range(40):
        if psucc_exact(SuccessProbQuery(d, 0.0, hi), inner) < p:
            break
        hi *= 2.0
    else:
        raise ConvergenceError("no bracket: success probability stayed above p "
                               f"up to sigma_bar={hi}", estimate=hi, error_bound=math.inf)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        value = psucc_exact(SuccessProbQuery(d, 0.0, mid), inner)
        if abs(value - p) <= 0.5 * tol:
            return mid
        if value < p:
            hi = mid
        else:
            lo = mid
    raise ConvergenceError(f"bisection stalled on [{lo}, {hi}]",
                           estimate=0.5 * (lo + hi), error_bound=math.inf)
