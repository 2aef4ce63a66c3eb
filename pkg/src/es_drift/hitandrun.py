"""Line-search progress oracle: the best possible step along a sampled direction.

For a direction delta sampled at the current point m, the line minimizer
of the sphere objective lands at x* = m + gamma* delta with
gamma* = -(m . delta) / ||delta||^2, and ||x*|| = ||m|| |sin(theta)| for
theta the angle between delta and m. Because the elitist step either
stays at m or moves to m + delta, which lies on the same line, the
oracle's log progress dominates the strategy's log progress for every
shared draw. Its expectation is what the hitting-time lower bound rests
on: the acute-angle expression

    E[ -log(sin(theta)) * 1{theta <= pi/2} ],   theta = angle(N, e1),

is at most 1/d in dimension d >= 2 (the angle density is
sin^(d-2)(theta) / (2 W_{d-2}) with W the Wallis integral). Obtuse
angles also shrink the norm under the unconstrained line minimizer;
the acute-angle indicator deliberately drops that extra progress, so
the expression is a conservative accounting of the oracle's progress,
and ``har_step`` reports the unrestricted value.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import kernels
from .errors import ConvergenceError
from .estimates import MeanEstimate, mean_estimate
from .kernels import LOG_PROGRESS_CAP


@dataclass(frozen=True)
class HarSample:
    """An angle draw and its acute-angle log progress."""

    theta: float
    log_progress: float

    @classmethod
    def from_theta(cls, theta: float) -> "HarSample":
        if not 0.0 <= theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {theta}")
        if theta > math.pi / 2.0:
            lp = 0.0
        elif theta == 0.0:
            lp = LOG_PROGRESS_CAP
        else:
            lp = min(-math.log(math.sin(theta)), LOG_PROGRESS_CAP)
        return cls(theta=theta, log_progress=lp)


def sample_angle(d: int, rng) -> HarSample:
    """Angle of a standard Gaussian direction to the first axis."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    g = rng.standard_normal(d)
    theta = math.atan2(float(np.linalg.norm(g[1:])), float(g[0]))
    return HarSample.from_theta(theta)


def optimal_gamma(m, delta) -> float:
    """Step length minimizing ||m + gamma*delta||^2 along delta."""
    m = np.asarray(m, dtype=float)
    delta = np.asarray(delta, dtype=float)
    denom = float(delta @ delta)
    if denom == 0.0:
        raise ValueError("degenerate direction: delta must be non-zero")
    return -float(m @ delta) / denom


def har_step(m, sigma: float, rng) -> tuple[np.ndarray, float]:
    """Sample delta ~ sigma * N(0, I) and move to the line minimizer.

    Returns (x*, log||m|| - log||x*||); the log progress is non-negative
    and capped at LOG_PROGRESS_CAP on a measure-zero collinear hit.
    """
    m = np.asarray(m, dtype=float)
    norm = float(np.linalg.norm(m))
    if norm == 0.0:
        raise ValueError("already at the optimum (||m|| = 0)")
    if not sigma > 0.0:
        raise ValueError("sigma must be positive")
    delta = sigma * rng.standard_normal(m.size)
    x_star = m + optimal_gamma(m, delta) * delta
    norm_star = float(np.linalg.norm(x_star))
    if norm_star == 0.0:
        return x_star, LOG_PROGRESS_CAP
    lp = math.log(norm) - math.log(norm_star)
    return x_star, min(max(lp, 0.0), LOG_PROGRESS_CAP)


def expected_log_progress_mc(d: int, n: int, rng) -> MeanEstimate:
    """Monte Carlo mean of the acute-angle log progress in dimension d."""
    if d < 2:
        raise ValueError("dimension must be at least 2 (angle density needs it)")
    if n < 1000:
        raise ValueError("need at least 1000 samples for a stable estimate")
    total, total_sq, capped = kernels.har_log_progress_sums(d, n, rng)
    if capped:
        warnings.warn(f"{capped} collinear draws capped at {LOG_PROGRESS_CAP}",
                      stacklevel=2)
    return mean_estimate(float(total), float(total_sq), n)


def wallis_integral(n: int) -> float:
    """W_n = integral of sin^n over [0, pi/2], by the standard recurrence."""
    if n < 0:
        raise ValueError("order must be non-negative")
    w_even, w_odd = math.pi / 2.0, 1.0
    for k in range(2, n + 1):
        if k % 2 == 0:
            w_even *= (k - 1) / k
        else:
            w_odd *= (k - 1) / k
    return w_even if n % 2 == 0 else w_odd


def expected_log_progress_quadrature(d: int, tol: float = 1e-9) -> float:
    """Expected acute-angle log progress by adaptive quadrature.

    Evaluates (2 W_{d-2})^(-1) * integral of -log(sin) * sin^(d-2) over
    [0, pi/2]; the integrable log singularity at zero is isolated on its
    own subinterval.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    norm_const = 2.0 * wallis_integral(d - 2)

    def integrand(theta: float) -> float:
        s = math.sin(theta)
        return -math.log(s) * s ** (d - 2)

    abs_budget = tol * norm_const
    split = 0.1
    total = 0.0
    total_err = 0.0
    for a, b in ((0.0, split), (split, math.pi / 2.0)):
        value, err = quad(integrand, a, b, epsabs=abs_budget / 2.0,
                          epsrel=1e-12, limit=400)
        total += value
        total_err += err
    if total_err > abs_budget:
        raise ConvergenceError(
            f"quadrature error {total_err:.3e} exceeds budget {abs_budget:.3e} at d={d}",
            estimate=total / norm_const, error_bound=total_err / norm_const)
    return total / norm_const
