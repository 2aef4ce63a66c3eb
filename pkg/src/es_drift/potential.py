"""Potential function, drift-constant pipeline, and truncated-drift estimation.

The potential adds to log||m|| a penalty that activates when the step
size leaves a band of normalized step sizes [ell, u]. The band ends are
the rate-zero success-curve preimages of two probabilities p_l and p_u
chosen around the 1/5 target:

    0 < p_u < 1/5 < p_l < 1/2      and      u / ell >= alpha^(5/4).

From (d, alpha, p_u, p_l) the pipeline derives the full constant set:
a truncation depth A = 1/d, a penalty weight v, improvement rates
r' >= r with band-minimal success probabilities p' <= p*, the drift
bound B as the minimum over the three step-size regimes, and the
envelope L <= B <= U with d*B bounded between positive constants.

The expected one-step potential change, truncated below at -A, is then
at most -B at every state. ``estimate_truncated_drift`` and
``drift_map`` verify this empirically by resampling one-step
transitions from fixed states.
"""

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, asdict
from enum import Enum

import numpy as np

from . import kernels
from .core import ESState
from .errors import ConfigurationError
from .estimates import MeanEstimate, mean_estimate
from .success import SuccessProbQuery, psucc_exact, psucc0_inverse


class Regime(str, Enum):
    """Step-size regime of a state relative to the band [ell, u]."""

    SMALL = "small_sigma"
    REASONABLE = "reasonable_sigma"
    LARGE = "large_sigma"


@dataclass(frozen=True)
class DriftConstants:
    """Derived constant set for one (d, alpha, p_u, p_l) configuration."""

    d: int
    alpha: float
    p_u: float
    p_l: float
    ell: float
    u: float
    A: float
    v: float
    r: float
    r_prime: float
    p_star: float
    p_prime: float
    B: float
    L: float
    U: float

    def potential_of(self, norm_m: float, sigma: float) -> float:
        """Potential at a state given by its norm and step size."""
        if not norm_m > 0.0:
            raise ValueError("potential undefined at the optimum (||m|| = 0)")
        if not sigma > 0.0:
            raise ValueError("sigma must be positive")
        return float(kernels.potential_value(
            norm_m, sigma, self.d, self.alpha, self.ell, self.u, self.v))

    def neutral_band(self) -> tuple[float, float]:
        """Normalized step sizes with zero penalty: [alpha*ell, alpha^(-1/4)*u]."""
        return self.alpha * self.ell, self.alpha ** -0.25 * self.u

    def classify(self, sigma_bar: float) -> Regime:
        if sigma_bar < self.ell:
            return Regime.SMALL
        if sigma_bar > self.u:
            return Regime.LARGE
        return Regime.REASONABLE

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DriftMapRow:
    """One verified grid point of the truncated-drift landscape."""

    sigma_bar: float
    regime: str
    drift_mean: float
    ci_halfwidth: float
    bound_B: float
    satisfied: bool


def _require(condition: bool, inequality: str, detail: str = "") -> None:
    if not condition:
        raise ConfigurationError(f"constraint violated: {inequality}"
                                 + (f" ({detail})" if detail else ""))


def _minimize_with_argmin(d: int, r: float, ell: float, u: float,
                          tol: float) -> tuple[float, float]:
    """Minimum of sbar -> psucc_exact(d, r, sbar) over [ell, u], with argmin.

    Dense 256-point log grid, then ternary refinement on the bracket
    around the best grid point (endpoints included in the grid).
    """
    if not 0.0 < ell < u:
        raise ValueError(f"need 0 < ell < u, got ell={ell}, u={u}")
    inner = min(tol / 10.0, 1e-9)

    def f(sbar: float) -> float:
        return psucc_exact(SuccessProbQuery(d, r, sbar), inner)

    grid = np.exp(np.linspace(math.log(ell), math.log(u), 256))
    values = [f(s) for s in grid]
    i = int(np.argmin(values))
    best_val, best_arg = values[i], float(grid[i])
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, len(grid) - 1)])
    for _ in range(100):
        if hi - lo < 1e-10 * u:
            break
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if f(m1) <= f(m2):
            hi = m2
        else:
            lo = m1
    mid = 0.5 * (lo + hi)
    refined = f(mid)
    if refined < best_val:
        best_val, best_arg = refined, mid
    return best_val, best_arg


def minimize_psucc_over_band(d: int, r: float, ell: float, u: float,
                             tol: float = 1e-8) -> float:
    """Minimum of the rate-r success probability over sbar in [ell, u]."""
    return _minimize_with_argmin(d, r, ell, u, tol)[0]


def derive_constants(d: int, alpha: float = 1.5, p_u: float = 0.1,
                     p_l: float = 0.3, tol: float = 1e-8) -> DriftConstants:
    """Derive the full constant set and verify every required inequality.

    A = 1/d and v = p'/(2 d log alpha). The pre-estimate rate r' is the
    image of the cap on v; the cap 1/(d log alpha) applies when it is
    below one, otherwise the always-valid cap 1/(2 d log alpha) is used
    (p' < 1 guarantees v stays below it). Raises ConfigurationError
    naming the violated inequality otherwise.
    """
    if d < 2:
        raise ConfigurationError(f"constraint violated: d >= 2 (got {d})")
    _require(alpha > 1.0, "alpha > 1", f"alpha={alpha}")
    _require(0.0 < p_u < 0.2 < p_l < 0.5, "0 < p_u < 1/5 < p_l < 1/2",
             f"p_u={p_u}, p_l={p_l}")

    log_a = math.log(alpha)
    inv_tol = min(tol, 1e-9)
    ell = psucc0_inverse(d, p_l, inv_tol)
    u = psucc0_inverse(d, p_u, inv_tol)
    _require(u / ell >= alpha ** 1.25, "u / ell >= alpha^(5/4)",
             f"u/ell={u / ell:.6g}, alpha^(5/4)={alpha ** 1.25:.6g}")

    A = 1.0 / d
    if d * log_a > 1.0:
        r_prime = 1.0 - math.exp(-log_a / (d * log_a - 1.0))
    else:
        _require(2.0 * d * log_a > 1.0, "2 * d * log(alpha) > 1",
                 f"d={d}, alpha={alpha}")
        r_prime = 1.0 - math.exp(-A / (1.0 - 1.0 / (2.0 * d * log_a)))

    p_prime, _ = _minimize_with_argmin(d, r_prime, ell, u, tol)
    v = p_prime / (2.0 * d * log_a)
    _require(0.0 < v < min(1.0, A / log_a), "0 < v < min(1, A / log(alpha))",
             f"v={v:.6g}")
    r = 1.0 - math.exp(-A / (1.0 - v))
    _require(r <= r_prime, "r <= r_prime", f"r={r:.6g}, r_prime={r_prime:.6g}")
    p_star, _ = _minimize_with_argmin(d, r, ell, u, tol)

    term_mid = A * p_star - 1.25 * v * log_a
    term_small = v * log_a * (5.0 * p_l - 1.0) / 4.0
    term_large = v * log_a * (1.0 - 5.0 * p_u) / 4.0
    B = min(term_mid, term_small, term_large)
    # term_small/term_large equal (p'/d)*(5 p_l - 1)/8 and (p'/d)*(1 - 5 p_u)/8,
    # so reusing them keeps L <= B exact in floating point
    L = min(0.375 * p_prime / d, term_small, term_large)
    U = (p_star / d) * max(0.375, (5.0 * p_l - 1.0) / 8.0, (1.0 - 5.0 * p_u) / 8.0)
    _require(B > 0.0, "B > 0", f"B={B:.6g}")
    _require(L <= B <= U, "L <= B <= U", f"L={L:.6g}, B={B:.6g}, U={U:.6g}")

    return DriftConstants(d=d, alpha=alpha, p_u=p_u, p_l=p_l, ell=ell, u=u,
                          A=A, v=v, r=r, r_prime=r_prime, p_star=p_star,
                          p_prime=p_prime, B=B, L=L, U=U)


def potential(state: ESState, c: DriftConstants) -> float:
    """Potential V at an algorithm state; undefined at the optimum."""
    if state.d != c.d:
        raise ValueError(f"state dimension {state.d} != constants dimension {c.d}")
    return c.potential_of(state.norm, state.sigma)


def truncated_delta(v_now: float, v_next: float, A: float) -> float:
    """One-step potential change with downward moves cut at -A."""
    if not A > 0.0:
        raise ValueError("truncation depth A must be positive")
    return max(v_next - v_now, -A)


def estimate_truncated_drift(state: ESState, c: DriftConstants, n: int,
                             rng) -> MeanEstimate:
    """Monte Carlo mean of the truncated potential change at a fixed state.

    Each of the n transitions resamples the offspring from the same
    state (a conditional expectation, not a trajectory average); the
    half-width is a 99% normal-approximation confidence radius.
    """
    if n < 1000:
        raise ValueError("need at least 1000 transitions for a stable estimate")
    if state.d != c.d:
        raise ValueError(f"state dimension {state.d} != constants dimension {c.d}")
    norm = state.norm
    if norm == 0.0:
        raise ValueError("drift undefined at the optimum (||m|| = 0)")
    total, total_sq = kernels.truncated_drift_sums(
        norm, state.sigma, c.d, c.alpha, c.ell, c.u, c.v, c.A, n, rng)
    return mean_estimate(float(total), float(total_sq), n)


def _drift_point(args) -> tuple[int, float, float]:
    index, sigma_bar, c, n, rng = args
    state = ESState(m=_unit_vector(c.d), sigma=sigma_bar / c.d)
    est = estimate_truncated_drift(state, c, n, rng)
    return index, est.mean, est.half_width


def _unit_vector(d: int) -> np.ndarray:
    m = np.zeros(d)
    m[0] = 1.0
    return m


def drift_map(d: int, c: DriftConstants, sigma_bar_grid, n: int, rng,
              workers: int = 1) -> list[DriftMapRow]:
    """Truncated-drift estimate at ||m|| = 1 states across a step-size grid.

    Each grid point gets an independent child stream spawned from rng,
    so results are identical for any worker count; rows come back in
    grid order.
    """
    grid = [float(s) for s in sigma_bar_grid]
    if not grid:
        raise ValueError("sigma_bar_grid must be non-empty")
    if d != c.d:
        raise ValueError(f"d={d} does not match constants (d={c.d})")
    streams = rng.spawn(len(grid))
    tasks = [(i, s, c, n, streams[i]) for i, s in enumerate(grid)]
    results: list[tuple[float, float] | None] = [None] * len(grid)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for index, mean, hw in pool.map(_drift_point, tasks):
                results[index] = (mean, hw)
    else:
        for task in tasks:
            index, mean, hw = _drift_point(task)
            results[index] = (mean, hw)
    rows = []
    for sigma_bar, payload in zip(grid, results):
        mean, hw = payload
        rows.append(DriftMapRow(
            sigma_bar=sigma_bar, regime=c.classify(sigma_bar).value,
            drift_mean=mean, ci_halfwidth=hw, bound_B=c.B,
            satisfied=bool(mean + hw <= -c.B)))
    return rows


def hitting_time_bounds(state0: ESState, c: DriftConstants,
                        epsilon: float) -> tuple[float, float]:
    """Expected-hitting-time bounds for reaching ||m|| <= epsilon.

    lower = (log||m0|| - log eps) * d / 4 - 1/2,
    upper = (V(state0) - log eps + 1/d) / B.
    A start already inside the target yields vacuous values and a warning.
    """
    if not epsilon > 0.0:
        raise ValueError("epsilon must be positive")
    norm0 = state0.norm
    if epsilon >= norm0:
        warnings.warn("trivial instance: epsilon >= ||m0||, bounds are vacuous",
                      stacklevel=2)
    lower = (math.log(norm0) - math.log(epsilon)) * c.d / 4.0 - 0.5
    upper = (potential(state0, c) - math.log(epsilon) + 1.0 / c.d) / c.B
    return lower, upper
