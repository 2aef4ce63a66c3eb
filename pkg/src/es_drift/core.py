"""The (1+1) evolution strategy with the one-fifth success rule on the sphere.

One iteration samples a single Gaussian offspring around the current
search point m with standard deviation sigma. If the offspring is at
least as good it replaces m and sigma grows by the factor alpha;
otherwise sigma shrinks by alpha^(-1/4). Acceptance uses <= so that
ties (a probability-zero event) count as successes, which keeps the
step deterministic given the draw.

All randomness comes from explicit ``numpy.random.Generator`` streams;
see :mod:`es_drift.streams` for replicate stream derivation.
"""

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import kernels


@dataclass(frozen=True)
class ESParams:
    """Strategy parameters: step-size multiplier and problem dimension."""

    alpha: float
    d: int

    def __post_init__(self):
        if not self.alpha > 1.0:
            raise ValueError(f"alpha must exceed 1, got {self.alpha}")
        if self.d < 2:
            raise ValueError(f"dimension must be at least 2, got {self.d}")


@dataclass(frozen=True)
class ESState:
    """Algorithm state: search point m, step size sigma, iteration index t."""

    m: np.ndarray
    sigma: float
    t: int = 0

    def __post_init__(self):
        object.__setattr__(self, "m", np.asarray(self.m, dtype=float))
        if self.m.ndim != 1 or self.m.size == 0:
            raise ValueError("m must be a non-empty 1-d vector")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.t < 0:
            raise ValueError("iteration index must be non-negative")

    @property
    def d(self) -> int:
        return self.m.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.m))


@dataclass(frozen=True)
class StepOutcome:
    """Result of one offspring trial.

    log_progress is log||m_t|| - log||m_{t+1}||, zero on failure.
    """

    success: bool
    offspring_norm: float
    log_progress: float


class TraceRecord(NamedTuple):
    t: int
    norm_m: float
    sigma: float
    sigma_bar: float
    success: bool
    potential: float


@dataclass
class RunTrace:
    """Per-iteration history of a run, possibly thinned.

    The success flag stored with a record refers to the step taken from
    the recorded state; the final record carries False. ``potentials``
    is NaN unless a potential function was supplied to ``run_until``.
    """

    ts: np.ndarray
    norms: np.ndarray
    sigmas: np.ndarray
    sigma_bars: np.ndarray
    successes: np.ndarray
    potentials: np.ndarray
    hitting_time: Optional[int]
    iterations: int
    n_success: int

    def __len__(self) -> int:
        return len(self.ts)

    @property
    def records(self) -> list[TraceRecord]:
        return [TraceRecord(int(t), float(n), float(s), float(sb), bool(su), float(p))
                for t, n, s, sb, su, p in zip(
                    self.ts, self.norms, self.sigmas, self.sigma_bars,
                    self.successes, self.potentials)]


def sphere_eval(x: Sequence[float] | np.ndarray) -> float:
    """Squared Euclidean norm, the objective being minimized."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("expected a non-empty 1-d vector")
    return float(x @ x)


def initial_state(d: int, m0_norm: float, sigma_bar0: float) -> ESState:
    """State on the first axis with ||m|| = m0_norm and the given
    normalized step size (isotropy makes the direction irrelevant)."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if not (m0_norm > 0.0 and sigma_bar0 > 0.0):
        raise ValueError("m0_norm and sigma_bar0 must be positive")
    m = np.zeros(d)
    m[0] = m0_norm
    return ESState(m=m, sigma=sigma_bar0 * m0_norm / d)


def normalized_step_size(state: ESState) -> float:
    """d * sigma / ||m||, the scale-invariant state on the sphere."""
    norm = state.norm
    if norm == 0.0:
        raise ZeroDivisionError("normalized step size undefined at the optimum (||m|| = 0)")
    return state.d * state.sigma / norm


def es_step(state: ESState, params: ESParams, rng) -> tuple[ESState, StepOutcome]:
    """One offspring trial: sample x ~ m + sigma*N(0, I), keep the better point.

    On success sigma is multiplied by alpha, on failure by alpha^(-1/4).
    """
    if state.d != params.d:
        raise ValueError(f"state dimension {state.d} != params dimension {params.d}")
    z = rng.standard_normal(state.d)
    x = state.m + state.sigma * z
    fx = float(x @ x)
    fm = float(state.m @ state.m)
    offspring_norm = math.sqrt(fx)
    if fx <= fm:
        log_progress = math.inf if fx == 0.0 else 0.5 * (math.log(fm) - math.log(fx))
        new = ESState(m=x, sigma=state.sigma * params.alpha, t=state.t + 1)
        return new, StepOutcome(success=True, offspring_norm=offspring_norm,
                                log_progress=log_progress)
    new = ESState(m=state.m, sigma=state.sigma * params.alpha ** -0.25, t=state.t + 1)
    return new, StepOutcome(success=False, offspring_norm=offspring_norm, log_progress=0.0)


def run_until(state0: ESState, params: ESParams, epsilon: float, max_iter: int,
              rng, record_every: int = 1,
              potential_fn: Optional[Callable[[float, float], float]] = None) -> RunTrace:
    """Run until ||m_t|| <= epsilon or max_iter steps, tracing the state.

    hitting_time is the first t with ||m_t|| <= epsilon, or None if the
    iteration budget ran out (reported in the trace, not an error).
    ``record_every`` thins the trace; the final state is always kept.
    ``potential_fn(norm_m, sigma)`` fills the potential column when given.
    """
    if state0.d != params.d:
        raise ValueError(f"state dimension {state0.d} != params dimension {params.d}")
    if not epsilon > 0.0:
        raise ValueError("epsilon must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    if record_every < 1:
        raise ValueError("record_every must be positive")
    ts, norms, sigmas, successes, hit, t_final, n_success = kernels.es_run(
        state0.m, state0.sigma, params.alpha, epsilon, max_iter, record_every, rng)
    ts = ts + state0.t
    sigma_bars = np.where(norms > 0.0, params.d * sigmas / np.maximum(norms, 1e-300), np.inf)
    if potential_fn is None:
        potentials = np.full(len(ts), np.nan)
    else:
        potentials = np.array([potential_fn(float(n), float(s))
                               for n, s in zip(norms, sigmas)])
    return RunTrace(ts=ts, norms=norms, sigmas=sigmas, sigma_bars=sigma_bars,
                    successes=successes, potentials=potentials,
                    hitting_time=(state0.t + t_final) if hit else None,
                    iterations=state0.t + t_final, n_success=int(n_success))
