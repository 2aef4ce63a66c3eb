"""Experiment configuration: defaults, key=value files, flag overrides.

A config file holds one ``key = value`` pair per line ('#' starts a
comment); lists are comma-separated. Command-line flags win over file
values, which win over the defaults below. The defaults size the full
experiment suite to minutes on a laptop.
"""

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

from .errors import ConfigurationError


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip())


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


_PARSERS = {
    "d_list": _int_list,
    "eps_list": _float_list,
    "alpha": float,
    "p_u": float,
    "p_l": float,
    "epsilon": float,
    "m0_norm": float,
    "sigma_bar0": float,
    "replicates": int,
    "master_seed": int,
    "mc_samples": int,
    "output_path": str,
    "max_iter": int,
    "record_every": int,
    "drift_grid_points": int,
    "drift_span_lo": float,
    "drift_span_hi": float,
    "curve_grid_points": int,
    "curve_sigma_lo": float,
    "curve_sigma_hi": float,
    "tol": float,
    "workers": int,
}


@dataclass(frozen=True)
class ExperimentConfig:
    d_list: tuple[int, ...] = (4, 8, 16)
    eps_list: Optional[tuple[float, ...]] = None
    alpha: float = 1.5
    p_u: float = 0.1
    p_l: float = 0.3
    epsilon: float = 1e-8
    m0_norm: float = 1.0
    sigma_bar0: float = 2.0
    replicates: int = 100
    master_seed: int = 20180715
    mc_samples: int = 1_000_000
    output_path: Optional[str] = None
    max_iter: int = 10_000_000
    record_every: int = 1
    drift_grid_points: int = 32
    drift_span_lo: float = 0.01
    drift_span_hi: float = 100.0
    curve_grid_points: int = 64
    curve_sigma_lo: float = 0.125
    curve_sigma_hi: float = 8.0
    tol: float = 1e-9
    workers: int = 1

    def validate(self) -> None:
        if not self.d_list or any(d < 2 for d in self.d_list):
            raise ConfigurationError("d_list must be non-empty with every d >= 2")
        if self.replicates < 1:
            raise ConfigurationError("replicates must be at least 1")
        if self.master_seed < 0:
            raise ConfigurationError("master_seed must be a non-negative integer")
        positives = ("alpha", "p_u", "p_l", "epsilon", "m0_norm", "sigma_bar0",
                     "mc_samples", "max_iter", "record_every", "drift_grid_points",
                     "drift_span_lo", "drift_span_hi", "curve_grid_points",
                     "curve_sigma_lo", "curve_sigma_hi", "tol", "workers")
        for name in positives:
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if self.eps_list is not None and any(e <= 0.0 for e in self.eps_list):
            raise ConfigurationError("eps_list entries must be positive")
        if not self.curve_sigma_lo < self.curve_sigma_hi:
            raise ConfigurationError("curve_sigma_lo must be below curve_sigma_hi")
        if not self.drift_span_lo < self.drift_span_hi:
            raise ConfigurationError("drift_span_lo must be below drift_span_hi")

    @property
    def epsilons(self) -> tuple[float, ...]:
        return self.eps_list if self.eps_list else (self.epsilon,)


def parse_config_file(path: str | Path) -> dict:
    """Read key=value lines into a typed override dict."""
    overrides = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigurationError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            overrides[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return overrides


def build_config(file_path: Optional[str] = None,
                 flag_overrides: Optional[dict] = None) -> ExperimentConfig:
    """Defaults, overridden by the config file, overridden by flags."""
    config = ExperimentConfig()
    if file_path:
        config = replace(config, **parse_config_file(file_path))
    if flag_overrides:
        known = {f.name for f in fields(ExperimentConfig)}
        cleaned = {k: v for k, v in flag_overrides.items() if v is not None}
        unknown = set(cleaned) - known
        if unknown:
            raise ConfigurationError(f"unknown config overrides: {sorted(unknown)}")
        config = replace(config, **cleaned)
    config.validate()
    return config
