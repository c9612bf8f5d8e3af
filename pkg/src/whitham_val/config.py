"""Experiment configuration: a validated dataclass plus a strict TOML loader.

The TOML layout has four sections, all optional, all keys optional:

    [params]       alpha, beta, gamma_r, gamma_i, a, c, d
    [wavetrain]    q
    [wme]          eta, sigma0, dt, m, smallness_bound, cfl_const, dealias
    [experiment]   name, epsilons, order, slow_modes,
                   fine_modes_per_inverse_epsilon, T1, a_psi, a_B,
                   sample_count, output_dir, rng_seed, fast_dt

Unknown sections or keys are hard errors, never warnings: a typo in a knob
must not silently run the default instead.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ImportError:  # pragma: no cover - python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .model import GglParams
from .spectral import GevreyParams, Grid1D, SpectralField, gevrey_norm
from .wme import ModulationState, WmeConfig

EXPERIMENTS = (
    "wavetrain-invariance",
    "residual-order",
    "error-scaling",
    "spectral-report",
    "classify-sweep",
)

# eta is explicit here (the library default of None auto-selects at solve
# time, which would leave the T1 budget check unverifiable at load time)
DEFAULT_ETA = 1e-4


@dataclass
class ExperimentConfig:
    """One validated experiment run."""

    experiment: str = "error-scaling"
    params: GglParams = field(default_factory=GglParams)
    q: float = 0.0
    epsilons: tuple = (0.1, 0.05, 0.025)
    order: int = 1
    slow_modes: int = 64
    fine_modes_per_inverse_epsilon: int = 64
    T1: float = 0.5
    wme: WmeConfig = field(default_factory=lambda: WmeConfig(eta=DEFAULT_ETA))
    initial_amplitudes: tuple = (0.02, 0.02)
    sample_count: int = 50
    output_dir: str = "out"
    rng_seed: int = 0
    fast_dt: float = 0.02

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; "
                f"choose one of {', '.join(EXPERIMENTS)}"
            )
        if not (-1.0 < self.q < 1.0):
            raise ConfigError(f"q = {self.q} leaves no wave train (|q| < 1 required)")
        eps = tuple(float(e) for e in self.epsilons)
        if not eps:
            raise ConfigError("epsilons must be non-empty")
        if any(not (0.0 < e < 1.0) for e in eps):
            raise ConfigError("every epsilon must lie in (0, 1)")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ConfigError("epsilons must be strictly decreasing")
        self.epsilons = eps
        if self.order not in (0, 1):
            raise ConfigError(f"order must be 0 or 1, got {self.order}")
        if self.slow_modes < 8 or self.slow_modes % 2:
            raise ConfigError("slow_modes must be even and at least 8")
        if self.fine_modes_per_inverse_epsilon < 8:
            raise ConfigError("fine_modes_per_inverse_epsilon must be at least 8")
        if not (self.T1 > 0.0 and math.isfinite(self.T1)):
            raise ConfigError("T1 must be positive and finite")
        if self.wme.eta is not None and self.wme.eta > 0.0:
            budget = self.wme.sigma0 / self.wme.eta
            if self.T1 >= budget:
                raise ConfigError(
                    f"T1 = {self.T1:g} exhausts the strip budget "
                    f"sigma0/eta = {budget:g}"
                )
        amps = tuple(float(v) for v in self.initial_amplitudes)
        if len(amps) != 2 or not all(math.isfinite(v) for v in amps):
            raise ConfigError("initial_amplitudes must be two finite numbers")
        self.initial_amplitudes = amps
        if self.sample_count < 4:
            raise ConfigError("sample_count must be at least 4")
        if self.rng_seed < 0:
            raise ConfigError("rng_seed must be nonnegative")
        if self.fast_dt <= 0.0:
            raise ConfigError("fast_dt must be positive")
        norm0 = initial_norm(self)
        if norm0 > self.wme.smallness_bound:
            raise ConfigError(
                f"initial data norm {norm0:.6g} exceeds the smallness bound "
                f"{self.wme.smallness_bound:g}"
            )

    def to_dict(self) -> dict:
        """JSON-friendly echo of every knob."""
        out = dataclasses.asdict(self)
        out["params"] = dataclasses.asdict(self.params)
        out["wme"] = dataclasses.asdict(self.wme)
        out["epsilons"] = list(self.epsilons)
        out["initial_amplitudes"] = list(self.initial_amplitudes)
        return out


def initial_state(cfg: ExperimentConfig) -> ModulationState:
    """Slow initial data: a_psi sin X (mean zero by construction), a_B cos X."""
    g = Grid1D(cfg.slow_modes, 2.0 * np.pi)
    a_psi, a_b = cfg.initial_amplitudes
    psi = SpectralField.from_samples(g, a_psi * np.sin(g.points))
    b = SpectralField.from_samples(g, a_b * np.cos(g.points))
    return ModulationState(
        psi_check=psi, B_check=b, T=0.0, sigma_current=cfg.wme.sigma0
    )


def initial_norm(cfg: ExperimentConfig) -> float:
    """Monitored Gevrey norm of the initial slow data at full strip width."""
    state = initial_state(cfg)
    stacked = SpectralField(state.grid, state.stacked())
    return gevrey_norm(stacked, GevreyParams(cfg.wme.sigma0, cfg.wme.m + 1.0))


# ---------------------------------------------------------------------------
# TOML loading


def _typed(section: str, key: str, value, kind):
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"[{section}] {key} must be a number")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"[{section}] {key} must be an integer")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"[{section}] {key} must be a boolean")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"[{section}] {key} must be a string")
        return value
    if kind is list:
        if not isinstance(value, list) or not value:
            raise ConfigError(f"[{section}] {key} must be a non-empty array")
        return [_typed(section, key, v, float) for v in value]
    raise AssertionError(kind)


_PARAMS_KEYS = {k: float for k in ("alpha", "beta", "gamma_r", "gamma_i", "a", "c", "d")}
_WAVETRAIN_KEYS = {"q": float}
_WME_KEYS = {
    "eta": float,
    "sigma0": float,
    "dt": float,
    "m": float,
    "smallness_bound": float,
    "cfl_const": float,
    "dealias": bool,
}
_EXPERIMENT_KEYS = {
    "name": str,
    "epsilons": list,
    "order": int,
    "slow_modes": int,
    "fine_modes_per_inverse_epsilon": int,
    "T1": float,
    "a_psi": float,
    "a_B": float,
    "sample_count": int,
    "output_dir": str,
    "rng_seed": int,
    "fast_dt": float,
}

_SECTIONS = {
    "params": _PARAMS_KEYS,
    "wavetrain": _WAVETRAIN_KEYS,
    "wme": _WME_KEYS,
    "experiment": _EXPERIMENT_KEYS,
}


def _section(data: dict, name: str) -> dict:
    raw = data.get(name, {})
    if not isinstance(raw, dict):
        raise ConfigError(f"[{name}] must be a table")
    allowed = _SECTIONS[name]
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(unknown)}")
    return {k: _typed(name, k, v, allowed[k]) for k, v in raw.items()}


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a validated config from parsed TOML data. Unknown sections or
    keys raise ConfigError."""
    unknown = sorted(set(data) - set(_SECTIONS))
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}")
    params = GglParams(**_section(data, "params"))
    q = _section(data, "wavetrain").get("q", 0.0)
    wme_kw = _section(data, "wme")
    wme_kw.setdefault("eta", DEFAULT_ETA)
    try:
        wme = WmeConfig(**wme_kw)
    except ValueError as exc:
        raise ConfigError(f"[wme] {exc}") from exc
    exp = _section(data, "experiment")
    kwargs = {}
    if "name" in exp:
        kwargs["experiment"] = exp["name"]
    for key in (
        "order",
        "slow_modes",
        "fine_modes_per_inverse_epsilon",
        "T1",
        "sample_count",
        "output_dir",
        "rng_seed",
        "fast_dt",
    ):
        if key in exp:
            kwargs[key] = exp[key]
    if "epsilons" in exp:
        kwargs["epsilons"] = tuple(exp["epsilons"])
    if "a_psi" in exp or "a_B" in exp:
        kwargs["initial_amplitudes"] = (exp.get("a_psi", 0.02), exp.get("a_B", 0.02))
    return ExperimentConfig(params=params, q=q, wme=wme, **kwargs)


def load_config(path: str) -> ExperimentConfig:
    """Parse and validate a TOML config file."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data)
