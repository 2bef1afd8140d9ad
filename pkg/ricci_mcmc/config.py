# ricci_mcmc/config.py

"""
Run configuration.

Three pydantic models:
- IntegratorConfig: step size, horizon and recording stride for dynamics.simulate
- ExperimentConfig: the K-realization convergence benchmark
- Settings: process defaults read from the environment (and a .env file)

Precedence for the CLI is: explicit flag > environment > built-in default.
"""

from __future__ import annotations
import os
from typing import Any, Dict, Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError

GENERATOR_KINDS = ("optimal", "mh")
OBSERVER_NAMES = ("l1", "kl", "chi2", "reverse-kl")

ENV_PREFIX = "RICCI_MCMC_"


def default_record_every(n: int) -> int:
    """Recording stride used when none is given: every step up to 1000 states, else every 10th."""
    return 1 if n <= 1000 else 10


class IntegratorConfig(BaseModel):
    """Forward-Euler integration settings."""

    model_config = ConfigDict(frozen=True)

    dt: float = Field(0.01, gt=0)
    t_end: float = Field(10.0, gt=0)
    record_every: int = Field(1, ge=1)
    enforce_positivity: bool = True

    @property
    def n_steps(self) -> int:
        # round, not floor: 10 / 0.01 is 999.9999999999999 in binary
        return max(1, int(round(self.t_end / self.dt)))


class ExperimentConfig(BaseModel):
    """
    Averaged L1 convergence benchmark.

    Defaults: dt = 0.01, T = 10, K = 100, n = 250.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(250, ge=2)
    K: int = Field(100, ge=1)
    dt: float = Field(0.01, gt=0, le=1.0)   # dt <= 1 keeps the optimal Q positivity-preserving
    T: float = Field(10.0, gt=0)
    seed: int = Field(0, ge=0, lt=2**64)
    generators: Tuple[str, ...] = GENERATOR_KINDS
    observers: Tuple[str, ...] = ("l1",)
    fixed_pi: bool = False
    with_exact: bool = False
    log_y: bool = False
    workers: int = Field(1, ge=1)
    record_every: Optional[int] = Field(None, ge=1)
    # test hook: start every realization at its target
    start_at_target: bool = False

    @field_validator("generators")
    @classmethod
    def _check_generators(cls, v: Tuple[str, ...]) -> Tuple[str, ...]:
        if not v:
            raise ValueError("at least one generator is required")
        bad = [g for g in v if g not in GENERATOR_KINDS]
        if bad:
            raise ValueError(f"unknown generator(s) {bad}; allowed: {', '.join(GENERATOR_KINDS)}")
        return tuple(dict.fromkeys(v))

    @field_validator("observers")
    @classmethod
    def _check_observers(cls, v: Tuple[str, ...]) -> Tuple[str, ...]:
        bad = [o for o in v if o not in OBSERVER_NAMES]
        if bad:
            raise ValueError(f"unknown observer(s) {bad}; allowed: {', '.join(OBSERVER_NAMES)}")
        # l1 is always recorded: the CSV and the plot are built on it
        return tuple(dict.fromkeys(("l1",) + tuple(v)))

    @model_validator(mode="after")
    def _check_horizon(self) -> "ExperimentConfig":
        if self.T < self.dt:
            raise ValueError(f"T={self.T} must be >= dt={self.dt}")
        return self

    @property
    def stride(self) -> int:
        return self.record_every or default_record_every(self.n)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(dt=self.dt, t_end=self.T, record_every=self.stride)

    def metadata(self) -> Dict[str, Any]:
        """Flat key=value pairs echoed at the top of result CSVs."""
        return {
            "n": self.n,
            "K": self.K,
            "dt": self.dt,
            "T": self.T,
            "seed": self.seed,
            "generators": ",".join(self.generators),
            "observers": ",".join(self.observers),
            "fixed_pi": self.fixed_pi,
            "sampling": "uniform-simplex",
        }


class Settings(BaseModel):
    """Process-level defaults."""

    log_level: str = "WARNING"
    workers: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    dt: float = Field(0.01, gt=0)
    t_end: float = Field(10.0, gt=0)

    @classmethod
    def from_env(cls, dotenv_path: Optional[str] = None) -> "Settings":
        """
        Build settings from RICCI_MCMC_* environment variables.

        A .env file (found by python-dotenv, or the given path) is loaded first;
        variables already set in the environment win.

        Raises:
            ConfigError: if a variable does not parse
        """
        load_dotenv(dotenv_path=dotenv_path, override=False)
        raw: Dict[str, str] = {}
        for field in cls.model_fields:
            value = os.getenv(ENV_PREFIX + field.upper())
            if value is not None and value.strip():
                raw[field] = value.strip()
        return build_config(cls, **raw)


def build_config(model: type, **kwargs: Any) -> Any:
    """
    Instantiate a config model, converting pydantic errors to ConfigError.

    Raises:
        ConfigError: with the first validation message
    """
    try:
        return model(**kwargs)
    except ValidationError as e:
        first = e.errors()[0]
        loc = ".".join(str(p) for p in first.get("loc", ())) or model.__name__
        raise ConfigError(f"{loc}: {first.get('msg')}") from e
